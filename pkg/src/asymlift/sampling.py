"""Seeded random inputs used by verification and classification routines.

Functional sampling is stratified over {raw, Hermitian part, traceless part}
of Gaussian pairing matrices; the traceless stratum is the discriminating one
for slow-oscillation checks.
"""
from __future__ import annotations

import numpy as np

from .channels import Channel, KrausSet, from_kraus
from .config import Config, DEFAULT_CONFIG


def ginibre(rng: np.random.Generator, dim: int) -> np.ndarray:
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)


def haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(rng, dim))
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = ginibre(rng, dim)
    return (g + g.conj().T) / 2.0


def pairing_matrices(rng: np.random.Generator, dim: int, count: int) -> list[np.ndarray]:
    """Stratified Gaussian pairing matrices: raw, Hermitian, traceless."""
    out = []
    for i in range(count):
        g = ginibre(rng, dim)
        stratum = i % 3
        if stratum == 1:
            g = (g + g.conj().T) / 2.0
        elif stratum == 2:
            g = g - np.trace(g) / dim * np.eye(dim)
        out.append(g)
    return out


def random_ucp_channel(rng: np.random.Generator, dim: int, n_kraus: int,
                       config: Config = DEFAULT_CONFIG) -> Channel:
    """Random unital CP map: Ginibre Kraus set renormalized so L(1) = 1.

    With T = sum_i K_i K_i^dag (a.s. invertible), the set {T^(-1/2) K_i}
    satisfies the unitality constraint exactly up to roundoff.
    """
    ks = [ginibre(rng, dim) for _ in range(n_kraus)]
    t = sum(k @ k.conj().T for k in ks)
    w, v = np.linalg.eigh(t)
    t_inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    return from_kraus(KrausSet(dim, tuple(t_inv_sqrt @ k for k in ks)), config)
