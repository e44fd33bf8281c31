"""Worked channels used across tests, fixtures, and demos."""
from __future__ import annotations

import numpy as np

from .channels import Channel, KrausSet, from_kraus, from_stochastic, identity_channel
from .config import Config, DEFAULT_CONFIG

GOLDEN_RATIO = (1.0 + np.sqrt(5.0)) / 2.0

PAULI_Z = np.diag([1.0, -1.0])

LAZY_CHAIN = np.array([[0.9, 0.1], [0.1, 0.9]])
TWO_CYCLE = np.array([[0.0, 1.0], [1.0, 0.0]])
THREE_CYCLE = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])


def depolarizing(dim: int = 2, config: Config = DEFAULT_CONFIG) -> Channel:
    """x -> trace(x)/d * 1, the maximally forgetful unital channel."""
    ops = []
    for i in range(dim):
        for j in range(dim):
            k = np.zeros((dim, dim))
            k[i, j] = 1.0 / np.sqrt(dim)
            ops.append(k)
    return from_kraus(KrausSet(dim, tuple(ops)), config)


def ad_unitary(u, config: Config = DEFAULT_CONFIG) -> Channel:
    """Conjugation x -> U x U^dag."""
    u = np.asarray(u, dtype=complex)
    return from_kraus(KrausSet(u.shape[0], (u,)), config)


def ad_z(config: Config = DEFAULT_CONFIG) -> Channel:
    return ad_unitary(PAULI_Z, config)


def tensor_channel(a: Channel, b: Channel, config: Config = DEFAULT_CONFIG) -> Channel:
    """The product map (a kron b) from the Kraus sets {K_i kron L_j}."""
    if a.kraus is None or b.kraus is None:
        raise ValueError("tensor_channel needs Kraus representations")
    ops = tuple(np.kron(k, l) for k in a.kraus.operators for l in b.kraus.operators)
    return from_kraus(KrausSet(a.dim * b.dim, ops), config)


def golden_rotation_unitary() -> np.ndarray:
    """diag(1, e^{i theta}) with theta = 2 pi * golden ratio (irrational phase)."""
    return np.diag([1.0, np.exp(2j * np.pi * GOLDEN_RATIO)])


def depolarizing_times_rotation(config: Config = DEFAULT_CONFIG) -> Channel:
    """The split channel D (x) AdU on M_2 (x) M_2 with an irrational rotation.

    Its peripheral spectrum {1, 1, e^{+-i theta}} is not made of roots of
    unity, which exercises the simultaneous-phase search machinery.
    """
    return tensor_channel(depolarizing(2, config),
                          ad_unitary(golden_rotation_unitary(), config), config)


def worked_channels(config: Config = DEFAULT_CONFIG) -> dict[str, Channel]:
    """The standard suite: identity, depolarizing, AdZ, lazy-chain pinching,
    and the depolarizing-times-rotation tensor channel."""
    return {
        "identity": identity_channel(2),
        "depolarizing": depolarizing(2, config),
        "ad_z": ad_z(config),
        "lazy_chain": from_stochastic(LAZY_CHAIN, config),
        "depolarizing_rotation": depolarizing_times_rotation(config),
    }
