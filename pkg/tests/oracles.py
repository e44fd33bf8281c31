"""Independent brute-force oracles used to freeze expected test values.

These stay deliberately dumb: closed-form 2x2 singular values, entrywise
Kronecker products, and exhaustive matrix-unit application, so the code paths
they check share nothing with the library implementations.
"""
import numpy as np


def svd2x2(a) -> tuple[float, float]:
    """Singular values of a 2x2 complex matrix from the characteristic
    polynomial of a^dag a; returns (largest, smallest)."""
    a = np.asarray(a, dtype=complex)
    assert a.shape == (2, 2)
    t = float(np.real(np.trace(a.conj().T @ a)))
    d = abs(np.linalg.det(a)) ** 2
    disc = max(t * t - 4.0 * d, 0.0)
    lam_max = (t + np.sqrt(disc)) / 2.0
    lam_min = (t - np.sqrt(disc)) / 2.0
    return float(np.sqrt(lam_max)), float(np.sqrt(max(lam_min, 0.0)))


def kron_entrywise(x, y) -> np.ndarray:
    """Kronecker product by explicit index loops (the convention oracle)."""
    x, y = np.asarray(x, dtype=complex), np.asarray(y, dtype=complex)
    dx, dy = x.shape[0], y.shape[0]
    out = np.zeros((dx * dy, dx * dy), dtype=complex)
    for i in range(dx):
        for j in range(dx):
            for k in range(dy):
                for l in range(dy):
                    out[i * dy + k, j * dy + l] = x[i, j] * y[k, l]
    return out


def matrix_unit(d: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((d, d), dtype=complex)
    e[i, j] = 1.0
    return e


def apply_on_matrix_units(channel, d: int):
    """L(E_ij) for all matrix units, as a dict for direct comparisons."""
    return {(i, j): channel.apply(matrix_unit(d, i, j))
            for i in range(d) for j in range(d)}
