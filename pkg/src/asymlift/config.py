"""Numerical configuration.

All tolerances live in one record that is passed explicitly; nothing in the
package reads global state. Verification reports echo the config so residuals
can be audited against the thresholds that produced them.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

import numpy as np

_TOL_FIELDS = (
    "tol_herm", "tol_psd", "tol_per", "tol_cluster", "tol_alg",
    "tol_span", "tol_idem", "tol_bio", "tol_recon",
)
_INT_FIELDS = ("k_max", "samples", "seed", "dim_ceiling")


@dataclass(frozen=True)
class Config:
    """Tolerances and integer limits used throughout the pipeline.

    ``dim_ceiling`` bounds the side length of any superoperator we are willing
    to allocate, i.e. amplification is refused when (n*d)**2 exceeds it.
    """

    tol_herm: float = 1e-10      # self-adjointness / unitality residuals
    tol_psd: float = 1e-9        # Choi positivity margin
    tol_per: float = 1e-9        # |lambda| > 1 - tol_per counts as peripheral
    tol_cluster: float = 1e-8    # single-linkage radius for eigenvalue clusters
    tol_alg: float = 1e-8        # algebra axiom residuals
    tol_span: float = 1e-8       # membership-in-span residuals
    tol_idem: float = 1e-8       # Q*Q - Q and commutation residuals
    tol_bio: float = 1e-8        # biorthogonality residual after normalization
    tol_recon: float = 1e-8      # eigen-reconstruction residual (diagonalizable)
    k_max: int = 1_000_000       # exhaustive ceiling for power subsequences
    samples: int = 64            # random functionals / elements per check
    seed: int = 7041
    dim_ceiling: int = 1024      # max superoperator side, (n*d)**2 <= this

    def __post_init__(self):
        for name in _TOL_FIELDS:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in _INT_FIELDS:
            if int(getattr(self, name)) < 0:
                raise ValueError(f"{name} must be nonnegative")

    def rng(self) -> np.random.Generator:
        """Fresh deterministic generator; callers own the stream."""
        return np.random.default_rng(self.seed)

    def with_(self, **kw) -> "Config":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)


DEFAULT_CONFIG = Config()
