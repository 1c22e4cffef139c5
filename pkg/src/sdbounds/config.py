"""Numerical tolerances used throughout the package.

Every threshold lives in one frozen record so a run manifest can echo the
exact set in force.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Tolerances:
    # relative to max(1, max|H_jk|)
    hermitian: float = 1e-12
    state_norm: float = 1e-9
    coefficient_norm: float = 1e-9
    density_trace: float = 1e-9
    psd_clamp: float = 1e-10
    imag_residue: float = 1e-12
    variance_clamp: float = 1e-12
    degenerate_norm: float = 1e-12
    bound_check: float = 1e-9
    cross_term: float = 1e-12
    loader_renorm: float = 1e-6
    jacobi_max_sweeps: int = 100
    jacobi_off_rel: float = 1e-14
    generation_min_norm: float = 1e-6
    generation_max_attempts: int = 100

    def as_dict(self) -> dict:
        return asdict(self)


TOL = Tolerances()
