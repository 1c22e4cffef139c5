"""Point statistics of an observable on a state.

Covers expectation values, transition moments, the standard deviation,
Wigner-Yanase skew information and the variance-sum incompatibility.

For a pure state the skew information of ``A`` equals the variance of
``A``; :func:`pure_state_coherence` relies on this. For degenerate ``K`` the
skew information only sees coherence between distinct eigenspaces of ``K``;
no subspace decomposition is attempted here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import TOL
from .errors import NonNormalizedState
from .linalg import check_dims, psd_sqrt


@dataclass(frozen=True)
class MomentSet:
    mean: float
    second_moment: float
    variance: float
    sd: float


def _require_normalized(psi: np.ndarray) -> None:
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > TOL.state_norm:
        raise NonNormalizedState(f"state norm {norm:.12g} is not 1")


def _real(z: complex, what: str) -> float:
    if abs(z.imag) > TOL.imag_residue * max(1.0, abs(z.real)):
        raise ValueError(f"{what} has imaginary residue {z.imag:.3e}; operator not Hermitian?")
    return float(z.real)


def expectation(psi: np.ndarray, a: np.ndarray) -> float:
    """<psi|A|psi> for a normalized ``psi``."""
    check_dims(psi, a)
    _require_normalized(psi)
    return _real(complex(np.vdot(psi, a @ psi)), "expectation value")


def transition_moment(psi_i: np.ndarray, x: np.ndarray, psi_j: np.ndarray) -> complex:
    """<psi_i|X|psi_j>."""
    check_dims(psi_i, x, psi_j)
    return complex(np.vdot(psi_i, x @ psi_j))


def _clamp_variance(var: float) -> float:
    if -TOL.variance_clamp <= var < 0.0:
        return 0.0
    return var


def moments_from_applied(psi: np.ndarray, a_psi: np.ndarray) -> MomentSet:
    # second moment as ||A psi||^2 so A^2 is never formed
    mean = _real(complex(np.vdot(psi, a_psi)), "expectation value")
    second = float(np.vdot(a_psi, a_psi).real)
    var = _clamp_variance(second - mean * mean)
    return MomentSet(mean, second, var, math.sqrt(max(var, 0.0)))


def moments(psi: np.ndarray, a: np.ndarray) -> MomentSet:
    check_dims(psi, a)
    _require_normalized(psi)
    return moments_from_applied(psi, a @ psi)


def variance(psi: np.ndarray, a: np.ndarray) -> float:
    return moments(psi, a).variance


def sd(psi: np.ndarray, a: np.ndarray) -> float:
    return moments(psi, a).sd


def skew_information(rho: np.ndarray, k: np.ndarray) -> float:
    """Wigner-Yanase skew information ``-1/2 Tr([sqrt(rho), K]^2)``.

    The commutator ``C`` is anti-Hermitian, so the value is evaluated as
    ``1/2 ||C||_F^2`` which is non-negative by construction.

    >>> import numpy as np
    >>> plus = np.full((2, 2), 0.5)
    >>> round(skew_information(plus, np.diag([1.0, -1.0])), 12)
    1.0
    """
    check_dims(rho, k)
    root = psd_sqrt(rho)
    c = root @ k - k @ root
    return 0.5 * float(np.sum(np.abs(c) ** 2))


def mixed_variance(rho: np.ndarray, k: np.ndarray) -> float:
    """``Tr(rho K^2) - Tr(rho K)^2``; upper-bounds the skew information."""
    check_dims(rho, k)
    mean = float(np.trace(rho @ k).real)
    return _clamp_variance(float(np.trace(rho @ k @ k).real) - mean * mean)


def projector(psi: np.ndarray) -> np.ndarray:
    return np.outer(psi, psi.conj())


def pure_state_coherence(psi: np.ndarray, k: np.ndarray) -> float:
    """K-coherence of the pure state ``|psi><psi|``, computed as the variance of K.

    Numerically equal to ``skew_information(projector(psi), k)``.
    """
    return moments(psi, k).variance


def incompatibility(psi: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """Sum of the variances of ``A`` and ``B`` on ``psi / ||psi||``."""
    check_dims(psi, a, b)
    norm = np.linalg.norm(psi)
    if norm == 0.0:
        raise NonNormalizedState("zero vector has no normalized direction")
    unit = psi / norm
    return moments(unit, a).variance + moments(unit, b).variance
