"""Dense complex linear algebra: validation, Hermitian eigensolver, PSD square root.

States and operators are plain ``numpy`` arrays (``complex128``). The
validators below return normalized copies and raise on bad input; nothing
downstream re-checks what they guarantee.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .config import TOL
from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    NegativeEigenvalue,
    NonNormalizedState,
    NotDensityMatrix,
    NotHermitian,
    NotSquare,
)


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # columns, orthonormal


def _finite(x: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{what} contains NaN or Inf")


def validate_hermitian(raw, tol: float = TOL.hermitian) -> np.ndarray:
    """Return ``(raw + raw^dagger)/2`` after checking that ``raw`` is Hermitian.

    The asymmetry ``max|H_jk - conj(H_kj)|`` is compared against
    ``tol * max(1, max|H_jk|)``.
    """
    h = np.array(raw, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] == 0:
        raise NotSquare(f"expected a non-empty square matrix, got shape {h.shape}")
    _finite(h, "operator")
    asym = float(np.max(np.abs(h - h.conj().T)))
    scale = max(1.0, float(np.max(np.abs(h))))
    if asym > tol * scale:
        raise NotHermitian(asym, tol * scale)
    return (h + h.conj().T) / 2


def as_state(raw, tol: float = TOL.state_norm) -> np.ndarray:
    """Coerce to a 1-d complex vector and require unit norm within ``tol``."""
    v = np.array(raw, dtype=np.complex128).reshape(-1)
    if v.size == 0:
        raise DimensionMismatch("state vector is empty")
    _finite(v, "state")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise NonNormalizedState(f"state norm {norm:.12g} deviates from 1 by more than {tol:g}")
    return v


def normalize(raw) -> np.ndarray:
    v = np.array(raw, dtype=np.complex128).reshape(-1)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise NonNormalizedState("cannot normalize the zero vector")
    return v / norm


def as_density_matrix(raw, *, tol_trace: float = TOL.density_trace,
                      tol_psd: float = TOL.psd_clamp) -> np.ndarray:
    """Validate Hermiticity, unit trace and (clamped) positivity of ``raw``."""
    rho = validate_hermitian(raw)
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > tol_trace:
        raise NotDensityMatrix(f"trace {tr:.12g} is not 1")
    lam = eigh(rho).eigenvalues
    if lam[0] < -tol_psd:
        raise NegativeEigenvalue(float(lam[0]))
    return rho


def check_dims(*arrays: np.ndarray) -> int:
    """Return the common Hilbert-space dimension or raise DimensionMismatch."""
    dims = {a.shape[0] for a in arrays}
    for a in arrays:
        if a.ndim == 2 and a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"non-square operator of shape {a.shape}")
    if len(dims) != 1:
        raise DimensionMismatch(f"incompatible dimensions {sorted(dims)}")
    return dims.pop()


def inner(u: np.ndarray, v: np.ndarray) -> complex:
    """<u|v>, conjugate-linear in ``u``."""
    if u.shape != v.shape:
        raise DimensionMismatch(f"inner product of shapes {u.shape} and {v.shape}")
    return complex(np.vdot(u, v))


def apply(h: np.ndarray, v: np.ndarray) -> np.ndarray:
    if h.shape[1] != v.shape[0]:
        raise DimensionMismatch(f"cannot apply {h.shape} operator to dim-{v.shape[0]} vector")
    return h @ v


def _rotation(app: float, aqq: float, apq: complex) -> tuple[float, complex, complex, complex]:
    # U = diag(1, e^{-i phi}) @ [[c, s], [-s, c]] zeroes the (p, q) entry of U^dagger H U;
    # returned as entries (u00, u01, u10, u11)
    mag = abs(apq)
    conj_phase = (apq / mag).conjugate()
    tau = (aqq - app) / (2.0 * mag)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.hypot(1.0, tau))
    c = 1.0 / math.hypot(1.0, t)
    s = t * c
    return c, complex(s), -s * conj_phase, c * conj_phase


def eigh(h: np.ndarray, *, max_sweeps: int = TOL.jacobi_max_sweeps,
         off_rel: float = TOL.jacobi_off_rel) -> EigenDecomposition:
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Sweeps over all pairs ``p < q`` in row order until the off-diagonal
    Frobenius mass drops below ``off_rel`` times the full Frobenius norm.
    Eigenvalues come back ascending (stable order for ties).
    """
    a = np.array(h, dtype=np.complex128)
    d = a.shape[0]
    v = np.eye(d, dtype=np.complex128)
    fro = np.linalg.norm(a)
    if fro == 0.0 or d == 1:
        return EigenDecomposition(a.diagonal().real.copy(), v)
    skip = off_rel * fro / d
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(a.diagonal()))
        if off <= off_rel * fro:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                u00, u01, u10, u11 = _rotation(a[p, p].real, a[q, q].real, apq)
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = cp * u00 + cq * u10
                a[:, q] = cp * u01 + cq * u11
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = rp * u00 + rq * u10.conjugate()
                a[q, :] = rp * u01.conjugate() + rq * u11.conjugate()
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = vp * u00 + vq * u10
                v[:, q] = vp * u01 + vq * u11
    else:
        raise ConvergenceFailure(f"Jacobi did not converge in {max_sweeps} sweeps")
    lam = a.diagonal().real
    order = np.argsort(lam, kind="stable")
    return EigenDecomposition(lam[order].copy(), v[:, order])


def psd_sqrt(rho: np.ndarray, clamp: float = TOL.psd_clamp) -> np.ndarray:
    """Principal square root ``V diag(sqrt(lam)) V^dagger`` of a PSD matrix.

    Eigenvalues in ``[-clamp, 0)`` are treated as zero; anything more
    negative raises :class:`NegativeEigenvalue`. Positive eigenvalues below
    the solver resolution are also zeroed: they are rounding, and their
    square roots (about 1e-8) would swamp everything downstream.
    """
    lam, vecs = eigh(rho)
    if lam[0] < -clamp:
        raise NegativeEigenvalue(float(lam[0]))
    floor = max(TOL.jacobi_off_rel, lam.size * np.finfo(float).eps) * np.linalg.norm(rho)
    root = np.sqrt(np.where(lam > floor, lam, 0.0))
    out = (vecs * root) @ vecs.conj().T
    return (out + out.conj().T) / 2
