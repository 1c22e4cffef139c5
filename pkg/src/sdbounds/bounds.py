"""Bounds on the variance, K-coherence and incompatibility of a superposition.

For ``|psi> = sum_i alpha_i |psi_i>`` (unit components, ``sum |alpha_i|^2 = 1``)
the scaled variance ``n * Var_{psi/|psi|}(A)`` with ``n = ||psi||^2`` is
bracketed by a lower bound ``B_L = max(0, b_L)`` and an upper bound ``B_U``
built only from per-component means ``m_i``, variances ``v_i`` and the
coefficient moduli.

Two readings of the correction terms are kept side by side:

``printed``
    ``E_pm = (|M| pm G)^2 / n + M`` with ``M = sum |alpha_i|^2 m_i``,
    exactly as the formula is usually quoted.
``corrected``
    ``E_pm = (|M| pm G)^2 / n - T`` with ``T = sum |alpha_i|^2 m_i^2``, which
    is what the moment expansion actually produces once
    ``<A^2>_i = v_i + m_i^2`` is substituted. This variant saturates for a
    single component and is the default.

In both, ``b_L = S - E_+ - F`` and ``B_U = S - E_- + F``. Validity is reported
through flags rather than asserted: bounding the first-order cross terms by
``G`` needs ``|<A>_ij|^2 <= |<A>_i <A>_j|``, which only Cauchy-Schwarz on a
PSD operator guarantees.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .config import TOL
from .errors import DegenerateSuperposition, InvalidSpec, InvariantViolation, NonNormalizedState
from .linalg import check_dims
from .stats import moments, projector, skew_information


class Variant(str, Enum):
    PRINTED = "printed"
    CORRECTED = "corrected"

    @classmethod
    def parse(cls, value: "Variant | str") -> "Variant":
        return value if isinstance(value, cls) else cls(str(value).lower())


VARIANTS = (Variant.CORRECTED, Variant.PRINTED)


@dataclass(frozen=True, eq=False)
class SuperpositionSpec:
    coefficients: np.ndarray
    components: np.ndarray  # shape (N, dim), one state per row

    def __post_init__(self):
        alpha = np.array(self.coefficients, dtype=np.complex128).reshape(-1)
        comps = np.array(self.components, dtype=np.complex128)
        if comps.ndim == 1:
            comps = comps.reshape(1, -1)
        if alpha.size == 0 or comps.ndim != 2 or comps.shape[0] != alpha.size:
            raise InvalidSpec(f"{alpha.size} coefficients for component array of shape {comps.shape}")
        if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(comps))):
            raise InvalidSpec("non-finite coefficient or amplitude")
        weight = float(np.sum(np.abs(alpha) ** 2))
        if abs(weight - 1.0) > TOL.coefficient_norm:
            raise InvalidSpec(f"sum |alpha_i|^2 = {weight:.12g}, expected 1")
        norms = np.linalg.norm(comps, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > TOL.state_norm)
        if bad.size:
            raise NonNormalizedState(f"component {int(bad[0])} has norm {norms[bad[0]]:.12g}")
        object.__setattr__(self, "coefficients", alpha)
        object.__setattr__(self, "components", comps)

    @property
    def size(self) -> int:
        return self.coefficients.size

    @property
    def dim(self) -> int:
        return self.components.shape[1]


@dataclass(frozen=True, eq=False)
class ComponentStats:
    """Per-component moments plus the full matrices of cross moments.

    ``overlap[i, j] = <psi_i|psi_j>``, ``first_cross[i, j] = <psi_i|A|psi_j>``
    and ``second_cross[i, j] = <A psi_i|A psi_j>``; diagonals hold the
    component expectation values.
    """

    means: np.ndarray
    variances: np.ndarray
    second_moments: np.ndarray
    overlap: np.ndarray
    first_cross: np.ndarray
    second_cross: np.ndarray


@dataclass(frozen=True)
class BoundTerms:
    S: float
    T: float
    M: float
    G: float
    F: float


@dataclass(frozen=True)
class BoundsReport:
    n: float
    S: float
    T: float
    M: float
    G: float
    F: float
    E_plus: float
    E_minus: float
    b_L: float
    B_L: float
    B_U: float
    exact: float
    variant: str
    lower_satisfied: bool
    upper_satisfied: bool
    lower_gap: float
    upper_gap: float
    quantity: str = "variance"

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class IncompatBoundsReport:
    n: float
    terms_A: BoundTerms
    terms_B: BoundTerms
    sum_U: float
    F_sum: float  # F(A) + F(B)
    F_tilde: float
    E_plus: float  # E_+(A) + E_+(B)
    E_minus: float
    b_L_tilde: float
    B_L_tilde: float
    B_U_tilde: float
    U_exact: float
    variant: str
    lower_satisfied: bool
    upper_satisfied: bool
    lower_gap: float
    upper_gap: float

    def as_dict(self) -> dict:
        return asdict(self)


def assemble(spec: SuperpositionSpec) -> tuple[np.ndarray, float, np.ndarray]:
    """Return ``(raw, n, normalized)`` for ``raw = sum_i alpha_i psi_i``."""
    raw = spec.coefficients @ spec.components
    n = float(np.vdot(raw, raw).real)
    if n <= TOL.degenerate_norm:
        raise DegenerateSuperposition(f"superposition norm^2 {n:.3e}: components cancel")
    return raw, n, raw / math.sqrt(n)


def norm_squared(spec: SuperpositionSpec) -> float:
    """``||sum alpha_i psi_i||^2`` from the Gram matrix of the components."""
    gram = spec.components.conj() @ spec.components.T
    a = spec.coefficients
    n = float(np.real(a.conj() @ gram @ a))
    if n <= TOL.degenerate_norm:
        raise DegenerateSuperposition(f"superposition norm^2 {n:.3e}: components cancel")
    return n


def component_stats(spec: SuperpositionSpec, a: np.ndarray) -> ComponentStats:
    check_dims(spec.components[0], a)
    comps = spec.components
    applied = comps @ a.T  # row i is A psi_i
    overlap = comps.conj() @ comps.T
    first = comps.conj() @ applied.T
    second = applied.conj() @ applied.T
    means = first.diagonal().real.copy()
    seconds = second.diagonal().real.copy()
    variances = seconds - means**2
    variances[(variances < 0) & (variances >= -TOL.variance_clamp)] = 0.0
    ss = np.outer(seconds, seconds)
    if np.any(np.abs(second) ** 2 > ss + 1e-9 * (1.0 + ss)):
        raise InvariantViolation("Cauchy-Schwarz failed for <A^2>_ij; A^2 should be PSD")
    return ComponentStats(means, variances, seconds, overlap, first, second)


@lru_cache(maxsize=64)
def upper_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


def _pair_sum(absa: np.ndarray, x: np.ndarray) -> float:
    # sum_{i<j} 2 |alpha_i alpha_j| x_ij for symmetric x
    if absa.size < 2:
        return 0.0
    iu = upper_pairs(absa.size)
    return float(np.sum(2.0 * absa[iu[0]] * absa[iu[1]] * x[iu]))


def bound_terms(coefficients: np.ndarray, means, variances) -> BoundTerms:
    absa = np.abs(coefficients)
    w = absa**2
    m = np.asarray(means, dtype=float)
    v = np.asarray(variances, dtype=float)
    s = v + m**2
    return BoundTerms(
        S=float(w @ v),
        T=float(w @ m**2),
        M=float(w @ m),
        G=_pair_sum(absa, np.sqrt(np.abs(np.outer(m, m)))),
        F=_pair_sum(absa, np.sqrt(np.outer(s, s))),
    )


def correction_terms(terms: BoundTerms, n: float, variant: Variant) -> tuple[float, float]:
    """``(E_+, E_-)`` under the requested reading."""
    hi = (abs(terms.M) + terms.G) ** 2 / n
    lo = (abs(terms.M) - terms.G) ** 2 / n
    if variant is Variant.PRINTED:
        return hi + terms.M, lo + terms.M
    return hi - terms.T, lo - terms.T


def _exact_variance(spec: SuperpositionSpec, a: np.ndarray) -> tuple[float, float, np.ndarray]:
    _, n, unit = assemble(spec)
    return n, n * moments(unit, a).variance, unit


def _report(terms: BoundTerms, n: float, exact: float, variant: Variant,
            quantity: str = "variance") -> BoundsReport:
    e_plus, e_minus = correction_terms(terms, n, variant)
    b_l = terms.S - e_plus - terms.F
    b_u = terms.S - e_minus + terms.F
    lower = max(0.0, b_l)
    tol = TOL.bound_check
    return BoundsReport(
        n=n, S=terms.S, T=terms.T, M=terms.M, G=terms.G, F=terms.F,
        E_plus=e_plus, E_minus=e_minus, b_L=b_l, B_L=lower, B_U=b_u, exact=exact,
        variant=variant.value,
        lower_satisfied=lower <= exact + tol,
        upper_satisfied=exact <= b_u + tol,
        lower_gap=exact - lower, upper_gap=b_u - exact,
        quantity=quantity,
    )


def theorem1_bounds_all(spec: SuperpositionSpec, a: np.ndarray,
                        st: ComponentStats | None = None) -> dict[Variant, BoundsReport]:
    """Variance bounds under both readings, sharing one statistics pass."""
    st = component_stats(spec, a) if st is None else st
    terms = bound_terms(spec.coefficients, st.means, st.variances)
    n, exact, _ = _exact_variance(spec, a)
    return {v: _report(terms, n, exact, v) for v in VARIANTS}


def theorem1_bounds(spec: SuperpositionSpec, a: np.ndarray,
                    variant: Variant | str = Variant.CORRECTED) -> BoundsReport:
    return theorem1_bounds_all(spec, a)[Variant.parse(variant)]


def coherence_bounds(spec: SuperpositionSpec, a: np.ndarray,
                     variant: Variant | str = Variant.CORRECTED) -> BoundsReport:
    """Bounds on ``n * I(|psi~><psi~|, A)``.

    The component inputs are the pure-state skew informations, which equal
    the component variances; ``exact`` goes through :func:`skew_information`
    on the projector of the normalized superposition.
    """
    st = component_stats(spec, a)
    terms = bound_terms(spec.coefficients, st.means, st.variances)
    _, n, unit = assemble(spec)
    exact = n * skew_information(projector(unit), a)
    return _report(terms, n, exact, Variant.parse(variant), quantity="coherence")


def f_tilde(coefficients: np.ndarray, st_a: ComponentStats, st_b: ComponentStats) -> float:
    # s_i(A) + s_i(B) = U_i + m_i(A)^2 + m_i(B)^2
    s = st_a.second_moments + st_b.second_moments
    return _pair_sum(np.abs(coefficients), np.sqrt(np.outer(s, s)))


def incompatibility_bounds(spec: SuperpositionSpec, a: np.ndarray, b: np.ndarray,
                           variant: Variant | str = Variant.CORRECTED) -> IncompatBoundsReport:
    """Bounds on ``n * (Var(A) + Var(B))`` on the normalized superposition.

    ``F(A) + F(B)`` is replaced by the coarser ``F~`` built from the summed
    second moments, so the result is looser than adding the two separate
    variance bounds.
    """
    variant = Variant.parse(variant)
    check_dims(spec.components[0], a, b)
    st_a = component_stats(spec, a)
    st_b = component_stats(spec, b)
    terms_a = bound_terms(spec.coefficients, st_a.means, st_a.variances)
    terms_b = bound_terms(spec.coefficients, st_b.means, st_b.variances)
    ft = f_tilde(spec.coefficients, st_a, st_b)
    f_sum = terms_a.F + terms_b.F
    if ft < f_sum - 1e-9 * (1.0 + f_sum):
        raise InvariantViolation(f"F~ = {ft!r} < F(A) + F(B) = {f_sum!r}")
    _, n, unit = assemble(spec)
    u_exact = n * (moments(unit, a).variance + moments(unit, b).variance)
    ea_plus, ea_minus = correction_terms(terms_a, n, variant)
    eb_plus, eb_minus = correction_terms(terms_b, n, variant)
    sum_u = terms_a.S + terms_b.S
    b_l = sum_u - (ea_plus + eb_plus) - ft
    b_u = sum_u - (ea_minus + eb_minus) + ft
    lower = max(0.0, b_l)
    tol = TOL.bound_check
    return IncompatBoundsReport(
        n=n, terms_A=terms_a, terms_B=terms_b, sum_U=sum_u, F_sum=f_sum, F_tilde=ft,
        E_plus=ea_plus + eb_plus, E_minus=ea_minus + eb_minus,
        b_L_tilde=b_l, B_L_tilde=lower, B_U_tilde=b_u, U_exact=u_exact,
        variant=variant.value,
        lower_satisfied=lower <= u_exact + tol,
        upper_satisfied=u_exact <= b_u + tol,
        lower_gap=u_exact - lower, upper_gap=b_u - u_exact,
    )


def expansion_terms(spec: SuperpositionSpec, a: np.ndarray) -> tuple[float, float]:
    """``(decomposed, exact)`` for the scaled variance.

    ``decomposed`` rebuilds ``n * Var`` from component moments and the full
    off-diagonal cross moments:
    ``sum w_i s_i + X2 - (M + X1)^2 / n`` with
    ``Xk = sum_{i != j} conj(alpha_i) alpha_j <A^k>_ij``.
    """
    st = component_stats(spec, a)
    alpha = spec.coefficients
    w = np.abs(alpha) ** 2
    off = ~np.eye(alpha.size, dtype=bool)
    pair = np.outer(alpha.conj(), alpha)
    x1 = complex(np.sum((pair * st.first_cross)[off]))
    x2 = complex(np.sum((pair * st.second_cross)[off]))
    n = float(np.real(np.sum(pair * st.overlap)))
    if n <= TOL.degenerate_norm:
        raise DegenerateSuperposition(f"superposition norm^2 {n:.3e}: components cancel")
    mean_raw = float(w @ st.means) + x1.real
    decomposed = float(w @ st.second_moments) + x2.real - mean_raw**2 / n
    _, exact, _ = _exact_variance(spec, a)
    return decomposed, exact


def expansion_identity(spec: SuperpositionSpec, a: np.ndarray) -> float:
    """Absolute residual between the moment expansion and the direct variance."""
    decomposed, exact = expansion_terms(spec, a)
    return abs(decomposed - exact)
