"""Numerical studies of the superposition bounds.

* :func:`sweep_two_component` scans ``x |psi1> +- sqrt(1 - x^2) |psi2>`` over a
  uniform grid on ``[0, 1]``.
* :func:`fuzz_bounds` evaluates both bound variants over a seeded ensemble.
  Each trial ``i`` is drawn from stream ``(master_seed, i)`` and is
  replayable in isolation with :func:`replay_trial`.
* :func:`cross_term_check` tests the cross-term inequality for one pair.
* :func:`saturation_suite` builds observables with an exact kernel vector.

Margins follow one sign convention: positive means the inequality is
violated by that much, negative is the slack.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bounds import (
    VARIANTS,
    BoundsReport,
    SuperpositionSpec,
    Variant,
    component_stats,
    upper_pairs,
    theorem1_bounds,
    theorem1_bounds_all,
)
from .config import TOL
from .errors import DegenerateSuperposition, GenerationFailure, InvariantViolation
from .ensembles import (
    EnsembleConfig,
    Stream,
    random_coefficients,
    random_hermitian,
    random_spec,
    random_state,
    random_unitary,
)
from .linalg import check_dims, validate_hermitian

SIGNS = ("plus", "minus")


@dataclass(frozen=True)
class SweepRow:
    x: float
    sign: str
    n: float
    exact: float
    reports: dict = field(default_factory=dict)  # variant name -> BoundsReport
    status: str = "ok"

    def report(self, variant: Variant | str = Variant.CORRECTED) -> BoundsReport:
        return self.reports[Variant.parse(variant).value]


def two_component_spec(psi1: np.ndarray, psi2: np.ndarray, x: float, sign: str) -> SuperpositionSpec:
    if sign not in SIGNS:
        raise ValueError(f"sign must be one of {SIGNS}, got {sign!r}")
    beta = math.sqrt(max(0.0, 1.0 - x * x))
    return SuperpositionSpec([x, beta if sign == "plus" else -beta], [psi1, psi2])


def sweep_two_component(psi1: np.ndarray, psi2: np.ndarray, a: np.ndarray,
                        grid_points: int = 201, sign: str = "plus") -> list[SweepRow]:
    """Bounds along the grid ``x = 0, 1/(g-1), ..., 1``; the endpoints are single-state cases."""
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    check_dims(psi1, psi2, a)
    rows = []
    for x in np.linspace(0.0, 1.0, grid_points):
        x = float(x)
        spec = two_component_spec(psi1, psi2, x, sign)
        try:
            reports = theorem1_bounds_all(spec, a)
        except DegenerateSuperposition:
            rows.append(SweepRow(x, sign, math.nan, math.nan, {}, "DegenerateSuperposition"))
            continue
        first = reports[Variant.CORRECTED]
        rows.append(SweepRow(x, sign, first.n, first.exact,
                             {v.value: r for v, r in reports.items()}))
    return rows


def median_interior_gaps(rows: list[SweepRow], variant: Variant | str = Variant.CORRECTED) -> tuple[float, float]:
    """Median of ``exact - B_L`` and of ``B_U - exact`` over rows with ``0 < x < 1``."""
    inner = [r.report(variant) for r in rows if 0.0 < r.x < 1.0 and r.status == "ok"]
    return (float(np.median([r.lower_gap for r in inner])),
            float(np.median([r.upper_gap for r in inner])))


def cross_term_check(psi_i: np.ndarray, psi_j: np.ndarray, a: np.ndarray) -> tuple[bool, float]:
    """Check ``|<A>_ij|^2 <= |<A>_i <A>_j|`` for one pair of states.

    Returns ``(holds, margin)`` with ``margin = |<A>_ij|^2 - |<A>_i <A>_j|``.
    The same inequality for ``A^2`` is implied by positivity and is enforced:
    a failure there raises :class:`InvariantViolation`.
    """
    check_dims(psi_i, psi_j, a)
    ai, aj = a @ psi_i, a @ psi_j
    mi = np.vdot(psi_i, ai).real
    mj = np.vdot(psi_j, aj).real
    mij = np.vdot(psi_i, aj)
    margin = float(abs(mij) ** 2 - abs(mi * mj))
    si = np.vdot(ai, ai).real
    sj = np.vdot(aj, aj).real
    margin_sq = float(abs(np.vdot(ai, aj)) ** 2 - si * sj)
    if margin_sq > TOL.cross_term * (1.0 + si * sj):
        raise InvariantViolation(f"cross-term inequality failed for A^2 (margin {margin_sq:.3e})")
    return margin <= TOL.cross_term * (1.0 + abs(mi * mj)), margin


def _cross_term_fails(st) -> bool:
    m = st.means
    lhs = np.abs(st.first_cross) ** 2
    rhs = np.abs(np.outer(m, m))
    iu = upper_pairs(m.size)
    return bool(np.any(lhs[iu] - rhs[iu] > TOL.cross_term * (1.0 + rhs[iu])))


def draw_trial(config: EnsembleConfig, index: int) -> tuple[SuperpositionSpec, np.ndarray]:
    """The ``(spec, A)`` pair of fuzz trial ``index``."""
    rng = Stream.for_index(config.master_seed, index)
    try:
        spec = random_spec(config, rng)
    except GenerationFailure as exc:
        raise GenerationFailure(str(exc), index) from None
    return spec, random_hermitian(config.dim, rng, config.operator_scheme)


def replay_trial(config: EnsembleConfig, index: int) -> dict[Variant, BoundsReport]:
    spec, a = draw_trial(config, index)
    return theorem1_bounds_all(spec, a)


def _run_trial(config: EnsembleConfig, index: int) -> tuple:
    spec, a = draw_trial(config, index)
    st = component_stats(spec, a)
    reports = theorem1_bounds_all(spec, a, st)
    cross = _cross_term_fails(st)
    out = [cross]
    for v in VARIANTS:
        r = reports[v]
        out.append((r.B_L - r.exact, r.exact - r.B_U, r.lower_gap, r.upper_gap,
                    r.B_U >= r.b_L and r.B_L >= 0.0))
    return tuple(out)


def _run_chunk(args: tuple[EnsembleConfig, int, int]) -> list[tuple]:
    config, start, stop = args
    return [_run_trial(config, i) for i in range(start, stop)]


def _summary(values: list[float]) -> dict:
    if not values:
        return {"min": None, "median": None, "max": None}
    arr = np.asarray(values)
    return {"min": float(arr.min()), "median": float(np.median(arr)), "max": float(arr.max())}


@dataclass
class FuzzReport:
    config: dict
    trials: int
    variants: dict
    comparison: dict
    cross_term_failures: int
    violation_records: list

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def fuzz_bounds(config: EnsembleConfig, trials: int, workers: int = 1,
                chunk: int = 2000) -> FuzzReport:
    """Run ``trials`` ensemble draws through both bound variants.

    With ``workers > 1`` chunks of trial indices run in separate processes;
    results are reduced in index order, so the report does not depend on the
    degree of parallelism.
    """
    if trials < 0:
        raise ValueError("trials must be >= 0")
    jobs = [(config, s, min(s + chunk, trials)) for s in range(0, trials, chunk)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for part in pool.map(_run_chunk, jobs) for r in part]
    else:
        results = [r for job in jobs for r in _run_chunk(job)]

    tol = TOL.bound_check
    records = []
    per_variant = {}
    flagged = {v: set() for v in VARIANTS}
    for k, v in enumerate(VARIANTS):
        lower = upper = structural = 0
        lgaps, ugaps = [], []
        for index, res in enumerate(results):
            lo_margin, up_margin, lgap, ugap, ok = res[1 + k]
            lgaps.append(lgap)
            ugaps.append(ugap)
            structural += not ok
            if lo_margin > tol:
                lower += 1
                flagged[v].add(index)
                records.append({"index": index, "variant": v.value, "side": "lower", "margin": lo_margin})
            if up_margin > tol:
                upper += 1
                flagged[v].add(index)
                records.append({"index": index, "variant": v.value, "side": "upper", "margin": up_margin})
        per_variant[v.value] = {
            "lower_violations": lower,
            "upper_violations": upper,
            "structural_failures": structural,
            "tightness": {"lower_gap": _summary(lgaps), "upper_gap": _summary(ugaps)},
        }
    records.sort(key=lambda r: (r["index"], r["variant"], r["side"]))
    c, p = flagged[Variant.CORRECTED], flagged[Variant.PRINTED]
    return FuzzReport(
        config=config.to_dict(),
        trials=trials,
        variants=per_variant,
        comparison={"both": len(c & p), "corrected_only": len(c - p), "printed_only": len(p - c)},
        cross_term_failures=sum(bool(r[0]) for r in results),
        violation_records=records,
    )


@dataclass(frozen=True)
class SaturationReport:
    trials: int
    dim: int
    eigenvalue: float
    max_deviation: float
    saturated: bool


def kernel_observable(dim: int, rng: Stream, eigenvalue: float = 0.0,
                      exact_kernel: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Random Hermitian ``P diag(eigenvalue, l_2, ..., l_d) P^dagger`` and its first eigenvector.

    With ``exact_kernel`` the unitary is ``1 (+) Q`` with ``Q`` Haar on the
    complement, so the returned eigenvector is ``e_1`` and the first row and
    column of ``A`` are exactly ``eigenvalue * e_1`` in floating point. A
    fully Haar ``P`` only annihilates the vector up to rounding (about 1e-17),
    which the square roots in the bound terms amplify to about 1e-8.
    """
    if exact_kernel:
        p = np.eye(dim, dtype=np.complex128)
        p[1:, 1:] = random_unitary(dim - 1, rng)
    else:
        p = random_unitary(dim, rng)
    lam = np.concatenate([[eigenvalue], rng.normal(dim - 1)])
    a = validate_hermitian((p * lam) @ p.conj().T)
    return a, p[:, 0].copy()


def saturation_suite(trials: int, dim: int, master_seed: int = 0, eigenvalue: float = 0.0,
                     tol: float = 1e-8, check: bool = True,
                     exact_kernel: bool = True) -> SaturationReport:
    """Bounds when one component is an eigenvector of ``A`` with eigenvalue ``eigenvalue``.

    For ``eigenvalue == 0`` the corrected bounds collapse onto the exact value;
    with ``check`` a deviation above ``tol`` raises :class:`InvariantViolation`.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    worst = 0.0
    for i in range(trials):
        rng = Stream.for_index(master_seed, i)
        a, kernel = kernel_observable(dim, rng, eigenvalue, exact_kernel)
        other = random_state(dim, rng)
        alpha = random_coefficients(2, rng, "complex_haar")
        r = theorem1_bounds(SuperpositionSpec(alpha, [kernel, other]), a, Variant.CORRECTED)
        worst = max(worst, abs(r.B_L - r.exact), abs(r.B_U - r.exact))
    saturated = worst <= tol
    if check and eigenvalue == 0.0 and not saturated:
        raise InvariantViolation(f"zero-eigenvector saturation off by {worst:.3e}")
    return SaturationReport(trials, dim, eigenvalue, worst, saturated)
