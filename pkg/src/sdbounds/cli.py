"""Command-line entry point: ``sdbounds <command> ...``.

Every command writes its result plus ``<command>.manifest.json`` into
``--out`` (default: the current directory). Small results are echoed to
stdout as well. Exit codes: 0 success, 1 validation error (JSON on stderr),
2 usage error.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path


from .bounds import VARIANTS, SuperpositionSpec, Variant, incompatibility_bounds, theorem1_bounds_all
from .dataset import builtin_operator, builtin_states
from .doubleslit import SlitConfig, double_slit_report
from .ensembles import COEFFICIENT_SCHEMES, COMPONENT_SCHEMES, OPERATOR_SCHEMES, EnsembleConfig
from .errors import SDBoundsError
from .harness import SIGNS, fuzz_bounds, sweep_two_component
from .io import (
    csv_text,
    json_text,
    load_density,
    load_operator,
    load_state,
    make_manifest,
    write_atomic,
)
from .stats import moments, skew_information
from .stats import incompatibility as incompat_value

SEED_ENV = "SDBOUNDS_SEED"

MOMENT_COLUMNS = ["mean", "second_moment", "variance", "sd"]
BOUNDS_COLUMNS = ["variant", "quantity", "n", "S", "T", "M", "G", "F", "E_plus", "E_minus",
                  "b_L", "B_L", "B_U", "exact", "lower_satisfied", "upper_satisfied",
                  "lower_gap", "upper_gap"]
INCOMPAT_COLUMNS = (["variant", "n"]
                    + [f"{t}_{o}" for o in "AB" for t in ("S", "T", "M", "G", "F")]
                    + ["sum_U", "F_sum", "F_tilde", "E_plus", "E_minus", "b_L_tilde", "B_L_tilde",
                       "B_U_tilde", "U_exact", "lower_satisfied", "upper_satisfied",
                       "lower_gap", "upper_gap"])
SWEEP_COLUMNS = ["x", "sign", "status", "n", "exact"] + [
    f"{c}_{v.value}" for v in VARIANTS
    for c in ("b_L", "B_L", "B_U", "lower_margin", "upper_margin", "lower_satisfied", "upper_satisfied")
]
VIOLATION_COLUMNS = ["index", "variant", "side", "margin"]
SLIT_COLUMNS = ["quantity", "variant", "value"]

EPILOG = f"""\
CSV column order
  sd:               {",".join(MOMENT_COLUMNS)}
  bounds:           {",".join(BOUNDS_COLUMNS)}
  incompat-bounds:  {",".join(INCOMPAT_COLUMNS)}
  sweep-paper:      {",".join(SWEEP_COLUMNS)}
  fuzz violations:  {",".join(VIOLATION_COLUMNS)}
  double-slit:      {",".join(SLIT_COLUMNS)}
Margins are signed: positive = violation, negative = slack.
If --seed is absent, ${SEED_ENV} supplies the fuzz seed.
"""


def _parse_alpha(text: str) -> list[complex]:
    try:
        return [complex(tok.strip().replace("i", "j")) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse coefficient list {text!r}") from None


def _variants(choice: str) -> list[Variant]:
    return list(VARIANTS) if choice == "both" else [Variant.parse(choice)]


class _Run:
    """Collects output files for one command and writes them with a manifest."""

    def __init__(self, args: argparse.Namespace, argv: list[str]):
        self.args = args
        self.argv = argv
        self.out = Path(args.out)
        self.files: list[str] = []

    def write(self, name: str, text: str, echo: bool = False) -> None:
        write_atomic(self.out / name, text)
        self.files.append(name)
        if echo:
            sys.stdout.write(text)

    def finish(self, config: dict, seed: int | None = None) -> None:
        name = f"{self.args.command}.manifest.json"
        manifest = make_manifest(self.args.command, config, seed, ["sdbounds", *self.argv], self.files)
        write_atomic(self.out / name, json_text(manifest))


def _emit(run: _Run, stem: str, header: list[str], rows: list[list], records: list[dict]) -> None:
    if run.args.format == "json":
        run.write(f"{stem}.json", json_text(records if len(records) != 1 else records[0]), echo=True)
    else:
        run.write(f"{stem}.csv", csv_text(header, rows), echo=True)


def cmd_sd(run: _Run) -> None:
    a = run.args
    m = moments(load_state(a.state, a.renormalize), load_operator(a.op))
    row = [m.mean, m.second_moment, m.variance, m.sd]
    _emit(run, "sd", MOMENT_COLUMNS, [row], [dict(zip(MOMENT_COLUMNS, row))])
    run.finish({"state": a.state, "op": a.op})


def cmd_coherence(run: _Run) -> None:
    a = run.args
    value = skew_information(load_density(a.rho), load_operator(a.op))
    _emit(run, "coherence", ["skew_information"], [[value]], [{"skew_information": value}])
    run.finish({"rho": a.rho, "op": a.op})


def cmd_incompat(run: _Run) -> None:
    a = run.args
    value = incompat_value(load_state(a.state, a.renormalize), load_operator(a.opA), load_operator(a.opB))
    _emit(run, "incompat", ["U"], [[value]], [{"U": value}])
    run.finish({"state": a.state, "opA": a.opA, "opB": a.opB})


def _spec(args) -> SuperpositionSpec:
    states = [load_state(p, args.renormalize) for p in args.states]
    return SuperpositionSpec(args.alpha, states)


def cmd_bounds(run: _Run) -> None:
    a = run.args
    reports = theorem1_bounds_all(_spec(a), load_operator(a.op))
    chosen = [reports[v] for v in _variants(a.variant)]
    rows = [[getattr(r, c) for c in BOUNDS_COLUMNS] for r in chosen]
    _emit(run, "bounds", BOUNDS_COLUMNS, rows, [r.as_dict() for r in chosen])
    run.finish({"alpha": [str(x) for x in a.alpha], "states": a.states, "op": a.op, "variant": a.variant})


def _incompat_row(r) -> list:
    row = [r.variant, r.n]
    for terms in (r.terms_A, r.terms_B):
        row += [terms.S, terms.T, terms.M, terms.G, terms.F]
    return row + [r.sum_U, r.F_sum, r.F_tilde, r.E_plus, r.E_minus, r.b_L_tilde, r.B_L_tilde,
                  r.B_U_tilde, r.U_exact, r.lower_satisfied, r.upper_satisfied, r.lower_gap, r.upper_gap]


def cmd_incompat_bounds(run: _Run) -> None:
    a = run.args
    spec = _spec(a)
    op_a, op_b = load_operator(a.opA), load_operator(a.opB)
    chosen = [incompatibility_bounds(spec, op_a, op_b, v) for v in _variants(a.variant)]
    _emit(run, "incompat-bounds", INCOMPAT_COLUMNS, [_incompat_row(r) for r in chosen],
          [r.as_dict() for r in chosen])
    run.finish({"alpha": [str(x) for x in a.alpha], "states": a.states, "opA": a.opA,
                "opB": a.opB, "variant": a.variant})


def sweep_rows(rows) -> list[list]:
    out = []
    for r in rows:
        line = [r.x, r.sign, r.status, r.n, r.exact]
        for v in VARIANTS:
            if r.status != "ok":
                line += [float("nan")] * 5 + [False, False]
                continue
            b = r.report(v)
            line += [b.b_L, b.B_L, b.B_U, b.B_L - b.exact, b.exact - b.B_U,
                     b.lower_satisfied, b.upper_satisfied]
        out.append(line)
    return out


def cmd_sweep_paper(run: _Run) -> None:
    a = run.args
    op = builtin_operator()
    psi1, psi2 = builtin_states()
    signs = SIGNS if a.sign == "both" else (a.sign,)
    for sign in signs:
        rows = sweep_two_component(psi1, psi2, op, a.grid, sign)
        run.write(f"sweep_{sign}.csv", csv_text(SWEEP_COLUMNS, sweep_rows(rows)))
        ok = sum(r.status == "ok" and r.report().lower_satisfied and r.report().upper_satisfied for r in rows)
        print(f"sign={sign}: {len(rows)} rows, corrected bounds hold on {ok}")
    run.finish({"sign": a.sign, "grid": a.grid, "dataset": "built-in"})


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env, 0)
    except ValueError:
        raise SDBoundsError(f"${SEED_ENV}={env!r} is not an integer") from None


def cmd_fuzz(run: _Run) -> None:
    a = run.args
    base = {}
    if a.config:
        base = EnsembleConfig.from_json(Path(a.config).read_text()).to_dict()
    for key, value in (("dim", a.dim), ("n_components", a.components),
                       ("coefficient_scheme", a.coeffs), ("operator_scheme", a.ops),
                       ("component_scheme", a.component_scheme)):
        if value is not None:
            base[key] = value
    if a.seed is not None or os.environ.get(SEED_ENV) is not None or "master_seed" not in base:
        base["master_seed"] = _seed(a)
    config = EnsembleConfig.from_dict(base)
    started = time.perf_counter()
    report = fuzz_bounds(config, a.trials, workers=a.workers)
    run.write("fuzz_report.json", report.to_json())
    run.write("fuzz_violations.csv", csv_text(
        VIOLATION_COLUMNS, [[r[c] for c in VIOLATION_COLUMNS] for r in report.violation_records]))
    for name, stats in report.variants.items():
        print(f"{name}: lower_violations={stats['lower_violations']} "
              f"upper_violations={stats['upper_violations']} "
              f"structural_failures={stats['structural_failures']}")
    print(f"trials={report.trials} cross_term_failures={report.cross_term_failures} "
          f"elapsed={time.perf_counter() - started:.2f}s")
    run.finish({**config.to_dict(), "trials": a.trials}, config.master_seed)


def cmd_double_slit(run: _Run) -> None:
    a = run.args
    config = SlitConfig.from_json(Path(a.config).read_text()) if a.config else SlitConfig()
    rows = double_slit_report(config)
    run.write("double-slit.csv", csv_text(SLIT_COLUMNS, rows), echo=True)
    run.finish(config.to_dict())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdbounds", description=__doc__.splitlines()[0],
        epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, epilog=EPILOG,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.set_defaults(func=func)
        return p

    def fmt_opt(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    def renorm(p):
        p.add_argument("--renormalize", action="store_true",
                       help="accept and renormalize states outside the 1e-6 norm window")

    p = add("sd", cmd_sd, "mean, second moment, variance and SD of an observable")
    p.add_argument("--state", required=True)
    p.add_argument("--op", required=True)
    fmt_opt(p)
    renorm(p)

    p = add("coherence", cmd_coherence, "skew information of a density matrix")
    p.add_argument("--rho", required=True)
    p.add_argument("--op", required=True)
    fmt_opt(p)

    p = add("incompat", cmd_incompat, "variance-sum incompatibility of two observables")
    p.add_argument("--state", required=True)
    p.add_argument("--opA", required=True)
    p.add_argument("--opB", required=True)
    fmt_opt(p)
    renorm(p)

    for name, func, help_ in (("bounds", cmd_bounds, "variance bounds for a superposition"),
                              ("incompat-bounds", cmd_incompat_bounds,
                               "incompatibility bounds for a superposition")):
        p = add(name, func, help_)
        p.add_argument("--alpha", required=True, type=_parse_alpha,
                       help="comma-separated coefficients, e.g. 0.6,0.8 or --alpha=-0.6,0.8j")
        p.add_argument("--states", required=True, nargs="+")
        if name == "bounds":
            p.add_argument("--op", required=True)
        else:
            p.add_argument("--opA", required=True)
            p.add_argument("--opB", required=True)
        p.add_argument("--variant", choices=("corrected", "printed", "both"), default="corrected")
        fmt_opt(p)
        renorm(p)

    p = add("sweep-paper", cmd_sweep_paper, "bounds along x for the built-in 4x4 instance")
    p.add_argument("--sign", choices=("plus", "minus", "both"), default="both")
    p.add_argument("--grid", type=int, default=201)

    p = add("fuzz", cmd_fuzz, "bound validity over a seeded random ensemble")
    p.add_argument("--config", help="EnsembleConfig JSON; flags override its fields")
    p.add_argument("--dim", type=int)
    p.add_argument("--components", type=int)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=lambda s: int(s, 0))
    p.add_argument("--coeffs", choices=COEFFICIENT_SCHEMES)
    p.add_argument("--ops", choices=OPERATOR_SCHEMES)
    p.add_argument("--component-scheme", choices=COMPONENT_SCHEMES)
    p.add_argument("--workers", type=int, default=1)

    p = add("double-slit", cmd_double_slit, "single- versus both-slit position spread")
    p.add_argument("--config", help="SlitConfig JSON")
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "trials", 0) < 0:
            parser.error("--trials must be >= 0")
        if getattr(args, "grid", 2) < 2:
            parser.error("--grid must be >= 2")
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(_Run(args, argv))
    except SDBoundsError as exc:
        sys.stderr.write(json_text(exc.to_dict()))
        return 1
    except (OSError, ValueError) as exc:
        sys.stderr.write(json_text({"error": type(exc).__name__, "message": str(exc)}))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
