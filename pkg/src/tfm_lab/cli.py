"""Command line entry point: ``tfm-lab``.

Subcommands::

    tfm-lab run SCENARIO.json
    tfm-lab verify-claims [--samples N] [--seed S] [--out DIR]
    tfm-lab check MECHANISM PROPERTY [grid flags]
    tfm-lab bid --n N --k K --v V

Exit codes: 0 success, 1 a violated expectation / failed claim / exceeded
search budget, 2 bad configuration or usage.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import equilibrium as eq
from . import revenue as rv
from .mechanisms import (
    GTA,
    PABGA,
    UPGA,
    VARIANTS,
    MyersonUniform,
    TopBidBurnPABGA,
    WellReserved,
    make_mechanism,
)
from .properties import (
    BudgetExceeded,
    CheckConfig,
    Property,
    PropertyReport,
    Verdict,
    audit_revenue_bound,
    check_dsic,
    check_epbb,
    check_epir,
    check_mmic,
    check_oca,
    check_scp,
    run_check,
    validate_oca_structure,
)

CSV_HEADER = ("claim", "n", "k", "dist", "computed", "exact_or_bound", "stderr", "verdict")
MIN_CLAIM_SAMPLES = 10_000
GRID_LABEL = "finite-grid certification"


class ConfigError(ValueError):
    """Malformed scenario; the message names the offending field."""


# ---------------------------------------------------------------------------
# report rows and atomic output


@dataclass(frozen=True)
class Row:
    claim: str
    n: str
    k: str
    dist: str
    computed: str
    reference: str
    stderr: str
    tolerance: str
    passed: bool

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def csv_fields(self) -> tuple:
        return (self.claim, self.n, self.k, self.dist, self.computed, self.reference, self.stderr, self.verdict)


def _num(x) -> str:
    if isinstance(x, Fraction):
        return str(x) if x.denominator == 1 else f"{float(x):.6f}"
    return f"{x:.6f}"


def claim_row(result: rv.ClaimResult, name: str | None = None) -> Row:
    exact = result.details.get("exact")
    reference = f"{result.relation} {_num(result.target)}"
    if exact is not None and 1 < exact.denominator < 10**6:
        reference += f" ({exact})"
    tol = "exact" if result.stderr == 0 else "3 stderr"
    return Row(name or result.claim, str(result.n), str(result.k), result.dist, _num(result.computed),
               reference, f"{result.stderr:.3e}", tol, result.passed)


def write_atomic(path: Path, text: str) -> None:
    """Write via a temp file in the same directory and rename it into place."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.csv_fields())
    return buf.getvalue()


def rows_to_table(rows) -> str:
    head = ("claim", "n", "k", "dist", "reference", "computed", "tolerance", "result")
    body = [(r.claim, r.n, r.k, r.dist, r.reference, r.computed, r.tolerance, r.verdict) for r in rows]
    widths = [max(len(str(line[i])) for line in [head, *body]) for i in range(len(head))]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*head), fmt.format(*("-" * w for w in widths))]
    lines += [fmt.format(*line) for line in body]
    return "\n".join(line.rstrip() for line in lines) + "\n"


# ---------------------------------------------------------------------------
# built-in claim suite


def _grid_row(claim: str, cfg: CheckConfig, computed: str, reference: str, passed: bool, k="") -> Row:
    dist = f"grid{{0..{cfg.grid_max}}}"
    return Row(claim, str(cfg.n), str(k), dist, computed, reference, "", GRID_LABEL, passed)


def _gta_rows() -> list[Row]:
    cfg = CheckConfig(n=3, grid_max=3, max_fake=2)
    core = [fn(GTA(), cfg) for fn in (check_dsic, check_mmic, check_oca, check_scp)]
    rules = [fn(GTA(), cfg) for fn in (check_epir, check_epbb)]
    hold = lambda reps: sum(r.verdict is Verdict.HOLDS_ON_GRID for r in reps)
    return [
        _grid_row("GTA desiderata", cfg, f"{hold(core)}/4", "DSIC MMIC OCA SCP hold", hold(core) == 4, "inf"),
        _grid_row("GTA EPIR/EPBB", cfg, f"{hold(rules)}/2", "EPIR EPBB hold", hold(rules) == 2, "inf"),
    ]


def counterexample_suite() -> list[tuple[str, PropertyReport, object]]:
    """Mechanisms known to break one desideratum, each with its search grid."""
    cases = [
        ("DSIC", PABGA(block_size=1), CheckConfig(n=2, grid_max=3)),
        ("MMIC", UPGA(block_size=1), CheckConfig(n=2, grid_max=5, max_fake=1)),
        ("SCP", UPGA(block_size=1), CheckConfig(n=2, grid_max=5, coalition_bound=1)),
        ("OCA", MyersonUniform(block_size=1, scale=4), CheckConfig(n=2, grid_max=4, max_fake=1)),
    ]
    return [(prop, run_check(prop, mech, cfg), mech) for prop, mech, cfg in cases]


def _counterexample_rows() -> list[Row]:
    found = 0
    for prop, report, mech in counterexample_suite():
        cex = report.counterexample
        if report.verdict is Verdict.VIOLATED and cex.replay(mech):
            if prop == "MMIC" and not cex.fakes:
                continue
            if prop == "SCP" and not cex.coalition:
                continue
            found += 1
    cfg = CheckConfig(n=2, grid_max=5)
    return [_grid_row("Counterexample suite", cfg, f"{found}/4", "4 violations replay exactly", found == 4)]


def _structure_rows() -> list[Row]:
    cfg = CheckConfig(n=3, grid_max=3)
    pabga = validate_oca_structure(PABGA(block_size=2), cfg)
    well = validate_oca_structure(WellReserved(block_size=2, reserve=1), cfg)
    bad = validate_oca_structure(TopBidBurnPABGA(block_size=2), cfg)
    ok = [
        pabga.holds and pabga.details["cardinal"].cardinal == (0, 0, 0),
        well.holds and well.details["cardinal"].cardinal == (0, 1, 2),
        bad.verdict is Verdict.VIOLATED and bad.counterexample.reason.startswith("(a)"),
    ]
    return [_grid_row("OCA structure", cfg, f"{sum(ok)}/3", "PABGA, WellReserved pass; value burn fails", all(ok), 2)]


def _revenue_bound_rows() -> list[Row]:
    cfg = CheckConfig(n=4, grid_max=4)
    report = audit_revenue_bound(GTA(), cfg)
    equal = report.details["revenue_equals_count"]
    return [_grid_row("GTA revenue = allocated count", cfg, "equal" if equal else "differs",
                      "equal on every profile", report.holds and equal, "inf")]


def _equilibrium_rows() -> list[Row]:
    gap, where = eq.max_best_response_gap(range(2, 13), grid_step=1e-3)
    mono = eq.monotonicity_failures(64)
    bound = eq.shading_bound_failures(64)
    return [
        Row("BNE best-response gap", "2..12", "1..10", "UNI[0,1]", f"{gap:.3e}", "<= 2.000e-03", "",
            "grid step 1e-3", gap <= 2e-3),
        Row("s(v) strictly increasing", "2..64", "1..10", "UNI[0,1]", f"{len(mono)} failures", "0 failures", "",
            "zero tolerance", not mono),
        Row("(n-k)v/n <= s(v) <= v", "2..64", "1..10", "UNI[0,1]", f"{len(bound)} failures", "0 failures", "",
            "zero tolerance", not bound),
    ]


def claim_suite(samples: int, seed: int) -> list[Row]:
    """Every built-in claim check, in a fixed order."""
    rows = []
    rows += _gta_rows()
    rows += _counterexample_rows()
    rows += _structure_rows()
    rows += _revenue_bound_rows()
    for k in (3, 2):
        rows.append(claim_row(rv.revenue_mean_check(PABGA(block_size=k), 4, samples, seed), f"PABGA n=4 k={k} rev"))
    rows.append(claim_row(rv.supply_limit_gain_check(4, 3, 2, samples, seed), "SupplyLimited beats PABGA(3)"))
    for n, k in ((4, 2), (10, 3), (20, 5)):
        rows.append(claim_row(rv.uniform_ratio_check(n, k, samples, seed)))
    for n, k in ((4, 2), (10, 3), (12, 10)):
        rows.append(claim_row(rv.expectation_of_ratio_check(n, k, samples, seed)))
    rows.append(claim_row(rv.exponential_ratio_check(10**4, 10**2, 1)))
    for n, k in ((2, 1), (10, 3), (10, 9)):
        rows.append(claim_row(rv.bulow_klemperer_check(n, k, samples, seed)))
    for n, k in ((4, 2), (5, 1), (2, 1)):
        rows.append(claim_row(rv.revenue_equivalence_check(n, k, samples, seed)))
    rows += _equilibrium_rows()
    for n in (4, 10):
        for k in (2, 3):
            for r in (Fraction(0), Fraction(1, 4), Fraction(1, 2)):
                rows.append(claim_row(rv.revenue_optimal_class_check(n, k, r, samples, seed)))
    return rows


def verify_claims(samples: int = 10**6, seed: int = 0, out: Path | None = None, stream=None) -> int:
    if samples < MIN_CLAIM_SAMPLES:
        raise ConfigError(f"--samples must be at least {MIN_CLAIM_SAMPLES}")
    stream = stream or sys.stdout
    rows = claim_suite(samples, seed)
    passed = sum(r.passed for r in rows)
    text = (f"tfm-lab claim suite: samples={samples} seed={seed}\n"
            f"Grid rows are {GRID_LABEL}s, not proofs.\n\n"
            + rows_to_table(rows)
            + f"\n{passed}/{len(rows)} claims pass\n")
    stream.write(text)
    if out is not None:
        write_atomic(Path(out) / "claims.txt", text)
        write_atomic(Path(out) / "claims.csv", rows_to_csv(rows))
    return 0 if passed == len(rows) else 1


# ---------------------------------------------------------------------------
# scenario files

MECHANISM_FIELDS = {"variant", "block_size", "reserve", "limit", "step", "scale", "n"}
GRID_FIELDS = {"n", "grid_max", "step", "max_fake", "coalition_bound", "budget", "random_trials", "seed"}
TASK_FIELDS = {"task", "n", "k", "distribution", "zeta", "samples", "seed", "reserve", "limit", "floor"}
SCENARIO_FIELDS = {"mechanism", "checks", "revenue_tasks", "grid", "output_dir"}
EXPECTATIONS = {"holds": False, "violated": True}


@dataclass(frozen=True)
class CheckRequest:
    property: Property
    expect_violation: bool


@dataclass(frozen=True)
class RevenueTask:
    task: str
    n: int
    k: int
    distribution: str = "uniform"
    zeta: Fraction = Fraction(1)
    samples: int = 100_000
    seed: int = 0
    reserve: Fraction = Fraction(0)
    limit: int | None = None
    floor: Fraction = Fraction(45, 100)


@dataclass(frozen=True)
class Scenario:
    mechanism: object
    checks: tuple
    revenue_tasks: tuple
    grid: CheckConfig
    output_dir: Path


def _fail(where: str, msg: str):
    raise ConfigError(f"field '{where}': {msg}")


def _expect(obj, kind, where):
    if not isinstance(obj, kind) or isinstance(obj, bool) and kind is not bool:
        name = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        _fail(where, f"expected {name}, got {json.dumps(obj)}")
    return obj


def _rational(obj, where) -> Fraction:
    if isinstance(obj, bool) or not isinstance(obj, (int, float, str)):
        _fail(where, f"expected a number or rational string, got {json.dumps(obj)}")
    try:
        return Fraction(str(obj))
    except ValueError:
        _fail(where, f"not a rational number: {json.dumps(obj)}")


def _unknown(obj: dict, allowed: set, where: str):
    extra = sorted(set(obj) - allowed)
    if extra:
        _fail(f"{where}.{extra[0]}" if where else extra[0], f"unknown field; allowed: {sorted(allowed)}")


def _parse_mechanism(obj) -> object:
    _expect(obj, dict, "mechanism")
    _unknown(obj, MECHANISM_FIELDS, "mechanism")
    if "variant" not in obj:
        _fail("mechanism.variant", "missing")
    variant = _expect(obj["variant"], str, "mechanism.variant")
    if variant.replace("_", "").replace("-", "").upper() not in VARIANTS:
        _fail("mechanism.variant", f"unknown mechanism {variant!r}; expected one of {sorted(VARIANTS)}")
    kw = {}
    for key in ("block_size", "limit", "n"):
        if key in obj:
            val = obj[key]
            if key == "block_size" and val in ("inf", "infinite", "Infinite"):
                kw[key] = float("inf")
            else:
                kw[key] = _expect(val, int, f"mechanism.{key}")
    for key in ("reserve", "step", "scale"):
        if key in obj:
            kw[key] = _rational(obj[key], f"mechanism.{key}")
    try:
        return make_mechanism(variant, **kw)
    except (ValueError, TypeError) as exc:
        _fail("mechanism", str(exc))


def _parse_grid(obj) -> CheckConfig:
    _expect(obj, dict, "grid")
    _unknown(obj, GRID_FIELDS, "grid")
    kw = {}
    for key in ("n", "max_fake", "budget", "random_trials", "seed"):
        if key in obj:
            kw[key] = None if obj[key] is None and key in ("budget", "random_trials") else _expect(obj[key], int, f"grid.{key}")
    for key in ("grid_max", "step"):
        if key in obj:
            kw[key] = _rational(obj[key], f"grid.{key}")
    if "coalition_bound" in obj:
        c = obj["coalition_bound"]
        kw["coalition_bound"] = None if isinstance(c, str) and c.lower() == "all" else _expect(c, int, "grid.coalition_bound")
    try:
        return CheckConfig(**kw)
    except ValueError as exc:
        _fail("grid", str(exc))


def _parse_check(obj, where) -> CheckRequest:
    if isinstance(obj, str):
        obj = {"property": obj}
    _expect(obj, dict, where)
    _unknown(obj, {"property", "expect"}, where)
    name = _expect(obj.get("property"), str, f"{where}.property")
    try:
        prop = Property(name.upper())
    except ValueError:
        _fail(f"{where}.property", f"unknown check {name!r}; expected one of {[p.value for p in Property]}")
    expect = _expect(obj.get("expect", "Holds"), str, f"{where}.expect").lower()
    if expect not in EXPECTATIONS:
        _fail(f"{where}.expect", f"expected 'Holds' or 'Violated', got {expect!r}")
    return CheckRequest(prop, EXPECTATIONS[expect])


def _parse_task(obj, where) -> RevenueTask:
    _expect(obj, dict, where)
    _unknown(obj, TASK_FIELDS, where)
    for key in ("task", "n", "k"):
        if key not in obj:
            _fail(f"{where}.{key}", "missing")
    name = _expect(obj["task"], str, f"{where}.task")
    if name not in TASKS:
        _fail(f"{where}.task", f"unknown task {name!r}; expected one of {sorted(TASKS)}")
    kw = {"task": name}
    for key in ("n", "k", "samples", "seed", "limit"):
        if key in obj:
            kw[key] = _expect(obj[key], int, f"{where}.{key}")
    for key in ("zeta", "reserve", "floor"):
        if key in obj:
            kw[key] = _rational(obj[key], f"{where}.{key}")
    if "distribution" in obj:
        dist = _expect(obj["distribution"], str, f"{where}.distribution")
        try:
            rv.distribution(dist)
        except ValueError as exc:
            _fail(f"{where}.distribution", str(exc))
        kw["distribution"] = dist
    return RevenueTask(**kw)


def parse_scenario(text: str, base: Path = Path(".")) -> Scenario:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    _expect(obj, dict, "<root>")
    _unknown(obj, SCENARIO_FIELDS, "")
    if "mechanism" not in obj:
        _fail("mechanism", "missing")
    mech = _parse_mechanism(obj["mechanism"])
    checks = tuple(_parse_check(c, f"checks[{i}]") for i, c in enumerate(_expect(obj.get("checks", []), list, "checks")))
    tasks = tuple(_parse_task(t, f"revenue_tasks[{i}]")
                  for i, t in enumerate(_expect(obj.get("revenue_tasks", []), list, "revenue_tasks")))
    grid = _parse_grid(obj.get("grid", {}))
    out = Path(_expect(obj.get("output_dir", "tfm-lab-out"), str, "output_dir"))
    return Scenario(mech, checks, tasks, grid, out if out.is_absolute() else base / out)


def _task_revenue(t: RevenueTask, mech) -> list[Row]:
    kw = {}
    if hasattr(mech, "block_size") and not isinstance(mech, GTA):
        kw["block_size"] = t.k
    mech = replace(mech, **kw) if kw else mech
    dist = rv.distribution(t.distribution, t.zeta)
    rev, sur, ratio = rv.mc_revenue_and_surplus(mech, dist, t.n, t.samples, t.seed)
    rows = []
    for label, est in (("revenue", rev), ("surplus", sur), ("revenue/surplus", ratio)):
        ok = est.exact is None or est.within(est.exact)
        ref = "~ " + _num(est.exact) if est.exact is not None else "n/a"
        rows.append(Row(f"{mech} {label}", str(t.n), str(t.k), str(dist), _num(est.mean), ref,
                        f"{est.stderr:.3e}", "3 stderr", ok))
    return rows


TASKS: dict[str, Callable[[RevenueTask, object], list[Row]]] = {
    "revenue": _task_revenue,
    "uniform_ratio": lambda t, m: [claim_row(rv.uniform_ratio_check(t.n, t.k, t.samples, t.seed))],
    "expectation_of_ratio": lambda t, m: [claim_row(rv.expectation_of_ratio_check(t.n, t.k, t.samples, t.seed))],
    "exponential_ratio": lambda t, m: [claim_row(rv.exponential_ratio_check(t.n, t.k, t.zeta, t.floor))],
    "bulow_klemperer": lambda t, m: [claim_row(rv.bulow_klemperer_check(t.n, t.k, t.samples, t.seed))],
    "revenue_equivalence": lambda t, m: [claim_row(rv.revenue_equivalence_check(t.n, t.k, t.samples, t.seed))],
    "revenue_optimal_class": lambda t, m: [claim_row(rv.revenue_optimal_class_check(t.n, t.k, t.reserve, t.samples, t.seed))],
    "supply_limit": lambda t, m: [claim_row(rv.supply_limit_gain_check(t.n, t.k, t.limit or 1, t.samples, t.seed))],
}


def run_scenario(path: Path, stream=None) -> int:
    stream = stream or sys.stdout
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    sc = parse_scenario(text, path.parent)
    lines = [f"scenario: {path.name}", f"mechanism: {sc.mechanism}"]
    ok = True
    if sc.checks:
        g = sc.grid
        bound = "All" if g.coalition_bound is None else g.coalition_bound
        lines.append(f"grid: n={g.n} values {{0, {g.step}, ..., {g.grid_max}}} max_fake={g.max_fake} "
                     f"coalition_bound={bound} ({GRID_LABEL})")
    for req in sc.checks:
        want = "Violated" if req.expect_violation else "Holds"
        try:
            report = run_check(req.property, sc.mechanism, sc.grid)
        except BudgetExceeded as exc:
            lines.append(f"{req.property}: BudgetExceeded (expected {want}) FAIL\n  {exc}")
            ok = False
            continue
        met = (report.verdict is Verdict.VIOLATED) == req.expect_violation
        if met and report.counterexample is not None:
            met = report.counterexample.replay(sc.mechanism)
        ok &= met
        lines.append(report.summary() + f"\n  expected {want}: {'PASS' if met else 'FAIL'}")
    for i, task in enumerate(sc.revenue_tasks):
        try:
            rows = TASKS[task.task](task, sc.mechanism)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"field 'revenue_tasks[{i}]': {exc}") from None
        ok &= all(r.passed for r in rows)
        write_atomic(sc.output_dir / f"task{i:02d}_{task.task}.csv", rows_to_csv(rows))
        lines.append(f"task {i} ({task.task}):")
        lines.extend("  " + line for line in rows_to_table(rows).splitlines())
    lines.append(f"result: {'PASS' if ok else 'FAIL'}")
    report_text = "\n".join(lines) + "\n"
    write_atomic(sc.output_dir / "report.txt", report_text)
    stream.write(report_text)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# argument parsing


def _fraction_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _bound_arg(text: str):
    return None if text.lower() == "all" else int(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tfm-lab", description="Transaction fee mechanism laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a JSON scenario file")
    p.add_argument("config", type=Path)

    p = sub.add_parser("verify-claims", help="run the built-in claim suite")
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("check", help="check one property of one mechanism on a grid")
    p.add_argument("mechanism")
    p.add_argument("property")
    p.add_argument("--block-size", type=int, default=None)
    p.add_argument("--reserve", type=_fraction_arg, default=None)
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--scale", type=_fraction_arg, default=None,
                   help="MyersonUniform value range (default: --grid-max)")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--grid-max", type=_fraction_arg, default=Fraction(3))
    p.add_argument("--step", type=_fraction_arg, default=Fraction(1))
    p.add_argument("--max-fake", type=int, default=0)
    p.add_argument("--coalition-bound", type=_bound_arg, default=None, help="integer or 'All' (default)")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--expect", choices=("Holds", "Violated"), default=None)

    p = sub.add_parser("bid", help="print the equilibrium bid s(v) of the uniform PABGA")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--v", type=_fraction_arg, required=True)
    p.add_argument("--allow-unverified", action="store_true")
    return parser


def _cmd_check(args) -> int:
    try:
        prop = Property(args.property.upper())
    except ValueError:
        raise ConfigError(f"unknown property {args.property!r}; expected one of {[p.value for p in Property]}") from None
    scale = args.scale if args.scale is not None else args.grid_max
    try:
        mech = make_mechanism(args.mechanism, block_size=args.block_size, reserve=args.reserve,
                              limit=args.limit, scale=scale)
        cfg = CheckConfig(n=args.n, grid_max=args.grid_max, step=args.step, max_fake=args.max_fake,
                          coalition_bound=args.coalition_bound, budget=args.budget, seed=args.seed)
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc).strip("'\"")) from None
    report = run_check(prop, mech, cfg)
    print(report.summary())
    if args.expect is None:
        return 0
    return 0 if (report.verdict is Verdict.VIOLATED) == (args.expect == "Violated") else 1


def _cmd_bid(args) -> int:
    if not 0 <= args.v <= 1:
        raise ConfigError("v must lie in [0, 1]")
    try:
        s = eq.shade_bid_uniform(args.n, args.k, args.v, allow_unverified=args.allow_unverified)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    print(f"{float(s):.12g}" if s.denominator != 1 else str(s))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return run_scenario(args.config)
        if args.command == "verify-claims":
            return verify_claims(args.samples, args.seed, args.out)
        if args.command == "check":
            return _cmd_check(args)
        return _cmd_bid(args)
    except ConfigError as exc:
        print(f"tfm-lab: error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"tfm-lab: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
