"""``binpack-lab`` command line.

Exit status: 0 when every check passes, 1 when a violation is found, 2 on
usage or parse errors.
"""
from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path

from ._rational import RationalParseError, fmt, parse_rational, to_decimal
from .clustering import price_of_clustering
from .construction import (
    ConstructionError, GeneratorParams, generate_construction, k3_limit, lb_formula,
    verify_construction,
)
from .delays import (
    OracleLimitError, SimulationError, check_bound, compute_rho, default_rho, offline_optimal, simulate,
)
from .fileio import (
    FormatError, check_certificate, emit_certificate, emit_instance, instance_from_clustered,
    parse_certificate, parse_instance,
)
from .packing import SolverLimitError, exact_optimal, ffd, first_fit
from .weights import pi_float, pi_sequence, pi_upper

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Report:
    """Key/value report rendered as aligned text or as TSV (key, exact, decimal)."""

    def __init__(self, argv, fmt_name: str = "text"):
        self.rows: list[tuple[str, str, str]] = []
        self.format = fmt_name
        self.add("command", "binpack-lab " + " ".join(argv))
        self.ok = True

    def add(self, key: str, value, note: str | None = None) -> None:
        """Exact values get a decimal rendering; ``note`` is free text shown instead."""
        if note is not None:
            self.rows.append((key, str(value), note, False))
        elif isinstance(value, Fraction):
            self.rows.append((key, fmt(value), to_decimal(value, 16), True))
        else:
            self.rows.append((key, repr(value) if isinstance(value, float) else str(value), "", False))

    def verdict(self, key: str, passed: bool, detail: str = "") -> None:
        self.ok &= bool(passed)
        self.add(key, "pass" if passed else "FAIL", detail)

    def render(self) -> str:
        if self.format == "tsv":
            return "\n".join("\t".join(r[:3]) for r in self.rows) + "\n"
        width = max(len(r[0]) for r in self.rows)
        lines = []
        for k, exact, extra, numeric in self.rows:
            tail = f"  (~{extra})" if numeric else (f"  {extra}" if extra else "")
            lines.append(f"{k.ljust(width)}  {exact}{tail}".rstrip())
        return "\n".join(lines) + "\n"


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _families(text: str) -> frozenset:
    try:
        return frozenset(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"bad --families {text!r}") from None


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)[0]
    except RationalParseError:
        try:
            return Fraction(float(text))
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


# ---------------------------------------------------------------- commands

def cmd_pack(a, rep: Report) -> None:
    inst = parse_instance(_read(a.instance))
    items = inst.items()
    rep.add("algorithm", a.algorithm)
    rep.add("items", len(items))
    if a.algorithm == "ff":
        packing = first_fit(items)
    elif a.algorithm == "ffd":
        tr = ffd(items)
        packing = tr.packing
        rep.add("tau", tr.tau)
        rep.add("theta", tr.theta)
    else:
        opt = exact_optimal(items, a.item_limit)
        packing = opt.packing
        rep.add("method", opt.method)
    rep.add("bins", len(packing.bins))
    for b, (bin_, load) in enumerate(zip(packing.bins, packing.loads)):
        rep.add(f"bin {b}", " ".join(fmt(it.size) for it in bin_), f"load {fmt(load)}")


def cmd_price(a, rep: Report) -> None:
    inst = parse_instance(_read(a.instance)).clustered()
    cert = None
    if a.certificate:
        cert, sizes = parse_certificate(_read(a.certificate))
        problems = check_certificate(inst, cert, sizes)
        rep.verdict("certificate", not problems, "; ".join(problems[:3]))
    pr = price_of_clustering(inst, a.mode, certificate=cert, item_limit=a.item_limit)
    rep.add("k", pr.k)
    rep.add("clusters", len(pr.per_cluster))
    rep.add("sum OPT_i", pr.sum_cluster_opt)
    rep.add("global OPT", pr.global_opt, pr.global_opt_method)
    rep.add("ratio", pr.ratio)
    rep.verdict("every cluster needs k bins", pr.valid, ", ".join(pr.invalid_clusters[:5]))


def cmd_gen_lb(a, rep: Report) -> None:
    p = GeneratorParams(a.N, a.M, a.k, _families(a.families), leftover=a.leftover)
    c = generate_construction(p)
    for key in ("N", "M", "k"):
        rep.add(key, getattr(p, key))
    rep.add("families", ",".join(str(f) for f in sorted(p.families)))
    rep.add("nu", c.nu)
    rep.add("clusters", len(c.instance.clusters))
    rep.add("items", c.instance.item_count())
    rep.add("large items", c.large_item_count)
    rep.add("certificate bins", c.certificate.bin_count)
    vr = verify_construction(c, solve_clusters=not a.no_solve)
    for name, passed, detail in vr.checks:
        rep.verdict(name, passed, detail)
    if not a.no_solve:
        rep.add("sum OPT_i", vr.sum_cluster_opt)
        rep.add("ratio", vr.ratio)
    if a.emit:
        base = Path(a.emit)
        sizes = {}
        for cl in c.instance.all_classes():
            sizes[cl.label] = cl.size
        base.with_suffix(".inst").write_text(emit_instance(instance_from_clustered(c.instance)))
        base.with_suffix(".cert").write_text(emit_certificate(c.certificate, sizes))
        rep.add("wrote", f"{base.with_suffix('.inst')} {base.with_suffix('.cert')}")


def cmd_lb_formula(a, rep: Report) -> None:
    try:
        rep.add(f"lb(k={a.k})", lb_formula(a.k))
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_k3_limit(a, rep: Report) -> None:
    rep.add("k3 limit", k3_limit())


def cmd_verify_weights(a, rep: Report) -> None:
    from .suites import WEIGHT_NAMES, cluster_suite, ffd_suite, weight_cap_suite
    names = WEIGHT_NAMES if a.function == "all" else (a.function,)
    rep.add("seed", a.seed)
    rep.add("trials", a.trials)
    results = []
    if a.suite in ("caps", "all"):
        results.append(weight_cap_suite(names, a.trials, a.seed, a.exhaustive_grid))
    if a.suite in ("clusters", "all"):
        for k in (3, 4):
            if a.function in ("all", f"wk{k}"):
                results.append(cluster_suite(k, a.trials, a.seed, a.workers))
    if a.suite in ("ffd", "all") and a.function in ("all", "v"):
        results.append(ffd_suite(a.trials, a.seed, a.workers))
    for r in results:
        rep.add(f"{r.name} checked", r.trials)
        rep.verdict(r.name, r.passed, "; ".join(r.violations[:3]))


def cmd_pi(a, rep: Report) -> None:
    if a.terms < 1:
        raise UsageError("--terms must be at least 1")
    seq = pi_sequence(a.terms)
    if a.terms <= 12:
        rep.add("partial sum", seq.partial_sum)
        rep.add("tail bound", seq.tail_bound)
        rep.add("certified upper", seq.upper)
    else:
        rep.add("partial sum", pi_float(a.terms))
    rep.add("pi upper (certified)", pi_upper(a.terms))


def cmd_rho(a, rep: Report) -> None:
    rho, ratio = compute_rho(a.terms)
    rep.add("terms", a.terms)
    rep.add("rho", rho)
    rep.add("ratio bound", ratio)


def _timed(path: str):
    inst = parse_instance(_read(path))
    return inst.timed()


def _rho(a):
    return a.rho if a.rho is not None else Fraction(default_rho())


def _phase_rows(rep: Report, tr) -> None:
    rep.add("rho", tr.rho)
    rep.add("exact", tr.exact)
    rep.add("phases", tr.phase_count)
    for i, ph in enumerate(tr.phases):
        rep.add(f"phase {i}", "items " + ",".join(map(str, ph.items)),
                f"t={_num(ph.trigger_time)} delay={_num(ph.accumulated_delay)} bins={ph.bin_count}"
                + (" flushed" if ph.flushed else ""))
    rep.add("total cost", tr.total_cost)


def _num(x) -> str:
    return f"{fmt(x)} (~{to_decimal(x, 12)})" if isinstance(x, Fraction) else repr(x)


def cmd_simulate(a, rep: Report) -> None:
    tr = simulate(_timed(a.instance), _rho(a), a.horizon)
    _phase_rows(rep, tr)


def cmd_oracle(a, rep: Report) -> None:
    off = offline_optimal(_timed(a.instance), a.limit)
    rep.add("bins (B)", off.bin_count)
    rep.add("delay (D)", off.total_delay)
    rep.add("cost", off.cost)
    rep.add("partition", " | ".join(",".join(map(str, b)) for b in off.partition))


def cmd_check_bound(a, rep: Report) -> None:
    items = _timed(a.instance)
    tr = simulate(items, _rho(a), a.horizon)
    off = offline_optimal(items, a.limit)
    chk = check_bound(tr, off, a.pi_terms)
    _phase_rows(rep, tr)
    rep.add("OPT (B + D)", off.cost)
    rep.add("phase bound", chk.phase_bound)
    rep.add("ratio bound", chk.ratio_bound)
    rep.verdict("ALG within bounds", chk.ok, chk.detail)


def cmd_suite(a, rep: Report) -> None:
    from .acceptance import CRITERIA, run_criterion
    rep.add("seed", a.seed)
    rep.add("scale", a.scale)
    wanted = sorted(CRITERIA) if not a.only else sorted({int(x) for x in a.only.split(",")})
    for n in wanted:
        v = run_criterion(n, a.scale, a.seed, a.workers)
        rep.verdict(f"criterion {n} ({v.title})", v.passed and v.within_budget, f"{v.detail} [{v.seconds:.2f}s]")


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="binpack-lab", description="Clustered bin packing and bin packing with delays.")
    ap.add_argument("--format", choices=("text", "tsv"), default="text")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pack", help="pack a plain instance")
    p.add_argument("instance")
    p.add_argument("--algorithm", choices=("ff", "ffd", "exact"), default="ffd")
    p.add_argument("--item-limit", type=int, default=24)
    p.set_defaults(fn=cmd_pack)

    p = sub.add_parser("price", help="price of clustering of a clustered instance")
    p.add_argument("instance")
    p.add_argument("--mode", choices=("exact", "ffd-upper"), default="exact")
    p.add_argument("--certificate")
    p.add_argument("--item-limit", type=int, default=24)
    p.set_defaults(fn=cmd_price)

    p = sub.add_parser("gen-lb", help="generate and verify a lower-bound construction")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int, default=1)
    p.add_argument("--families", default="2,3")
    p.add_argument("--leftover", choices=("merge", "spread"), default="merge")
    p.add_argument("--emit", metavar="PREFIX", help="write PREFIX.inst and PREFIX.cert")
    p.add_argument("--no-solve", action="store_true", help="skip the per-cluster exact solves")
    p.set_defaults(fn=cmd_gen_lb)

    p = sub.add_parser("lb-formula", help="asymptotic lower bound for k >= 4")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(fn=cmd_lb_formula)

    p = sub.add_parser("k3-limit", help="limit of the k = 3 lower bound")
    p.set_defaults(fn=cmd_k3_limit)

    p = sub.add_parser("verify-weights", help="weight caps, W >= A and FFD <= V + 1 batteries")
    p.add_argument("--function", choices=("all", "w195", "wk3", "wk4", "v"), default="all")
    p.add_argument("--suite", choices=("all", "caps", "clusters", "ffd"), default="all")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--exhaustive-grid", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=cmd_verify_weights)

    p = sub.add_parser("pi", help="partial sums of the 1/c_i series")
    p.add_argument("--terms", type=int, default=30)
    p.set_defaults(fn=cmd_pi)

    p = sub.add_parser("rho", help="rho and the competitive ratio bound")
    p.add_argument("--terms", type=int, default=30)
    p.set_defaults(fn=cmd_rho)

    for name, fn, help_ in (("simulate", cmd_simulate, "run the phase algorithm"),
                            ("oracle", cmd_oracle, "offline optimum by partition enumeration"),
                            ("check-bound", cmd_check_bound, "simulate, solve offline and check the bound")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("instance")
        if name != "oracle":
            p.add_argument("--rho", type=_rational_arg)
            p.add_argument("--horizon", type=_rational_arg)
        if name != "simulate":
            p.add_argument("--limit", type=int, default=12)
        if name == "check-bound":
            p.add_argument("--pi-terms", type=int, default=30)
        p.set_defaults(fn=fn)

    p = sub.add_parser("suite", help="run the acceptance battery")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--scale", type=float, default=1.0, help="fraction of the randomized trial counts")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=cmd_suite)
    return ap


def run_command(argv: list[str], out=None) -> int:
    out = sys.stdout if out is None else out
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    rep = Report(argv, a.format)
    t0 = time.perf_counter()
    try:
        a.fn(a, rep)
    except (UsageError, FormatError, ConstructionError, RationalParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverLimitError, OracleLimitError, SimulationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    rep.add("wall time", f"{time.perf_counter() - t0:.3f}s")
    out.write(rep.render())
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
