"""Command-line front door.

Exit codes: 0 success, 1 verification failure, 2 bad input or configuration.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import verification
from .stochastic import (
    DEFAULT_SEED,
    FAMILIES,
    STATISTICS,
    DistributionSpec,
    equality_check,
    gof_exponentiality,
    power_study,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# flag -> parameter name, per family
PARAM_FLAGS = {
    "exponential": {"rate": "rate"},
    "weibull": {"shape": "shape", "scale": "scale"},
    "gamma": {"shape": "shape", "rate": "rate"},
    "lognormal": {"mu": "mu", "sigma": "sigma"},
    "uniform": {"upper": "upper"},
    "half-normal": {"sigma": "sd", "scale": "sd"},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_output(p):
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def _add_family(p, repeat=False):
    p.add_argument(
        "--family",
        action="append" if repeat else "store",
        default=None if repeat else "exponential",
        help="family name; for power, repeatable and may carry inline params as name:key=value,...",
    )
    for flag in ("rate", "shape", "scale", "sigma", "upper", "mu"):
        p.add_argument(f"--{flag}", type=float, default=None)


def _add_gof(p):
    p.add_argument("-n", "--n", type=int, default=3, help="subset size")
    p.add_argument("-B", "--B", type=int, default=2000, help="resampled subsets per cloud")
    p.add_argument("--statistic", choices=STATISTICS, default="ks")
    p.add_argument("--M-null", dest="M_null", type=int, default=500)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="expochar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify-identities", help="exact checks of the H identities")
    p.add_argument("--n", type=int, default=6, help="largest n of the nested-sum grid")
    p.add_argument("--s", type=int, default=8, help="largest s of the recurrence grid")
    p.add_argument("--r-max", type=int, default=12)
    p.add_argument("--t-max", type=int, default=4)
    _add_output(p)

    p = sub.add_parser("verify-analytic", help="jet oracles and the induction solver")
    p.add_argument("--n", type=int, default=6, help="largest n of the kernel grid (other grids cap at 5)")
    p.add_argument("--order", type=int, default=12, help="jet truncation order")
    p.add_argument("--t-max", type=int, default=8, help="induction steps; solves up to f^(t_max+1)(0)")
    p.add_argument("--perturb", type=int, default=None, help=argparse.SUPPRESS)
    _add_output(p)

    p = sub.add_parser("simulate", help="Monte Carlo check of the maxima identity")
    p.add_argument("-n", "--n", type=int, default=3)
    p.add_argument("-s", "--s", type=int, default=1)
    p.add_argument("-N", "--N", type=int, default=20000, help="replicates per side")
    _add_family(p)
    _add_output(p)

    p = sub.add_parser("gof", help="goodness-of-fit test for exponentiality on a CSV column")
    p.add_argument("--input", type=Path, required=True)
    _add_gof(p)
    _add_output(p)

    p = sub.add_parser("power", help="rejection rates of the GoF test")
    p.add_argument("--m", type=int, default=200, help="sample size")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--alpha", type=float, default=0.05)
    _add_gof(p)
    _add_family(p, repeat=True)
    _add_output(p)
    return parser


def _spec_from_flags(family: str, args, inline: dict | None = None) -> DistributionSpec:
    if family not in FAMILIES:
        raise UsageError(f"unknown family {family!r}; choose from {', '.join(sorted(FAMILIES))}")
    mapping = PARAM_FLAGS[family]
    params = {}
    for flag in ("rate", "shape", "scale", "sigma", "upper", "mu"):
        value = getattr(args, flag)
        if value is None:
            continue
        if flag not in mapping:
            if inline is None:
                raise UsageError(f"--{flag} does not apply to family {family}")
            continue
        params[mapping[flag]] = value
    params.update(inline or {})
    try:
        return DistributionSpec(family, params)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _parse_family(text: str, args) -> DistributionSpec:
    name, _, rest = text.partition(":")
    inline = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise UsageError(f"bad inline parameter {item!r} in --family {text!r}")
        try:
            inline[key.strip()] = float(value)
        except ValueError as exc:
            raise UsageError(f"bad value in {item!r}") from exc
    return _spec_from_flags(name.strip(), args, inline)


def read_column(path: Path) -> list[float]:
    """Single numeric column; optional header; ``#`` comments and blank lines skipped."""
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    values = []
    seen_data = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "," in line:
            raise UsageError(f"{path}:{lineno}: expected a single column, got {line!r}")
        try:
            v = float(line)
        except ValueError:
            if not seen_data and not values:
                seen_data = True  # header
                continue
            raise UsageError(f"{path}:{lineno}: not a number: {line!r}") from None
        seen_data = True
        if not math.isfinite(v):
            raise UsageError(f"{path}:{lineno}: non-finite value {line!r}")
        if v < 0:
            raise UsageError(f"{path}:{lineno}: negative value {line!r}")
        values.append(v)
    return values


def _render_suites(command: str, reports, fmt: str) -> str:
    passed = verification.all_passed(reports)
    if fmt == "json":
        doc = {"command": command, "passed": passed, "suites": [r.to_dict() for r in reports]}
        return json.dumps(doc, indent=2) + "\n"
    w = max(len(r.suite) for r in reports)
    tw = max(len(r.tag) for r in reports)
    lines = [f"{'suite':<{w}}  {'checks':<{tw}}  {'passed':>7}  {'run':>5}  status"]
    for r in reports:
        status = "ok" if r.ok else "FAIL"
        lines.append(f"{r.suite:<{w}}  {r.tag:<{tw}}  {r.cases_passed:>7}  {r.cases_run:>5}  {status}")
        if r.first_failure:
            f = r.first_failure
            lines.append(f"  first failure {f['case']}: expected {f['expected']}, got {f['got']}")
    lines.append("all identities hold" if passed else "verification FAILED")
    return "\n".join(lines) + "\n"


def _render_record(title: str, record: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(record, indent=2) + "\n"
    w = max(len(k) for k in record)
    body = "\n".join(f"{k:<{w}}  {v}" for k, v in record.items())
    return f"{title}\n{body}\n"


def _render_power(rows, config: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({**config, "rows": [r.to_dict() for r in rows]}, indent=2) + "\n"
    labels = [r.spec.label() for r in rows]
    w = max(len(s) for s in labels + ["distribution"])
    lines = [f"{'distribution':<{w}}  rejections  trials  rate"]
    for label, r in zip(labels, rows):
        lines.append(f"{label:<{w}}  {r.rejections:>10}  {r.trials:>6}  {r.rejection_rate:.3f}")
    return "\n".join(lines) + "\n"


def run(args) -> tuple[int, str]:
    cmd = args.command
    try:
        if cmd == "verify-identities":
            reports = verification.identity_suites(args.n, args.s, args.r_max, args.t_max)
            return (EXIT_OK if verification.all_passed(reports) else EXIT_FAIL), _render_suites(cmd, reports, args.format)
        if cmd == "verify-analytic":
            reports = verification.analytic_suites(args.n, args.order, args.t_max, args.perturb)
            return (EXIT_OK if verification.all_passed(reports) else EXIT_FAIL), _render_suites(cmd, reports, args.format)
        if cmd == "simulate":
            spec = _spec_from_flags(args.family, args)
            report = equality_check(args.n, args.s, spec, args.N, args.seed)
            return EXIT_OK, _render_record("maxima identity simulation", report.to_dict(), args.format)
        if cmd == "gof":
            values = read_column(args.input)
            report = gof_exponentiality(values, args.n, args.B, args.statistic, args.M_null, args.seed)
            return EXIT_OK, _render_record("exponentiality test", report.to_dict(), args.format)
        if cmd == "power":
            families = args.family or ["exponential", "uniform", "weibull:shape=2"]
            specs = [_parse_family(text, args) for text in families]
            rows = power_study(specs, args.m, args.n, args.B, args.M_null, args.trials, args.alpha, args.seed,
                               args.statistic)
            config = {"m": args.m, "n": args.n, "B": args.B, "M_null": args.M_null, "trials": args.trials,
                      "alpha": args.alpha, "statistic_kind": args.statistic, "seed": args.seed}
            return EXIT_OK, _render_power(rows, config, args.format)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown command {cmd!r}")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        code, text = run(args)
    except UsageError as exc:
        print(f"expochar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # keep the exit-code contract
        print(f"expochar: internal error: {exc!r}", file=sys.stderr)
        return EXIT_FAIL
    if args.out is not None:
        try:
            args.out.write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"expochar: error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
