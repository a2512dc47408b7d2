"""``zibayes`` command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical or oracle
failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

from . import __version__
from .baselines import aic_select, fit, vuong_test, zero_inflation_check
from .bayes_factor import BfComparison, log_bayes_factor
from .errors import (
    DataError,
    DegenerateVarianceError,
    DomainError,
    FitError,
    InvalidInputError,
    NoSelectionError,
    OracleError,
    ZibayesError,
)
from .harness import ExperimentConfig, TABLE_IDS, load_config, results_to_csv, run_scenario, run_table
from .modes import DEFAULT_GAMMA, Mode
from .stats import CountSample, Family, compute_suff_stats

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3
SCHEMA_VERSION = "1"

__all__ = ["AnalysisReport", "read_counts", "analyze", "main", "build_parser"]


def read_counts(path, column: str = "count") -> CountSample:
    """Read one integer column from a CSV file with a header line.

    Raises
    ------
    DataError
        With the offending line number for malformed values.
    """
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("file is empty", line=1) from None
        header = [h.strip() for h in header]
        if column not in header:
            raise DataError(f"no column named {column!r} (found {', '.join(header)})", line=1)
        idx = header.index(column)
        values = []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if idx >= len(row):
                raise DataError(f"missing {column!r} value", line=line)
            raw = row[idx].strip()
            try:
                v = float(raw)
            except ValueError:
                raise DataError(f"not a number: {raw!r}", line=line) from None
            if not math.isfinite(v) or v != int(v):
                raise DataError(f"count must be an integer, got {raw!r}", line=line)
            if v < 0:
                raise DataError(f"count must be non-negative, got {raw!r}", line=line)
            values.append(int(v))
    if not values:
        raise DataError("no data rows")
    return CountSample.of(values)


def _enc(x):
    if isinstance(x, float):
        if math.isnan(x):
            raise InvalidInputError("NaN cannot be serialized")
        if math.isinf(x):
            return "+inf" if x > 0 else "-inf"
    if isinstance(x, dict):
        return {k: _enc(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_enc(v) for v in x]
    return x


def _dec(x):
    if x == "+inf":
        return math.inf
    if x == "-inf":
        return -math.inf
    if isinstance(x, dict):
        return {k: _dec(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_dec(v) for v in x]
    return x


@dataclass
class AnalysisReport:
    """Everything ``zibayes fit`` reports for one count column.

    All fields are plain JSON-compatible values so that the report
    round-trips through ``to_json``/``from_json`` unchanged.
    """

    data: dict
    gamma: float
    mode: str
    fits: dict
    aic: dict
    aic_choice: Optional[str]
    bayes_factors: dict
    zero_inflation: dict
    vuong: dict
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return _enc(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False)

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        d = _dec(dict(d))
        if d.get("schema_version") != SCHEMA_VERSION:
            raise DataError(f"unsupported schema_version {d.get('schema_version')!r}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls.from_dict(json.loads(text))


def _params_dict(p):
    return {k: float(v) for k, v in asdict(p).items()}


def analyze(sample: CountSample, gamma: float = DEFAULT_GAMMA, mode=Mode.ORACLE_VALIDATED) -> AnalysisReport:
    """Fit all four models and compute all four Bayes factors."""
    mode = Mode.coerce(mode)
    st = compute_suff_stats(sample)
    data = {
        "n": st.n,
        "zero_count": st.zero_count,
        "total": st.total,
        "zero_pct": 100.0 * st.zero_count / st.n,
    }
    fits, fit_objs = {}, {}
    for fam in Family:
        try:
            f = fit(fam, sample)
        except FitError as exc:
            fits[fam.value] = {"converged": False, "message": f"maximization does not converge: {exc}"}
            continue
        fit_objs[fam] = f
        entry = {
            "params": _params_dict(f.params),
            "loglik": f.loglik,
            "k": f.k,
            "aic": f.aic,
            "converged": f.converged,
            "iterations": f.iterations,
            "boundary": f.boundary,
            "message": f.message if f.converged else f"maximization does not converge: {f.message}",
        }
        fits[fam.value] = entry
    aic = {fam.value: f.aic for fam, f in fit_objs.items() if f.converged}
    try:
        choice = aic_select(fit_objs.values()).value
    except NoSelectionError:
        choice = None
    bfs, vuong = {}, {}
    for comp in BfComparison:
        r = log_bayes_factor(sample, comp, gamma, mode)
        bfs[comp.value] = {
            "log_bf": r.log_bf,
            "interpretation": r.interpretation.value,
            "degenerate_all_zero": r.degenerate_all_zero,
            "printed_log_bf": r.printed_log_bf,
        }
        f1, f0 = (fit_objs.get(m) for m in comp.models)
        if f1 is None or f0 is None or not (f1.converged and f0.converged):
            vuong[comp.value] = {"error": "fit unavailable"}
            continue
        try:
            v = vuong_test(f1, f0, sample)
            vuong[comp.value] = {"z": v.z, "preferred": v.preferred.value}
        except DegenerateVarianceError as exc:
            vuong[comp.value] = {"error": str(exc)}
    zi = zero_inflation_check(sample)
    return AnalysisReport(
        data=data,
        gamma=float(gamma),
        mode=mode.value,
        fits=fits,
        aic=aic,
        aic_choice=choice,
        bayes_factors=bfs,
        zero_inflation={"ratio": zi.ratio, "inflated": zi.inflated},
        vuong=vuong,
    )


def _format_report(rep: AnalysisReport) -> str:
    d = rep.data
    lines = [
        f"n={d['n']} zeros={d['zero_count']} ({d['zero_pct']:.1f}%) total={d['total']}",
        f"gamma={rep.gamma:g} mode={rep.mode}",
        "",
        "log Bayes factors:",
    ]
    for comp, b in rep.bayes_factors.items():
        flag = " [all-zero]" if b["degenerate_all_zero"] else ""
        lines.append(f"  {comp:15s} {b['log_bf']!r:>24}  {b['interpretation']}{flag}")
    lines += ["", "fits:"]
    for fam, f in rep.fits.items():
        if "aic" in f:
            lines.append(f"  {fam:8s} loglik={f['loglik']:.6f} aic={f['aic']:.6f} {f['message']}".rstrip())
        else:
            lines.append(f"  {fam:8s} {f['message']}")
    lines.append(f"AIC choice: {rep.aic_choice}")
    z = rep.zero_inflation
    lines.append(f"zero ratio {z['ratio']:.4f} ({'inflated' if z['inflated'] else 'not inflated'})")
    return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zibayes", description="Objective Bayes factors for count models.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("fit", help="analyze one count column")
    f.add_argument("--data", required=True)
    f.add_argument("--column", default="count")
    f.add_argument("--gamma", type=_positive_float, default=DEFAULT_GAMMA)
    f.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.ORACLE_VALIDATED.value)
    f.add_argument("--out", help="write the JSON report here")
    f.add_argument("--format", choices=["text", "json"], default="text")

    s = sub.add_parser("simulate", help="run one simulation scenario")
    s.add_argument("--config", help="flat key=value experiment file")
    s.add_argument("--comparison", choices=[c.value for c in BfComparison])
    s.add_argument("--model", choices=[m.value for m in Family])
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--gamma", type=float)
    s.add_argument("--kappa", type=float)
    s.add_argument("--alpha", type=float)
    s.add_argument("--reps", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--gamma-bayes", type=float)
    s.add_argument("--mode", choices=[m.value for m in Mode])
    s.add_argument("--out", help="CSV output path (stdout if omitted)")

    t = sub.add_parser("table", help="reproduce a comparison table at desk scale")
    t.add_argument("--id", type=int, required=True, choices=TABLE_IDS)
    t.add_argument("--scale", type=float, default=0.1)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--n", type=int, default=100)
    t.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.ORACLE_VALIDATED.value)
    t.add_argument("--out", help="output directory (stdout if omitted)")

    o = sub.add_parser("oracle-check", help="compare closed forms with numerical oracles")
    o.add_argument("--families", nargs="+", choices=[m.value for m in Family], default=[m.value for m in Family])
    o.add_argument("--gammas", nargs="+", type=_positive_float, default=[0.5, DEFAULT_GAMMA, 2.0])
    o.add_argument("--samples", type=int, default=50)
    o.add_argument("--seed", type=int, default=0)
    return p


def _cmd_fit(args, out):
    sample = read_counts(args.data, args.column)
    rep = analyze(sample, args.gamma, args.mode)
    if args.out:
        Path(args.out).write_text(rep.to_json() + "\n", encoding="utf-8")
    out.write((rep.to_json() if args.format == "json" else _format_report(rep)) + "\n")
    return EXIT_OK


def _cmd_simulate(args, out):
    if args.config:
        cfg = load_config(args.config)
        base = {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}
    else:
        base = {}
    for key in ("comparison", "model", "lam", "gamma", "kappa", "alpha", "reps", "n", "seed", "mode"):
        v = getattr(args, key)
        if v is not None:
            base[key] = v
    if args.gamma_bayes is not None:
        base["gamma_bayes"] = args.gamma_bayes
    if "comparison" not in base or "model" not in base:
        raise _UsageError("simulate needs --comparison and --model (or --config)")
    cfg = ExperimentConfig(**base)
    text = results_to_csv([run_scenario(cfg)])
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def _cmd_table(args, out):
    results = run_table(args.id, args.scale, args.seed, n=args.n, mode=args.mode)
    text = results_to_csv(results, args.id)
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        (d / f"table{args.id}.csv").write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def _cmd_oracle_check(args, out):
    from .oracles import adjudicate, load_recorded_verdict, oracle_sweep, random_small_samples

    if args.samples < 1:
        raise _UsageError("--samples must be positive")
    samples = random_small_samples(args.samples, args.seed, min(10, args.samples))
    fams = [Family(f) for f in args.families]
    dev = oracle_sweep(samples, fams, tuple(args.gammas), modes=tuple(Mode))
    ok = True
    for fam in fams:
        limit = 1e-5 if fam in (Family.POISSON, Family.ZIP) else 1e-4
        d = dev[fam][Mode.ORACLE_VALIDATED]
        passed = d <= limit
        ok &= passed
        out.write(f"{fam.value:8s} max rel dev {d:.3e} (limit {limit:g}) {'PASS' if passed else 'FAIL'}\n")
        if Mode.PAPER_LITERAL in dev[fam]:
            lit = dev[fam][Mode.PAPER_LITERAL]
            matched = [m.value for m, v in dev[fam].items() if v <= limit]
            out.write(
                f"{fam.value:8s} verdict: matching variant {', '.join(matched) or 'none'}; "
                f"paper-literal max rel dev {lit:.3e}\n"
            )
    verdict = adjudicate()
    same = verdict == load_recorded_verdict()
    ok &= same
    for key, val in verdict["summary"].items():
        out.write(f"adjudication {key}: {val}\n")
    out.write(f"adjudication matches recorded verdict: {'PASS' if same else 'FAIL'}\n")
    return EXIT_OK if ok else EXIT_NUMERICAL


class _UsageError(Exception):
    pass


_COMMANDS = {
    "fit": _cmd_fit,
    "simulate": _cmd_simulate,
    "table": _cmd_table,
    "oracle-check": _cmd_oracle_check,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args, out)
    except _UsageError as exc:
        print(f"zibayes: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"zibayes: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (OracleError, ArithmeticError) as exc:
        print(f"zibayes: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DomainError, InvalidInputError) as exc:
        # invalid flag values, e.g. a scale that yields fewer than 10 replicates
        print(f"zibayes: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ZibayesError as exc:
        print(f"zibayes: error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
