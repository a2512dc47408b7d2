"""Simulation scenarios for the model-selection comparison tables.

A scenario draws ``reps`` samples from one generating model and counts how
often each method picks that model. Replicate ``r`` always uses
``RngStream(seed, r)``, so counts do not depend on thread scheduling.
"""
from __future__ import annotations

import configparser
import csv
import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .baselines import Preference, aic_select, fit, vuong_test, zero_inflation_check
from .bayes_factor import BfComparison, log_bayes_factor
from .errors import DegenerateVarianceError, DomainError, FitError, InvalidInputError, NoSelectionError
from .modes import DEFAULT_GAMMA, Mode
from .samplers import RngStream, sample, zero_fraction_expected
from .stats import Family, ModelParams, NBParams, PoissonParams, ZINBParams, ZIPParams

__all__ = [
    "ExperimentConfig",
    "ScenarioResult",
    "run_scenario",
    "run_table",
    "table_configs",
    "write_csv",
    "results_to_csv",
    "load_config",
    "thread_count",
    "ALPHA_GRID",
    "TABLE_IDS",
]

ALPHA_GRID = (0.95, 0.75, 0.50, 0.25)
TABLE_IDS = (2, 3, 4, 5)
_LAMBDAS = (0.5, 1.0, 3.0, 5.0)


def thread_count() -> int:
    """Worker threads from ``ZIBAYES_THREADS``, else the CPU count."""
    raw = os.environ.get("ZIBAYES_THREADS")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise InvalidInputError(f"ZIBAYES_THREADS must be an integer, got {raw!r}") from None
        if value < 1:
            raise InvalidInputError("ZIBAYES_THREADS must be at least 1")
        return value
    return os.cpu_count() or 1


@dataclass(frozen=True)
class ExperimentConfig:
    comparison: BfComparison
    model: Family
    lam: Optional[float] = None
    gamma: Optional[float] = None
    kappa: Optional[float] = None
    alpha: Optional[float] = None
    reps: int = 100
    n: int = 100
    seed: int = 0
    gamma_bayes: float = DEFAULT_GAMMA
    mode: Mode = Mode.ORACLE_VALIDATED
    thresholds: tuple = (3.2, 10.0)
    inflation_tol: float = 0.05
    vuong_critical: float = 1.96

    def __post_init__(self):
        object.__setattr__(self, "comparison", BfComparison(self.comparison))
        object.__setattr__(self, "model", Family(self.model))
        object.__setattr__(self, "mode", Mode.coerce(self.mode))
        object.__setattr__(self, "thresholds", tuple(float(t) for t in self.thresholds))
        if self.model not in self.comparison.models:
            raise DomainError(
                f"generating model {self.model.value} is not part of {self.comparison.value}"
            )
        if self.reps < 1 or self.n < 1:
            raise DomainError("reps and n must be positive")
        t3, t10 = self.thresholds if len(self.thresholds) == 2 else (None, None)
        if t3 is None or not (0 < t3 < t10):
            raise DomainError("thresholds must be two positive, increasing values")
        if not self.gamma_bayes > 0:
            raise DomainError("gamma_bayes must be positive")
        self.params()  # validates the generating parameters

    def params(self) -> ModelParams:
        """Generating-model parameters (``lam`` is the Poisson/ZIP rate)."""
        m = self.model
        try:
            if m is Family.POISSON:
                return PoissonParams(self.lam)
            if m is Family.NB:
                return NBParams(self.gamma, self.kappa)
            if m is Family.ZIP:
                return ZIPParams(self.alpha, self.lam)
            return ZINBParams(self.alpha, self.gamma, self.kappa)
        except TypeError:
            raise DomainError(f"missing parameters for generating model {m.value}") from None

    @property
    def generates_m1(self) -> bool:
        return self.model is self.comparison.models[0]


@dataclass(frozen=True)
class ScenarioResult:
    config: ExperimentConfig
    bf3: int
    bf10: int
    vuong: int
    inflation: int
    aic: int
    fit_failures: int
    observed_zero_pct: float
    expected_zero_pct: float
    runtime: float = field(default=0.0, compare=False)

    def __post_init__(self):
        reps = self.config.reps
        for name in ("bf3", "bf10", "vuong", "inflation", "aic", "fit_failures"):
            v = getattr(self, name)
            if not 0 <= v <= reps:
                raise ValueError(f"{name}={v} outside [0, {reps}]")


def _replicate(cfg: ExperimentConfig, r: int):
    s = sample(cfg.params(), cfg.n, RngStream(cfg.seed, r))
    lb = log_bayes_factor(s, cfg.comparison, cfg.gamma_bayes, cfg.mode).log_bf
    l3, l10 = (math.log(t) for t in cfg.thresholds)
    if cfg.generates_m1:
        bf3, bf10 = lb > l3, lb > l10
    else:
        bf3, bf10 = lb < -l3, lb < -l10
    fam1, fam0 = cfg.comparison.models
    vuong = aic = failed = False
    try:
        f1, f0 = fit(fam1, s), fit(fam0, s)
    except FitError:
        failed = True
    else:
        failed = not (f1.converged and f0.converged)
        target = Preference.MODEL1 if cfg.generates_m1 else Preference.MODEL0
        try:
            vuong = vuong_test(f1, f0, s, cfg.vuong_critical).preferred is target
        except DegenerateVarianceError:
            vuong = False
        try:
            aic = aic_select([f1, f0]) is cfg.model
        except NoSelectionError:
            aic = False
    inflated = zero_inflation_check(s, cfg.inflation_tol).inflated
    return bf3, bf10, vuong, inflated, aic, failed, s.zero_count / s.n


def run_scenario(cfg: ExperimentConfig, threads: Optional[int] = None) -> ScenarioResult:
    """Run every replicate of one scenario and aggregate the counts."""
    start = time.perf_counter()
    threads = threads or thread_count()
    reps = range(cfg.reps)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda r: _replicate(cfg, r), reps))
    else:
        rows = [_replicate(cfg, r) for r in reps]
    arr = np.array(rows, dtype=float)
    counts = arr[:, :6].sum(axis=0).astype(int)
    return ScenarioResult(
        config=cfg,
        bf3=int(counts[0]),
        bf10=int(counts[1]),
        vuong=int(counts[2]),
        inflation=int(counts[3]),
        aic=int(counts[4]),
        fit_failures=int(counts[5]),
        observed_zero_pct=100.0 * math.fsum(arr[:, 6]) / cfg.reps,
        expected_zero_pct=100.0 * zero_fraction_expected(cfg.params()),
        runtime=time.perf_counter() - start,
    )


def _table_rows(table: int):
    """Scenario parameter dicts in the published top-to-bottom order."""
    rows = []
    if table == 2:
        for lam in _LAMBDAS:
            for g, k in ((1.5, 0.5), (0.5, 0.5), (0.5, 1.5)):
                common = dict(comparison=BfComparison.NB_VS_POISSON, lam=lam, gamma=g, kappa=k)
                rows.append(dict(common, model=Family.NB))
                rows.append(dict(common, model=Family.POISSON))
    elif table == 3:
        for lam in _LAMBDAS:
            for a in ALPHA_GRID:
                common = dict(comparison=BfComparison.ZIP_VS_POISSON, lam=lam, alpha=a)
                rows.append(dict(common, model=Family.ZIP))
                rows.append(dict(common, model=Family.POISSON))
    elif table == 4:
        for g, k in ((1.5, 0.5), (0.5, 0.5), (5.0, 5.0)):
            for a in ALPHA_GRID:
                common = dict(comparison=BfComparison.ZINB_VS_NB, gamma=g, kappa=k, alpha=a)
                rows.append(dict(common, model=Family.ZINB))
                rows.append(dict(common, model=Family.NB))
    elif table == 5:
        # inflation 0.5 reproduces the published zero percentages
        for lam in (1.0, 3.0):
            for g, k in ((0.5, 0.5), (5.0, 5.0)):
                common = dict(comparison=BfComparison.ZINB_VS_ZIP, lam=lam, gamma=g, kappa=k, alpha=0.5)
                rows.append(dict(common, model=Family.ZINB))
                rows.append(dict(common, model=Family.ZIP))
    else:
        raise DomainError(f"table must be one of {TABLE_IDS}, got {table!r}")
    return rows


def _reps_for_scale(scale: float) -> int:
    scale = float(scale)
    if not 0 < scale <= 1:
        raise DomainError("scale must lie in (0, 1]")
    reps = round(scale * 1000)
    if reps < 10:
        raise DomainError(f"scale {scale} gives {reps} replicates; at least 10 are required")
    return reps


def table_configs(table: int, scale: float = 0.1, seed: int = 0, **overrides) -> list[ExperimentConfig]:
    """One config per table row; row seeds derive from ``(seed, row)``."""
    reps = _reps_for_scale(scale)
    out = []
    for i, row in enumerate(_table_rows(int(table))):
        row_seed = int(np.random.SeedSequence([int(seed), i]).generate_state(1, np.uint64)[0] >> 1)
        out.append(ExperimentConfig(reps=reps, seed=row_seed, **row, **overrides))
    return out


def run_table(
    table: int,
    scale: float = 0.1,
    seed: int = 0,
    threads: Optional[int] = None,
    **overrides,
) -> list[ScenarioResult]:
    """Run all scenarios of a comparison table at ``reps = round(scale * 1000)``."""
    return [run_scenario(c, threads) for c in table_configs(table, scale, seed, **overrides)]


def _fmt(x):
    return "" if x is None else format(x, "g")


def results_to_csv(results: Sequence[ScenarioResult], table: Optional[int] = None) -> str:
    """CSV text with one row per scenario.

    The inflation column appears for the ZIP/Poisson and ZINB/NB tables, as
    in the published layout.
    """
    with_inflation = table in (3, 4) if table is not None else True
    cols = ["lambda", "gamma", "kappa", "alpha", "zero_pct", "model", "bf3", "bf10", "vuong"]
    if with_inflation:
        cols.append("inflation")
    cols += ["aic", "fit_failures", "reps", "n"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in results:
        c = r.config
        row = [
            _fmt(c.lam), _fmt(c.gamma), _fmt(c.kappa), _fmt(c.alpha),
            f"{r.observed_zero_pct:.1f}", c.model.label, r.bf3, r.bf10, r.vuong,
        ]
        if with_inflation:
            row.append(r.inflation)
        row += [r.aic, r.fit_failures, c.reps, c.n]
        w.writerow(row)
    return buf.getvalue()


def write_csv(results: Sequence[ScenarioResult], path, table: Optional[int] = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(results_to_csv(results, table))


_FLOAT_KEYS = {"lambda": "lam", "gamma": "gamma", "kappa": "kappa", "alpha": "alpha",
               "gamma_bayes": "gamma_bayes"}
_INT_KEYS = {"reps", "n", "seed"}


def load_config(source) -> ExperimentConfig:
    """Parse a flat ``key = value`` file (or text) into an ExperimentConfig.

    Keys: comparison, model, lambda, gamma, kappa, alpha, reps, n, seed,
    gamma_bayes, mode, thresholds (comma separated). ``#`` starts a comment.
    """
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, str) and "\n" not in source and "=" not in source:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = str(source)
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read_string("[experiment]\n" + text)
    except configparser.Error as exc:
        raise InvalidInputError(f"bad config: {exc}") from None
    kw = {}
    for key, raw in cp["experiment"].items():
        try:
            if key in _FLOAT_KEYS:
                kw[_FLOAT_KEYS[key]] = float(raw)
            elif key in _INT_KEYS:
                kw[key] = int(raw)
            elif key == "thresholds":
                kw[key] = tuple(float(v) for v in raw.split(","))
            elif key in ("comparison", "model", "mode"):
                kw[key] = raw.strip().lower()
            else:
                raise InvalidInputError(f"unknown config key {key!r}")
        except ValueError as exc:
            if isinstance(exc, InvalidInputError):
                raise
            raise InvalidInputError(f"bad value for {key}: {raw!r}") from None
    for req in ("comparison", "model"):
        if req not in kw:
            raise InvalidInputError(f"config is missing {req!r}")
    try:
        return ExperimentConfig(**kw)
    except ValueError as exc:
        raise InvalidInputError(str(exc)) from None
