"""Acceptance criteria, one test per criterion.

Each test records a ``criterion N: PASS|FAIL ...`` line that is printed in
the terminal summary. Criteria 3 and 7 are expected to fail; the reasons are
in the decisions ledger and in the docstrings below.
"""
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from zibayes.baselines import fit, vuong_test
from zibayes.bayes_factor import BfComparison as C
from zibayes.bayes_factor import all_zero_limit, log_bayes_factor
from zibayes.cli import AnalysisReport, main
from zibayes.harness import results_to_csv, run_scenario, run_table, table_configs
from zibayes.modes import Mode
from zibayes.oracles import adjudicate, load_recorded_verdict, oracle_sweep, random_small_samples
from zibayes.samplers import RngStream, sample
from zibayes.stats import CountSample, Family, ZINBParams

SEED = 0


def record(num, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    print(ACCEPTANCE_LINES[-1])
    assert ok, detail


def _row(table, **match):
    for cfg in table_configs(table, 0.1, SEED):
        if all(getattr(cfg, k) == v for k, v in match.items()):
            return cfg
    raise LookupError(match)


def test_1_oracle_equivalence():
    samples = random_small_samples(50, seed=SEED)
    assert sum(0 in s.values for s in samples) >= 10 and all(s.n <= 10 and max(s.values) <= 6 for s in samples)
    t0 = time.perf_counter()
    dev = oracle_sweep(samples)
    dt = time.perf_counter() - t0
    tol = {Family.POISSON: 1e-5, Family.ZIP: 1e-5, Family.NB: 1e-4, Family.ZINB: 1e-4}
    worst = {f: dev[f][Mode.ORACLE_VALIDATED] for f in Family}
    ok = all(worst[f] <= tol[f] for f in Family) and dt <= 60
    detail = ", ".join(f"{f.value} {worst[f]:.1e}" for f in Family)
    record(1, ok, f"max rel dev {detail}; {dt:.1f}s")


def test_2_all_zero_limits():
    worst, inf_ok = 0.0, True
    for comp in C:
        for n in (1, 2, 5, 10):
            for g in (0.5, 1.001, 2.0):
                a = all_zero_limit(comp, n, g)
                b = log_bayes_factor(CountSample.of([0] * n), comp, g).log_bf
                if math.isinf(a) or math.isinf(b):
                    inf_ok &= a == b == math.inf and comp is C.ZIP_VS_POISSON
                else:
                    worst = max(worst, abs(a - b) / max(abs(b), 1.0))
    record(2, inf_ok and worst <= 1e-10, f"max deviation {worst:.1e}; ZIP case +inf: {inf_ok}")


def test_3_monotonicity():
    """Expected to fail: BF1 and BF4 are not monotone under arbitrary increments.

    Incrementing y=1 in [1, 5] lowers log BF1 for every gamma; see the ledger.
    """
    rng = np.random.default_rng(SEED)
    bad = {"bf1": 0, "bf4": 0, "bf2_phi": 0, "bf2_zero": 0}
    for _ in range(200):
        y = rng.integers(0, 7, size=int(rng.integers(2, 11)))
        if not (0 < np.count_nonzero(y) < y.size):
            y[0], y[-1] = 0, max(int(y[-1]), 1)
        s = CountSample(y)
        up = y.copy()
        up[rng.integers(0, y.size)] += 1
        s_up = CountSample(up)
        lbf = {c: log_bayes_factor(s, c).log_bf for c in C}
        bad["bf1"] += log_bayes_factor(s_up, C.NB_VS_POISSON).log_bf < lbf[C.NB_VS_POISSON]
        bad["bf4"] += not log_bayes_factor(s_up, C.ZINB_VS_ZIP).log_bf > lbf[C.ZINB_VS_ZIP]
        # BF2 at fixed zero count: increment a positive count
        nz = y.copy()
        nz[rng.choice(np.flatnonzero(y))] += 1
        bad["bf2_phi"] += not log_bayes_factor(CountSample(nz), C.ZIP_VS_POISSON).log_bf > lbf[C.ZIP_VS_POISSON]
        # BF2 at fixed total: one more zero
        z = CountSample(np.append(y, 0))
        bad["bf2_zero"] += not log_bayes_factor(z, C.ZIP_VS_POISSON).log_bf > lbf[C.ZIP_VS_POISSON]
    record(3, sum(bad.values()) == 0, "violations of 200: " + ", ".join(f"{k} {v}" for k, v in bad.items()))


def test_4_adjudication_reproduced():
    fresh, recorded = adjudicate(), load_recorded_verdict()
    record(4, fresh == recorded, "verdict " + ("matches" if fresh == recorded else "differs from") + " data/adjudication.json")


def test_5_table2_desk():
    t0 = time.perf_counter()
    nb = run_scenario(_row(2, model=Family.NB, gamma=0.5, kappa=1.5, lam=5.0))
    po = run_scenario(_row(2, model=Family.POISSON, lam=5.0, gamma=0.5, kappa=1.5))
    dt = time.perf_counter() - t0
    ok = nb.bf3 >= 95 and po.bf3 >= 95 and dt <= 120
    record(5, ok, f"NB(0.5, 1.5) BF3 {nb.bf3}/100, Poisson(5) BF3 {po.bf3}/100; {dt:.1f}s")


def test_6_table3_desk():
    printed = {0.95: 95.0, 0.75: 74.9, 0.50: 50.3, 0.25: 25.5}
    ok, parts = True, []
    for a, pct in printed.items():
        r = run_scenario(_row(3, model=Family.ZIP, lam=5.0, alpha=a))
        p = pct / 100
        se = 100 * math.sqrt(p * (1 - p) / (r.config.reps * r.config.n))
        good = r.bf3 >= 95 and abs(r.observed_zero_pct - pct) <= 3 * se
        ok &= good
        parts.append(f"a={a}: BF3 {r.bf3}, zeros {r.observed_zero_pct:.1f}% vs {pct}")
    record(6, ok, "; ".join(parts))


def test_7_method_ordering():
    """Expected to fail on the ZIP half: AIC picks ZIP slightly more often than BF3.

    Over 2000 replicates BF3 selects ZIP about 95.3% of the time and AIC about 97.0%;
    the published row shows the same inversion.
    """
    nb = run_scenario(_row(2, model=Family.NB, gamma=0.5, kappa=1.5, lam=1.0))
    zp = run_scenario(_row(3, model=Family.ZIP, lam=1.0, alpha=0.75))
    ok = all(r.bf3 >= r.aic and r.bf3 > r.vuong for r in (nb, zp))
    record(7, ok, f"NB: BF3 {nb.bf3} AIC {nb.aic} Vuong {nb.vuong}; ZIP: BF3 {zp.bf3} AIC {zp.aic} Vuong {zp.vuong}")


def test_8_zinb_column(tmp_path):
    # alpha = 0.53 gives ~66% zeros at gamma = 1.5, kappa = 2
    s = sample(ZINBParams(0.53, 1.5, 2.0), 900, RngStream(2024, 0))
    data = tmp_path / "col.csv"
    data.write_text("count\n" + "\n".join(map(str, s.values)) + "\n")
    out = tmp_path / "rep.json"
    code = main(["fit", "--data", str(data), "--out", str(out)], open(tmp_path / "log.txt", "w"))
    rep = AnalysisReport.from_json(out.read_text())
    lbf = rep.bayes_factors["zinb-vs-zip"]["log_bf"]
    zeros = rep.data["zero_pct"]
    ok = code == 0 and lbf > math.log(10) and rep.aic_choice == "zinb" and 60 <= zeros <= 72
    record(8, ok, f"zeros {zeros:.1f}%, log BF(zinb-vs-zip) {lbf:.2f}, AIC choice {rep.aic_choice}")


def test_9_determinism():
    a = results_to_csv(run_table(3, 0.1, 42), 3)
    b = results_to_csv(run_table(3, 0.1, 42), 3)
    record(9, a == b, f"{len(a)} bytes, identical: {a == b}")


def test_10_baseline_sanity():
    rng = np.random.default_rng(SEED)
    worst_drop, worst_anti = 0.0, 0.0
    for i in range(20):
        p = ZINBParams(rng.uniform(0.1, 0.7), rng.uniform(0.5, 5.0), rng.uniform(0.5, 5.0))
        s = sample(p, 200, RngStream(SEED, i))
        f = fit(Family.ZINB, s)
        h = np.asarray(f.history)
        worst_drop = max(worst_drop, float(np.max(h[:-1] - h[1:], initial=0.0)))
        f0 = fit(Family.NB, s) if i % 2 else fit(Family.ZIP, s)
        z1, z0 = vuong_test(f, f0, s).z, vuong_test(f0, f, s).z
        worst_anti = max(worst_anti, abs(z1 + z0))
    ok = worst_drop <= 1e-10 and worst_anti <= 1e-12
    record(10, ok, f"largest EM drop {worst_drop:.1e}, largest |z(f1,f0)+z(f0,f1)| {worst_anti:.1e}")
