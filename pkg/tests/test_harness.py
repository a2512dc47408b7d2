import csv
import io
import math

import pytest

from zibayes.bayes_factor import BfComparison
from zibayes.errors import DomainError, InvalidInputError
from zibayes.harness import (
    ALPHA_GRID,
    ExperimentConfig,
    load_config,
    results_to_csv,
    run_scenario,
    run_table,
    table_configs,
    thread_count,
)
from zibayes.modes import Mode
from zibayes.stats import Family

C = BfComparison


class TestConfig:
    def test_generating_model_must_belong_to_comparison(self):
        with pytest.raises(DomainError):
            ExperimentConfig(C.NB_VS_POISSON, Family.ZIP, lam=1.0, alpha=0.5)

    def test_missing_parameters(self):
        with pytest.raises(DomainError):
            ExperimentConfig(C.NB_VS_POISSON, Family.NB, gamma=1.0)

    def test_thresholds(self):
        with pytest.raises(DomainError):
            ExperimentConfig(C.NB_VS_POISSON, Family.POISSON, lam=1.0, thresholds=(10, 3.2))

    def test_load_config(self, tmp_path):
        text = (
            "comparison = zip-vs-poisson\nmodel = zip\nlambda = 5   # rate\nalpha = 0.5\n"
            "reps = 12\nn = 50\nseed = 3\ngamma_bayes = 1.001\nmode = paper-literal\nthresholds = 3.2, 10\n"
        )
        path = tmp_path / "exp.cfg"
        path.write_text(text)
        cfg = load_config(str(path))
        assert cfg == ExperimentConfig(C.ZIP_VS_POISSON, Family.ZIP, lam=5.0, alpha=0.5, reps=12, n=50,
                                       seed=3, mode=Mode.PAPER_LITERAL)
        assert load_config(io.StringIO(text)) == cfg

    def test_load_config_rejects_unknown_key(self):
        with pytest.raises(InvalidInputError):
            load_config("comparison = nb-vs-poisson\nmodel = nb\nshape = 2\n")

    def test_thread_count(self, monkeypatch):
        monkeypatch.setenv("ZIBAYES_THREADS", "3")
        assert thread_count() == 3
        monkeypatch.setenv("ZIBAYES_THREADS", "zero")
        with pytest.raises(InvalidInputError):
            thread_count()
        monkeypatch.delenv("ZIBAYES_THREADS")
        assert thread_count() >= 1


class TestTables:
    @pytest.mark.parametrize("table,rows", [(2, 24), (3, 32), (4, 24), (5, 8)])
    def test_row_counts(self, table, rows):
        cfgs = table_configs(table, 0.1, 0)
        assert len(cfgs) == rows
        assert all(c.reps == 100 for c in cfgs)

    def test_published_order(self):
        t2 = table_configs(2)
        assert [(c.lam, c.gamma, c.kappa, c.model) for c in t2[:3]] == [
            (0.5, 1.5, 0.5, Family.NB), (0.5, 1.5, 0.5, Family.POISSON), (0.5, 0.5, 0.5, Family.NB)]
        t3 = table_configs(3)
        assert [c.alpha for c in t3[:8:2]] == list(ALPHA_GRID)
        assert [c.lam for c in t3[::8]] == [0.5, 1.0, 3.0, 5.0]

    def test_row_seeds_distinct_and_seeded(self):
        a, b = table_configs(3, 0.1, 42), table_configs(3, 0.1, 43)
        assert len({c.seed for c in a}) == len(a)
        assert [c.seed for c in a] != [c.seed for c in b]

    def test_scale_validation(self):
        with pytest.raises(DomainError):
            table_configs(3, 0.001)
        with pytest.raises(DomainError):
            table_configs(3, 1.5)
        with pytest.raises(DomainError):
            table_configs(6)


class TestRunScenario:
    def test_pure_function_of_config(self):
        cfg = ExperimentConfig(C.ZINB_VS_ZIP, Family.ZINB, gamma=0.5, kappa=2.0, alpha=0.5, reps=1, seed=9)
        assert run_scenario(cfg, threads=1) == run_scenario(cfg, threads=1)

    def test_threads_do_not_change_counts(self):
        cfg = ExperimentConfig(C.NB_VS_POISSON, Family.NB, gamma=1.5, kappa=0.5, reps=30, seed=4)
        assert run_scenario(cfg, threads=1) == run_scenario(cfg, threads=4)

    def test_zip_high_rate(self):
        cfg = ExperimentConfig(C.ZIP_VS_POISSON, Family.ZIP, lam=5.0, alpha=0.5, reps=100)
        r = run_scenario(cfg)
        assert r.bf3 >= 98
        assert r.expected_zero_pct == pytest.approx(100 * (0.5 + 0.5 * math.exp(-5)))

    def test_nb_strong_dispersion(self):
        cfg = ExperimentConfig(C.NB_VS_POISSON, Family.NB, gamma=0.5, kappa=1.5, reps=100)
        r = run_scenario(cfg)
        assert r.bf3 >= 98
        assert r.vuong < r.bf3
        assert r.fit_failures == 0


class TestCsv:
    def test_columns_and_determinism(self):
        res = run_table(5, 0.01, seed=1)
        text = results_to_csv(res, 5)
        rows = list(csv.DictReader(io.StringIO(text)))
        assert len(rows) == 8
        assert "inflation" not in rows[0]
        assert rows[0]["model"] == "ZINB" and rows[1]["model"] == "ZIP"
        assert text == results_to_csv(run_table(5, 0.01, seed=1), 5)

    def test_inflation_column_for_tables_3_and_4(self):
        res = run_table(3, 0.01, seed=0)[:2]
        header = results_to_csv(res, 3).splitlines()[0].split(",")
        assert header == ["lambda", "gamma", "kappa", "alpha", "zero_pct", "model", "bf3", "bf10",
                          "vuong", "inflation", "aic", "fit_failures", "reps", "n"]
