import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from zibayes.cli import (
    EXIT_DATA,
    EXIT_OK,
    EXIT_USAGE,
    AnalysisReport,
    analyze,
    main,
    read_counts,
)
from zibayes.errors import DataError
from zibayes.samplers import RngStream, sample
from zibayes.stats import CountSample, ZINBParams


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


def write_counts(path, values, header="count"):
    path.write_text(header + "\n" + "\n".join(str(v) for v in values) + "\n")
    return str(path)


class TestReadCounts:
    def test_column_selection(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("id,count,taxon2\na,3,7\nb,0,1\n")
        assert read_counts(str(p)) == CountSample.of([3, 0])
        assert read_counts(str(p), "taxon2") == CountSample.of([7, 1])

    @pytest.mark.parametrize("body,line", [("1\n-2\n", 3), ("1\n2.5\n", 3), ("x\n", 2)])
    def test_bad_values_report_line(self, tmp_path, body, line):
        p = tmp_path / "d.csv"
        p.write_text("count\n" + body)
        with pytest.raises(DataError) as err:
            read_counts(str(p))
        assert err.value.line == line
        assert f"line {line}" in str(err.value)

    def test_missing(self, tmp_path):
        with pytest.raises(DataError):
            read_counts(str(tmp_path / "nope.csv"))
        p = tmp_path / "d.csv"
        p.write_text("value\n1\n")
        with pytest.raises(DataError):
            read_counts(str(p))


class TestFit:
    def test_single_row(self, tmp_path):
        code, text = run(["fit", "--data", write_counts(tmp_path / "one.csv", [3]), "--format", "json"])
        assert code == EXIT_OK
        rep = AnalysisReport.from_json(text)
        assert rep.data["n"] == 1 and rep.data["total"] == 3
        assert set(rep.bayes_factors) == {"nb-vs-poisson", "zip-vs-poisson", "zinb-vs-nb", "zinb-vs-zip"}

    def test_all_zero(self, tmp_path):
        code, text = run(["fit", "--data", write_counts(tmp_path / "z.csv", [0] * 6), "--format", "json"])
        assert code == EXIT_OK
        rep = AnalysisReport.from_json(text)
        bf = rep.bayes_factors
        assert bf["zip-vs-poisson"]["log_bf"] == math.inf
        assert all(b["degenerate_all_zero"] for b in bf.values())
        assert all(math.isfinite(bf[k]["log_bf"]) for k in ("nb-vs-poisson", "zinb-vs-nb", "zinb-vs-zip"))
        assert all("does not converge" in f["message"] for f in rep.fits.values())
        assert '"+inf"' in text

    def test_zinb_column_favors_zinb(self, tmp_path):
        s = sample(ZINBParams(0.6, 1.5, 2.0), 900, RngStream(2024))
        out_json = tmp_path / "rep.json"
        code, _ = run(["fit", "--data", write_counts(tmp_path / "c.csv", s.values), "--out", str(out_json)])
        assert code == EXIT_OK
        rep = AnalysisReport.from_json(out_json.read_text())
        bf = rep.bayes_factors
        assert bf["zinb-vs-nb"]["log_bf"] > 0 and bf["zinb-vs-zip"]["log_bf"] > 0
        assert bf["zinb-vs-zip"]["interpretation"] == "strong-m1"
        assert rep.aic_choice == "zinb"

    def test_text_output(self, tmp_path):
        code, text = run(["fit", "--data", write_counts(tmp_path / "c.csv", [0, 1, 4, 0, 2])])
        assert code == EXIT_OK
        assert "log Bayes factors" in text and "AIC choice" in text

    def test_data_error_exit_code(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("count\n1\n-1\n")
        assert run(["fit", "--data", str(p)])[0] == EXIT_DATA


class TestReport:
    def test_round_trip(self):
        rep = analyze(CountSample.of([0, 0, 3, 1, 7, 0, 2]), 1.001, "paper-literal")
        again = AnalysisReport.from_json(rep.to_json())
        assert again == rep
        d = json.loads(rep.to_json())
        assert d["schema_version"] == "1"

    def test_lossless_floats(self):
        rep = analyze(CountSample.of([0, 5, 9, 0, 1]))
        again = AnalysisReport.from_json(rep.to_json())
        for k, b in rep.bayes_factors.items():
            assert again.bayes_factors[k]["log_bf"] == b["log_bf"]

    def test_schema_version_checked(self):
        d = analyze(CountSample.of([1, 2])).to_dict()
        d["schema_version"] = "2"
        with pytest.raises(DataError):
            AnalysisReport.from_dict(d)


class TestTableAndSimulate:
    def test_table_rows_and_determinism(self, tmp_path):
        argv = ["table", "--id", "3", "--scale", "0.01", "--seed", "42", "--out", str(tmp_path / "a")]
        assert run(argv)[0] == EXIT_OK
        first = (tmp_path / "a" / "table3.csv").read_bytes()
        assert len(first.decode().splitlines()) == 33
        argv[-1] = str(tmp_path / "b")
        assert run(argv)[0] == EXIT_OK
        assert (tmp_path / "b" / "table3.csv").read_bytes() == first

    def test_scale_too_small(self):
        assert run(["table", "--id", "3", "--scale", "0.001"])[0] == EXIT_USAGE

    def test_usage_errors(self):
        assert run(["bogus"])[0] == EXIT_USAGE
        assert run(["table", "--id", "7"])[0] == EXIT_USAGE
        assert run(["simulate", "--reps", "10"])[0] == EXIT_USAGE

    def test_simulate_with_config(self, tmp_path):
        cfg = tmp_path / "e.cfg"
        cfg.write_text("comparison = zip-vs-poisson\nmodel = poisson\nlambda = 3\nreps = 10\nseed = 1\n")
        code, text = run(["simulate", "--config", str(cfg), "--n", "40"])
        assert code == EXIT_OK
        lines = text.splitlines()
        assert len(lines) == 2 and lines[1].endswith(",10,40")


class TestOracleCheck:
    def test_restricted_run(self):
        code, text = run(["oracle-check", "--families", "poisson", "--samples", "10"])
        assert code == EXIT_OK
        assert text.startswith("poisson")
        assert "zip " not in text
        assert "adjudication matches recorded verdict: PASS" in text

    def test_verdict_lines_name_variant(self):
        code, text = run(["oracle-check", "--families", "nb", "zinb", "--samples", "6", "--gammas", "1.001"])
        assert code == EXIT_OK
        assert "nb       verdict: matching variant oracle-validated;" in text
        assert "zinb     verdict: matching variant oracle-validated;" in text


def test_console_entry_point(tmp_path):
    data = write_counts(tmp_path / "c.csv", [0, 2, 1])
    res = subprocess.run([sys.executable, "-m", "zibayes.cli", "fit", "--data", data, "--format", "json"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["data"]["n"] == 3
