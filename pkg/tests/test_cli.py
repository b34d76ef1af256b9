import json
import subprocess
import sys

import numpy as np
import pytest

from covreg.cli import load_csv, load_series, main
from covreg.covariance import Dataset
from covreg.errors import ColumnNotFound, InputFileNotFound, ParseError
from covreg.regression import fit_unbiased
from covreg.timeseries import load_lake_huron


@pytest.fixture
def line_csv(tmp_path):
    path = tmp_path / "line.csv"
    rows = ["y,x1,x2"] + [f"{1 + 2 * a - b},{a},{b}" for a, b in [(0, 1), (1, 0), (2, 2), (3, 1), (4, 5), (5, 3)]]
    path.write_text("\n".join(rows) + "\n")
    return path


@pytest.fixture
def noisy_csv(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.standard_normal((25, 2))
    y = 0.5 + x @ [1.0, -2.0] + 0.3 * rng.standard_normal(25)
    path = tmp_path / "noisy.csv"
    path.write_text("a,b,target\n" + "\n".join(f"{u!r},{v!r},{t!r}" for (u, v), t in zip(x.tolist(), y.tolist())) + "\n")
    return path


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestLoadCsv:
    def test_defaults(self, line_csv):
        d = load_csv(str(line_csv))
        assert (d.n, d.p) == (6, 2)
        np.testing.assert_array_equal(d.x[:, 0], [0, 1, 2, 3, 4, 5])

    def test_named_and_indexed_columns(self, noisy_csv):
        a = load_csv(str(noisy_csv), "target", ["a", "b"])
        b = load_csv(str(noisy_csv), "2", ["0", "1"])
        np.testing.assert_array_equal(a.y, b.y)
        np.testing.assert_array_equal(a.x, b.x)

    def test_missing_column(self, noisy_csv):
        with pytest.raises(ColumnNotFound):
            load_csv(str(noisy_csv), "nope")

    def test_bad_cell_cites_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("y,x\n1,2\n3,abc\n")
        with pytest.raises(ParseError) as err:
            load_csv(str(path))
        assert err.value.row == 2
        assert "row 2" in str(err.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputFileNotFound):
            load_csv(str(tmp_path / "absent.csv"))

    def test_series_formats(self, tmp_path):
        plain = tmp_path / "s.txt"
        plain.write_text("1.5\n2.5\n-3\n")
        np.testing.assert_array_equal(load_series(str(plain)), [1.5, 2.5, -3.0])
        with_header = tmp_path / "s.csv"
        with_header.write_text("t,level\n0,1.5\n1,2.5\n2,-3\n")
        np.testing.assert_array_equal(load_series(str(with_header), "level"), [1.5, 2.5, -3.0])


class TestFitCommand:
    def test_exact_line(self, capsys, line_csv):
        code, out, _ = run_cli(capsys, "fit", "--input", str(line_csv), "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["r0_squared"] == pytest.approx(1.0, abs=1e-12)
        assert payload["sigma2_hat"] == pytest.approx(0.0, abs=1e-24)
        np.testing.assert_allclose([payload["coefficients"]["b0"]] + payload["coefficients"]["b"],
                                   [1.0, 2.0, -1.0], atol=1e-12)

    def test_json_round_trip_refits_identically(self, capsys, noisy_csv):
        _, out, _ = run_cli(capsys, "fit", "--input", str(noisy_csv), "--response", "target", "--format", "json")
        payload = json.loads(out)
        refit = fit_unbiased(Dataset(y=payload["input"]["y"], x=payload["input"]["x"]))
        assert refit.b0 == payload["coefficients"]["b0"]
        assert list(refit.b) == payload["coefficients"]["b"]
        assert refit.sigma2_hat == payload["sigma2_hat"]

    def test_table_matches_json_at_full_precision(self, capsys, noisy_csv):
        args = ["fit", "--input", str(noisy_csv), "--response", "target", "--digits", "17"]
        _, text, _ = run_cli(capsys, *args)
        _, js, _ = run_cli(capsys, *args, "--format", "json")
        payload = json.loads(js)
        values = [payload["coefficients"]["b0"]] + payload["coefficients"]["b"]
        rows = [line.split() for line in text.splitlines()[2:5]]
        assert [float(r[2]) for r in rows] == values
        assert float(text.splitlines()[-2].split()[1]) == payload["sigma2_hat"]
        assert float(text.splitlines()[-1].split()[1]) == payload["r0_squared"]


class TestArFitCommand:
    def test_csv_series(self, capsys, tmp_path):
        path = tmp_path / "huron.csv"
        path.write_text("level\n" + "\n".join(repr(float(v)) for v in load_lake_huron()) + "\n")
        code, out, _ = run_cli(capsys, "ar-fit", "--input", str(path), "--p", "3", "--format", "json")
        assert code == 0
        est = json.loads(out)["estimates"]
        assert est["unbiased"]["phi"][0] == pytest.approx(1.0719382, abs=1e-6)
        assert est["yule_walker"]["phi"][0] == pytest.approx(1.088704, abs=1e-6)

    def test_table_columns(self, capsys, tmp_path):
        path = tmp_path / "huron.txt"
        path.write_text("\n".join(str(v) for v in load_lake_huron()))
        _, out, _ = run_cli(capsys, "ar-fit", "--input", str(path), "--p", "2")
        header = out.splitlines()[1].split()
        assert header == ["Parameters", "Least-squares", "Yule-Walker", "Unbiased"]
        assert [line.split()[0] for line in out.splitlines()[2:]] == ["phi0", "phi1", "phi2"]


class TestSimulateCommand:
    def test_byte_identical(self, capsys):
        args = ["simulate", "--phi", "0.4,0.1,0.3", "--n", "50", "--seed", "11"]
        _, a, _ = run_cli(capsys, *args)
        _, b, _ = run_cli(capsys, *args)
        assert a == b
        assert len(a.splitlines()) == 50

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "series.txt"
        code, out, _ = run_cli(capsys, "simulate", "--phi", "0.5", "--n", "10", "--output", str(target))
        assert code == 0 and out == ""
        assert load_series(str(target)).shape == (10,)

    def test_nonstationary_is_domain_error(self, capsys):
        code, _, err = run_cli(capsys, "simulate", "--phi", "1.2", "--n", "10")
        assert code == 1
        assert "category=domain" in err


class TestErrors:
    def test_missing_file_exit_code(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "fit", "--input", str(tmp_path / "x.csv"))
        assert code == 2
        assert "category=io" in err

    def test_parse_error_exit_code(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("y,x\n1,2\n3,oops\n4,5\n")
        code, _, err = run_cli(capsys, "fit", "--input", str(path))
        assert code == 2
        assert "category=parse" in err and "row 2" in err

    def test_singular_data_reports_pseudo_inverse(self, capsys, tmp_path):
        path = tmp_path / "collinear.csv"
        path.write_text("y,a,b\n" + "\n".join(f"{3 * i + 1},{i},{2 * i}" for i in range(6)) + "\n")
        code, out, _ = run_cli(capsys, "fit", "--input", str(path), "--format", "json")
        assert code == 0
        assert json.loads(out)["used_pseudo_inverse"]

    def test_too_few_rows(self, capsys, tmp_path):
        path = tmp_path / "short.csv"
        path.write_text("y,x\n1,2\n2,3\n")
        code, _, err = run_cli(capsys, "fit", "--input", str(path))
        assert code == 1
        assert "category=dimension" in err

    def test_unknown_column(self, capsys, noisy_csv):
        code, _, err = run_cli(capsys, "fit", "--input", str(noisy_csv), "--response", "zzz")
        assert code == 2
        assert "category=io" in err


class TestTablesAndMc:
    def test_tables_pass(self, capsys):
        code, out, _ = run_cli(capsys, "tables")
        assert code == 0
        assert "DEVIATION" not in out

    def test_tables_strict_tolerance_fails(self, capsys):
        code, _, err = run_cli(capsys, "tables", "--tolerance", "1e-12")
        assert code == 1
        assert "category=domain" in err

    def test_mc_bias_json(self, capsys):
        code, out, _ = run_cli(capsys, "mc-bias", "--scenario", "class-c", "--reps", "200", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["scenario"]["kind"] == "class_c"
        assert not payload["constant_variance"]

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "covreg", "simulate", "--phi", "0.3", "--n", "3"],
                              capture_output=True, text=True, check=True)
        assert len(proc.stdout.split()) == 3
