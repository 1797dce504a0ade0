import csv
import json

import numpy as np
import pytest

from spheretail import cli, p_tube
from spheretail.geometry import PointConfiguration
from spheretail.radial_laws import ChiSquare


def write_config(path, **overrides):
    base = {
        "correlation": [
            [1.0, 0.25, 0.25],
            [0.25, 1.0, 0.25],
            [0.25, 0.25, 1.0],
        ],
        "law": {"family": "chi_square", "nu": 3.0},
        "c_grid": {"start": 1.0, "stop": 3.0, "step": 0.5},
        "trials": 2000,
        "seed": 11,
    }
    base.update(overrides)
    path.write_text(json.dumps(base))
    return path


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        rows = list(reader)
    return header, rows


class TestSubcommands:
    def test_approx(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json")
        out = tmp_path / "approx.csv"
        assert cli.run(["approx", "--config", str(cfg), "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["c", "p_tube", "p_tube_capped"]
        assert len(rows) == 5
        for row in rows:
            raw, capped = float(row[1]), float(row[2])
            assert capped == min(1.0, raw)

    def test_exact_and_error_consistency(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json")
        out = tmp_path / "error.csv"
        assert cli.run(["error", "--config", str(cfg), "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == [
            "c", "p_tube", "p_tube_capped", "p_exact", "p_lower",
            "delta_exact", "delta_pred", "branch", "flags",
        ]
        for row in rows:
            tube, exact = float(row[1]), float(row[3])
            delta = float(row[5])
            assert 0.0 <= exact <= tube
            assert 0.0 <= delta < 1.0
            assert row[7] == "SUBEXP"

    def test_simulate(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json")
        out = tmp_path / "sim.csv"
        assert cli.run(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["c", "p_hat", "se", "trials", "seed"]
        p_hats = [float(r[1]) for r in rows]
        assert all(a >= b for a, b in zip(p_hats, p_hats[1:]))
        assert rows[0][3] == "2000" and rows[0][4] == "11"

    def test_threshold_roundtrip(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json")
        assert cli.run(
            ["threshold", "--config", str(cfg), "--target", "0.05", "--method", "tube"]
        ) == 0
        printed = capsys.readouterr().out
        c_gamma = float(printed.split("=")[1])
        config = PointConfiguration.from_correlation(
            [[1.0, 0.25, 0.25], [0.25, 1.0, 0.25], [0.25, 0.25, 1.0]]
        )
        assert p_tube(config, ChiSquare(3.0), c_gamma) == pytest.approx(0.05, abs=1e-8)

    def test_grid_override(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json")
        out = tmp_path / "a.csv"
        assert cli.run(
            ["approx", "--config", str(cfg), "--out", str(out), "--c-grid", "1:2:0.25"]
        ) == 0
        _, rows = read_csv(out)
        assert [float(r[0]) for r in rows] == [1.0, 1.25, 1.5, 1.75, 2.0]

    def test_points_configuration_source(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "points": [[1.0, 0.0], [0.0, 1.0]],
                    "law": {"family": "f", "nu1": 2.0, "nu2": 3.0},
                    "c_grid": {"start": 1.0, "stop": 2.0, "step": 0.5},
                }
            )
        )
        out = tmp_path / "fo.csv"
        assert cli.run(["exact", "--config", str(cfg), "--out", str(out)]) == 0


class TestValidationFailures:
    def test_non_psd_correlation(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path / "cfg.json",
            correlation=[[1.0, 0.9, 0.0], [0.9, 1.0, 0.9], [0.0, 0.9, 1.0]],
        )
        assert cli.run(["approx", "--config", str(cfg), "--out", "x.csv"]) == 1
        assert "positive semidefinite" in capsys.readouterr().err

    def test_both_sources_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json", points=[[1.0, 0.0], [0.0, 1.0]])
        assert cli.run(["approx", "--config", str(cfg), "--out", "x.csv"]) == 1
        assert "exactly one" in capsys.readouterr().err

    def test_unknown_family(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json", law={"family": "pareto"})
        assert cli.run(["approx", "--config", str(cfg), "--out", "x.csv"]) == 1
        assert "family" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        assert cli.run(["approx", "--config", str(tmp_path / "none.json")]) == 1
        assert "error" in capsys.readouterr().err

    def test_bad_grid(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json")
        code = cli.run(
            ["approx", "--config", str(cfg), "--out", "x.csv", "--c-grid", "3:1:0.5"]
        )
        assert code == 1

    def test_numerical_failure_exit_code(self, tmp_path, capsys, monkeypatch):
        from spheretail.special_functions import QuadratureError

        def explode(*args, **kwargs):
            raise QuadratureError("tolerance not reached", estimate=0.1, error_bound=0.2)

        monkeypatch.setattr(cli.excursion, "p_tube", explode)
        cfg = write_config(tmp_path / "cfg.json")
        assert cli.run(["approx", "--config", str(cfg), "--out", "x.csv"]) == 2
        err = capsys.readouterr().err
        assert "numerical failure" in err and "0.1" in err


class TestReproduce:
    def test_golden_bit_identical(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        args = ["reproduce", "--case", "gauss", "--c-grid", "2:4:0.5", "--trials", "2000"]
        assert cli.run(args + ["--out", str(out1)]) == 0
        assert cli.run(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_t_case_columns_and_invariants(self, tmp_path):
        out = tmp_path / "t.csv"
        assert cli.run(
            ["reproduce", "--case", "t", "--c-grid", "2:6:1", "--trials", "4000",
             "--out", str(out)]
        ) == 0
        header, rows = read_csv(out)
        assert header[0] == "c" and "delta_pred" in header and "p_lower" in header
        col = {name: idx for idx, name in enumerate(header)}
        for row in rows:
            tube = float(row[col["p_tube"]])
            exact = float(row[col["p_exact"]])
            lower = float(row[col["p_lower"]])
            assert 0.0 <= exact <= tube
            assert lower < tube
            assert row[col["branch"]] == "RV"
        # the prediction column is the constant limiting value, and the
        # exact relative error stabilizes near it as the threshold grows
        preds = {row[col["delta_pred"]] for row in rows}
        assert len(preds) == 1
        limit = float(preds.pop())
        deltas = [float(row[col["delta_exact"]]) for row in rows]
        assert abs(deltas[-1] - limit) < 0.01
        assert abs(deltas[-1] - limit) < abs(deltas[0] - limit)

    def test_gauss_case_slope_from_emitted_data(self, tmp_path):
        out = tmp_path / "gauss.csv"
        assert cli.run(
            ["reproduce", "--case", "gauss", "--c-grid", "4:6:0.5", "--trials", "1000",
             "--out", str(out)]
        ) == 0
        header, rows = read_csv(out)
        col = {name: idx for idx, name in enumerate(header)}
        c_sq = np.array([float(r[col["c"]]) ** 2 for r in rows])
        log_delta = np.array([float(r[col["log_delta_exact"]]) for r in rows])
        slope = np.polyfit(c_sq, log_delta, 1)[0]
        assert abs(slope - (-0.3)) <= 0.15 * 0.3

    def test_seventeen_digit_roundtrip(self, tmp_path):
        out = tmp_path / "g.csv"
        assert cli.run(
            ["reproduce", "--case", "gauss", "--c-grid", "2:3:0.5", "--trials", "1000",
             "--out", str(out)]
        ) == 0
        header, rows = read_csv(out)
        col = {name: idx for idx, name in enumerate(header)}
        config = PointConfiguration.from_correlation(
            [[1.0, 0.25, 0.25], [0.25, 1.0, 0.25], [0.25, 0.25, 1.0]]
        )
        for row in rows:
            c = float(row[col["c"]])
            recomputed = p_tube(config, ChiSquare(3.0), c)
            assert float(row[col["p_tube"]]) == recomputed  # 17 digits are lossless

    def test_unknown_case_rejected(self):
        with pytest.raises(SystemExit):
            cli.run(["reproduce", "--case", "cauchy"])
