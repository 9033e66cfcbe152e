import math

import numpy as np
import pytest

from qjdr.exceptions import ConfigError
from qjdr.runner.cli import main
from qjdr.runner.config import SweepConfig, apply_overrides, format_config, grid_points, load_config, parse_config
from qjdr.runner.output import CSV_COLUMNS, clip_log, format_csv, format_svg, parse_csv
from qjdr.runner.sweep import SweepFailed, SweepRow, evaluate_point, run_sweep
from qjdr.vqc import Optimizer, TrainConfig

SMALL = """
[sweep]
magnitudes = 0.0, 0.3
temperatures_kelvin = 0.001
[ansatz]
num_layers = 1
[train]
restarts = 1
max_outer_iters = 2
inner_steps = 5
"""


@pytest.fixture
def small_config():
    return parse_config(SMALL)


@pytest.fixture
def small_ini(tmp_path):
    path = tmp_path / "small.ini"
    path.write_text(SMALL)
    return path


def make_row(**kw):
    base = dict(magnitude=0.5, alpha_sq=0.25, nbar=0.0, p_err_classical=0.2, p_err_optimal=0.1,
                p_err_pgm=0.11, p_err_vqc=0.12, ykl_residual=1e-9, train_iterations=7, seed=0)
    base.update(kw)
    return SweepRow(**base)


class TestConfig:
    def test_defaults(self):
        config = SweepConfig()
        assert len(config.magnitudes) == 20
        assert config.magnitudes[0] == 0.05 and config.magnitudes[-1] == 1.0
        assert config.temperatures_kelvin == (0.001, 1.0)
        assert config.train == TrainConfig()
        assert config.num_layers == 3

    def test_parse(self, small_config):
        assert small_config.magnitudes == (0.0, 0.3)
        assert small_config.train.restarts == 1
        assert small_config.num_layers == 1

    def test_range_syntax(self):
        config = parse_config("[sweep]\nmagnitudes = 0.1:0.5:0.1\n")
        np.testing.assert_allclose(config.magnitudes, [0.1, 0.2, 0.3, 0.4, 0.5])

    @pytest.mark.parametrize("text", [
        "[sweep]\nmagnitude = 0.1\n",
        "[bogus]\nx = 1\n",
        "[train]\nrestarts = many\n",
        "[train]\noptimizer = adam\n",
        "[sweep]\ntemperatures_kelvin = 0\n",
        "[sweep]\nmagnitudes = 0.1:0.5:0\n",
        "not an ini file",
    ])
    def test_rejects(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_overrides(self, small_config):
        config = apply_overrides(small_config, ["train.seed=9", "train.optimizer=spsa", "transduction.efficiency=0.5"])
        assert config.train.seed == 9
        assert config.train.optimizer is Optimizer.SPSA
        assert config.efficiency == 0.5
        with pytest.raises(ConfigError):
            apply_overrides(small_config, ["seed=9"])
        with pytest.raises(ConfigError):
            apply_overrides(small_config, ["train.seed"])

    def test_format_round_trip(self, small_config):
        assert parse_config(format_config(small_config)) == small_config
        assert parse_config(format_config(SweepConfig())) == SweepConfig()

    def test_load(self, small_ini):
        assert load_config(small_ini, ["sweep.output=x.csv"]).output == "x.csv"

    def test_grid_order(self):
        config = parse_config("[sweep]\nmagnitudes = 0.3, 0.1\ntemperatures_kelvin = 1.0, 0.001\n")
        assert grid_points(config) == [(0.001, 0.1), (0.001, 0.3), (1.0, 0.1), (1.0, 0.3)]


class TestCsv:
    def test_header_exact(self):
        assert format_csv([]) == ",".join(CSV_COLUMNS) + "\n"
        assert len(CSV_COLUMNS) == 10

    def test_round_trip(self):
        rows = [make_row(), make_row(magnitude=1 / 3, p_err_vqc=math.pi / 10)]
        text = format_csv(rows)
        back = parse_csv(text)
        for a, b in zip(rows, back, strict=True):
            for c in CSV_COLUMNS:
                assert getattr(b, c) == pytest.approx(getattr(a, c), rel=1e-11)
        for line in text.splitlines():
            assert len(line.split(",")) == 10

    def test_twelve_significant_digits(self):
        line = format_csv([make_row(p_err_vqc=1 / 3)]).splitlines()[1]
        assert "0.333333333333" in line.split(",")
        assert line.split(",")[-2:] == ["7", "0"]

    @pytest.mark.parametrize("text", ["a,b\n", "", ",".join(CSV_COLUMNS) + "\n1,2\n"])
    def test_parse_errors(self, text):
        with pytest.raises(ValueError):
            parse_csv(text)


class TestSvg:
    def test_structure(self):
        rows = [make_row(temperature_kelvin=t, magnitude=m) for t in (0.001, 1.0) for m in (0.1, 0.5)]
        svg = format_svg(rows)
        assert svg.startswith("<svg")
        assert svg.count('class="series line"') == 1
        assert svg.count('class="series points"') == 4
        assert "T = 1 mK" in svg and "T = 1 K" in svg

    def test_labels_by_nbar_without_temperature(self):
        assert "nbar = 0" in format_svg([make_row()])

    def test_clipping(self):
        assert clip_log(0.0) == -6
        assert clip_log(1e-9) == -6
        assert clip_log(2.0) == 0
        assert clip_log(float("nan")) is None
        format_svg([make_row(p_err_optimal=0.0, p_err_vqc=float("nan"))])

    def test_empty(self):
        with pytest.raises(ValueError):
            format_svg([])


class TestSweep:
    def test_vacuum_point(self, small_config):
        row = evaluate_point(small_config, 0.001, 0.0)
        assert row.p_err_classical == pytest.approx(0.75)
        assert row.p_err_optimal == pytest.approx(0.75, abs=1e-9)
        assert row.p_err_pgm == pytest.approx(0.75, abs=1e-9)
        assert row.p_err_vqc == pytest.approx(0.75, abs=1e-9)

    def test_rows_and_dominance(self, small_config):
        rows = run_sweep(small_config)
        assert [(r.temperature_kelvin, r.magnitude) for r in rows] == grid_points(small_config)
        for r in rows:
            assert r.check_dominance() == []
            assert r.ykl_residual <= 1e-6

    def test_parallel_matches_serial(self, small_config):
        assert run_sweep(small_config, jobs=2) == run_sweep(small_config, jobs=1)

    def test_without_training(self, small_config):
        rows = run_sweep(small_config, with_training=False)
        assert all(math.isnan(r.p_err_vqc) and r.train_iterations == 0 for r in rows)

    def test_failures_collected(self, small_config):
        config = apply_overrides(small_config, ["transduction.fock_cutoff=4", "sweep.magnitudes=0.1, 1.5"])
        with pytest.raises(SweepFailed) as info:
            run_sweep(config)
        assert info.value.numerical
        assert [r.magnitude for r in info.value.rows] == [0.1]
        assert len(info.value.failures) == 1

    def test_dominance_detects(self):
        assert make_row(p_err_vqc=0.05).check_dominance()
        assert make_row(p_err_pgm=1.5).check_dominance()


class TestCli:
    def test_baseline(self, capsys, small_ini):
        assert main(["baseline", "--config", str(small_ini)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "magnitude,alpha_sq,p_err_single,p_err_classical"
        assert lines[1].split(",")[-1] == "0.75"

    def test_transduce(self, capsys, small_ini):
        assert main(["transduce", "--config", str(small_ini)]) == 0
        out = capsys.readouterr().out.splitlines()
        assert len(out) == 3
        az = float(out[2].split(",")[6])
        assert az == pytest.approx(1.5 * math.pi, abs=1e-9)

    def test_optimal(self, capsys, small_ini):
        assert main(["optimal", "--config", str(small_ini)]) == 0
        assert len(capsys.readouterr().out.splitlines()) == 3

    def test_train(self, capsys, small_ini):
        assert main(["train", "--config", str(small_ini), "--magnitude", "0.3", "--seed", "2"]) == 0
        out = capsys.readouterr().out
        assert "step,best_p_err" in out and "seed=2" in out

    def test_sweep_and_plot(self, tmp_path, small_ini):
        csv_path, svg_path = tmp_path / "s.csv", tmp_path / "s.svg"
        assert main(["sweep", "--config", str(small_ini), "--out", str(csv_path), "--plot", str(svg_path), "--jobs", "1"]) == 0
        assert csv_path.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)
        assert svg_path.read_text().startswith("<svg")
        again = tmp_path / "again.svg"
        assert main(["plot", str(csv_path), "--out", str(again)]) == 0
        assert again.read_text().count('class="series points"') == 2

    def test_sweep_stdout(self, capsys, small_ini):
        assert main(["sweep", "--config", str(small_ini), "--out", "-", "--jobs", "1"]) == 0
        assert capsys.readouterr().out.startswith("magnitude,alpha_sq")

    def test_config_command(self, capsys, small_ini):
        assert main(["config", "--config", str(small_ini), "--set", "train.seed=3"]) == 0
        assert "seed = 3" in capsys.readouterr().out

    @pytest.mark.parametrize("argv", [[], ["frobnicate"], ["baseline", "--set", "sweep.nope=1"], ["baseline", "--jobs", "x"]])
    def test_usage_errors(self, capsys, argv):
        assert main(argv) == 1

    def test_config_error_exit(self, tmp_path, capsys):
        bad = tmp_path / "bad.ini"
        bad.write_text("[sweep]\nmagnitudes = -1\n")
        assert main(["baseline", "--config", str(bad)]) == 1

    def test_numerical_exit(self, small_ini, capsys):
        argv = ["optimal", "--config", str(small_ini), "--set", "transduction.fock_cutoff=4", "--set", "sweep.magnitudes=1.5"]
        assert main(argv) == 2
        assert "TruncationRisk" in capsys.readouterr().err

    def test_sweep_numerical_exit(self, small_ini, tmp_path, capsys):
        out = tmp_path / "partial.csv"
        argv = ["sweep", "--config", str(small_ini), "--out", str(out), "--jobs", "1",
                "--set", "transduction.fock_cutoff=4", "--set", "sweep.magnitudes=0.1, 1.5"]
        assert main(argv) == 2
        assert len(out.read_text().splitlines()) == 2

    def test_io_errors(self, tmp_path, small_ini, capsys):
        assert main(["baseline", "--config", str(tmp_path / "missing.ini")]) == 3
        assert main(["plot", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "x.svg")]) == 3
        assert main(["baseline", "--config", str(small_ini), "--out", str(tmp_path / "no" / "dir.csv")]) == 3

    def test_bad_codebook_file(self, tmp_path, capsys):
        cb = tmp_path / "cb.txt"
        cb.write_text("+++\n++\n")
        assert main(["optimal", "--set", f"sweep.codebook={cb}", "--set", "sweep.magnitudes=0.1"]) == 1
        assert f"{cb}:2:" in capsys.readouterr().err

    def test_custom_codebook(self, tmp_path, capsys):
        cb = tmp_path / "rep.txt"
        cb.write_text("# repetition\n+++\n---\n")
        argv = ["optimal", "--set", f"sweep.codebook={cb}", "--set", "sweep.magnitudes=0.3",
                "--set", "sweep.temperatures_kelvin=0.001"]
        assert main(argv) == 0
        p_opt = float(capsys.readouterr().out.splitlines()[1].split(",")[4])
        assert 0 < p_opt < 0.5
