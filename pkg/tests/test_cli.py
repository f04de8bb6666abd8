import json

import pytest

from cycfix import cli
from cycfix.bench import gen_snark, write_instance
from cycfix.solver import BinaryProgram, Row
from cycfix.core import Permutation


@pytest.fixture
def snark3(tmp_path):
    name, bp = gen_snark(3)
    path = tmp_path / "j3.json"
    write_instance(name, bp, str(path))
    return str(path)


@pytest.fixture
def cyclic5(tmp_path):
    gen = Permutation.from_cycles(5, [(1, 2, 3, 4, 5)])
    bp = BinaryProgram(5, [1.0] * 5, [], None, [gen])
    path = tmp_path / "cyc5.json"
    write_instance("cyc5", bp, str(path))
    return str(path)


class TestSolveCommand:
    def test_infeasible_exit_code(self, snark3, capsys):
        rc = cli.main(["solve", "--instance", snark3, "--mode", "group"])
        out = capsys.readouterr().out
        assert rc == cli.EXIT_INFEASIBLE
        assert "status: infeasible" in out

    def test_optimal_exit_code(self, cyclic5, capsys):
        rc = cli.main(["solve", "--instance", cyclic5, "--mode", "peek"])
        out = capsys.readouterr().out
        assert rc == cli.EXIT_OK
        assert "objective: 5" in out

    def test_timelimit_exit_code(self, snark3):
        rc = cli.main(["solve", "--instance", snark3, "--mode", "nosym",
                       "--time-limit", "0"])
        assert rc == cli.EXIT_TIMELIMIT

    def test_missing_instance_is_usage_error(self, capsys):
        rc = cli.main(["solve"])
        assert rc == cli.EXIT_USAGE
        assert "error:" in capsys.readouterr().err

    def test_unknown_flag_is_usage_error(self):
        assert cli.main(["solve", "--bogus"]) == cli.EXIT_USAGE

    def test_no_command_is_usage_error(self, capsys):
        assert cli.main([]) == cli.EXIT_USAGE


class TestPropagateAndOracle:
    def test_peek_closes_the_gap(self, cyclic5, capsys):
        rc = cli.main(["propagate", "--instance", cyclic5,
                       "--fix0", "2,5", "--mode", "peek"])
        out = capsys.readouterr().out
        assert rc == cli.EXIT_OK
        assert "fixed0 added: 4" in out

    def test_nopeek_finds_nothing(self, cyclic5, capsys):
        rc = cli.main(["propagate", "--instance", cyclic5,
                       "--fix0", "2,5", "--mode", "nopeek"])
        out = capsys.readouterr().out
        assert rc == cli.EXIT_OK
        assert "fixed0 added: -" in out

    def test_oracle_matches(self, cyclic5, capsys):
        rc = cli.main(["oracle", "--instance", cyclic5, "--fix0", "2,5"])
        out = capsys.readouterr().out
        assert rc == cli.EXIT_OK
        assert "fixed0 added: 4" in out

    def test_overlapping_fixings_rejected(self, cyclic5):
        rc = cli.main(["propagate", "--instance", cyclic5,
                       "--fix0", "1", "--fix1", "1"])
        assert rc == cli.EXIT_USAGE

    def test_bad_index_rejected(self, cyclic5):
        rc = cli.main(["propagate", "--instance", cyclic5, "--fix0", "9"])
        assert rc == cli.EXIT_USAGE


class TestGenSnarkCommand:
    def test_writes_instance(self, tmp_path, capsys):
        out = tmp_path / "j5.json"
        rc = cli.main(["gen-snark", "--n", "5", "--out", str(out)])
        assert rc == cli.EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["n"] == 90

    def test_even_parameter_rejected(self, tmp_path):
        rc = cli.main(["gen-snark", "--n", "4",
                       "--out", str(tmp_path / "x.json")])
        assert rc == cli.EXIT_USAGE


class TestConfigFile:
    def test_config_supplies_defaults(self, cyclic5, tmp_path, capsys):
        conf = tmp_path / "conf.json"
        conf.write_text(json.dumps({"mode": "peek", "fix0": "2,5"}))
        rc = cli.main(["propagate", "--instance", cyclic5,
                       "--config", str(conf)])
        out = capsys.readouterr().out
        assert rc == cli.EXIT_OK
        assert "fixed0 added: 4" in out

    def test_command_line_wins(self, cyclic5, tmp_path, capsys):
        conf = tmp_path / "conf.json"
        conf.write_text(json.dumps({"mode": "peek"}))
        rc = cli.main(["propagate", "--instance", cyclic5, "--fix0", "2,5",
                       "--mode", "nopeek", "--config", str(conf)])
        out = capsys.readouterr().out
        assert rc == cli.EXIT_OK
        assert "fixed0 added: -" in out

    def test_unknown_config_key_rejected(self, cyclic5, tmp_path):
        conf = tmp_path / "conf.json"
        conf.write_text(json.dumps({"bogus": 1}))
        rc = cli.main(["solve", "--instance", cyclic5,
                       "--config", str(conf)])
        assert rc == cli.EXIT_USAGE


class TestExperimentCommand:
    def test_runs_grid_to_file(self, cyclic5, snark3, tmp_path, capsys):
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({
            "instances": [cyclic5, snark3],
            "modes": ["nosym", "group"],
            "relabels": ["original"],
            "seeds": [0],
        }))
        report = tmp_path / "report.tsv"
        rc = cli.main(["experiment", "--grid", str(grid),
                       "--out", str(report)])
        assert rc == cli.EXIT_OK
        text = report.read_text()
        assert "runs\t4" in text
        assert "flower_snark_3\tgroup" in text

    def test_stdout_report(self, cyclic5, tmp_path, capsys):
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({
            "instances": [cyclic5], "modes": ["nosym"],
            "relabels": ["original"], "seeds": [0]}))
        rc = cli.main(["experiment", "--grid", str(grid), "--out", "-"])
        assert rc == cli.EXIT_OK
        assert "time_shifted_geomean" in capsys.readouterr().out

    def test_unknown_grid_key_rejected(self, cyclic5, tmp_path):
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({"instances": [cyclic5], "bogus": 1}))
        assert cli.main(["experiment", "--grid", str(grid), "--out", "-"]) \
            == cli.EXIT_USAGE
