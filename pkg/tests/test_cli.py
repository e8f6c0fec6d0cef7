"""Command-line surface: outputs, files, and the exit-code contract."""

import json

import pytest

from coinfactory import machinefile
from coinfactory.cli import main


def lines_of(capsys):
    out = capsys.readouterr().out
    return [line for line in out.splitlines() if line]


def fields_of(capsys):
    return dict(
        line.split(" = ", 1) for line in lines_of(capsys) if " = " in line
    )


@pytest.fixture
def machine_path(tmp_path):
    def write(name):
        path = tmp_path / f"{name}.json"
        assert main(["builtin", "--name", name, "--out", str(path)]) == 0
        return str(path)

    return write


class TestBuildBlock:
    def test_reports_shape_and_writes(self, tmp_path, capsys):
        out = tmp_path / "third.json"
        code = main(["build-block", "--f", "1/3", "--out", str(out)])
        assert code == 0
        fields = fields_of(capsys)
        assert set(fields) >= {"k", "r", "polya_exponent", "block_length"}
        assert int(fields["block_length"]) == int(fields["k"]) + 2 * int(fields["r"])
        machine = machinefile.load(out)
        assert machine.block_length == int(fields["block_length"])

    def test_range_violation_is_exit_2(self, capsys):
        assert main(["build-block", "--f", "2*p"]) == 2
        assert main(["build-block", "--f", "1 + p"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_parse_failure_is_exit_4(self, capsys):
        assert main(["build-block", "--f", "p +"]) == 4

    def test_tiny_cap_is_exit_3(self, capsys):
        assert main(["build-block", "--f", "(3*p^2 - 3*p + 1)/2", "--cap", "0"]) == 3


class TestPolya:
    def test_centered_quadratic(self, capsys):
        code = main(["polya", "--f", "(3*p^2 - 3*p + 1)/2"])
        assert code == 0
        fields = fields_of(capsys)
        assert fields["polya_exponent"] == "1"
        assert fields["d"] == "[1, 0, 0, 1]"
        assert fields["e"] == "[2, 6, 6, 2]"

    def test_degree_zero_target(self, capsys):
        assert main(["polya", "--f", "1/2"]) == 0
        assert fields_of(capsys)["polya_exponent"] == "0"


class TestBuiltin:
    def test_stdout_is_a_machine_document(self, capsys):
        assert main(["builtin", "--name", "square"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["kind"] == "finite"

    def test_file_output(self, machine_path, capsys):
        path = machine_path("ladder")
        assert machinefile.load(path).stack_symbols == 1


class TestExtract:
    def test_finite(self, machine_path, capsys):
        path = machine_path("ratio")
        capsys.readouterr()
        assert main(["extract", "--machine", path]) == 0
        out = lines_of(capsys)
        assert "label 1: p^2/(2*p^2 - 2*p + 1)" in out

    def test_block(self, tmp_path, capsys):
        path = tmp_path / "third.json"
        main(["build-block", "--f", "1/3", "--out", str(path)])
        capsys.readouterr()
        assert main(["extract", "--machine", str(path)]) == 0
        out = lines_of(capsys)
        assert "label 0: 2/3" in out
        assert "label 1: 1/3" in out

    def test_dice(self, machine_path, capsys):
        path = machine_path("sqrt_dice")
        capsys.readouterr()
        assert main(["extract", "--machine", path]) == 0
        out = lines_of(capsys)
        assert "label 1: p" in out
        assert len(out) == 3

    def test_pushdown_is_refused(self, machine_path, capsys):
        path = machine_path("sqrt")
        assert main(["extract", "--machine", path]) == 4
        assert "pda-value" in capsys.readouterr().err

    def test_missing_file_is_exit_4(self, tmp_path, capsys):
        assert main(["extract", "--machine", str(tmp_path / "no.json")]) == 4


class TestVerifyExact:
    def test_finite_match(self, machine_path, capsys):
        path = machine_path("square")
        capsys.readouterr()
        assert main(["verify-exact", "--machine", path, "--f", "p^2"]) == 0
        assert "match" in capsys.readouterr().out

    def test_block_match_and_mismatch(self, tmp_path, capsys):
        path = tmp_path / "third.json"
        main(["build-block", "--f", "1/3", "--out", str(path)])
        assert main(["verify-exact", "--machine", str(path), "--f", "1/3"]) == 0
        capsys.readouterr()
        assert main(["verify-exact", "--machine", str(path), "--f", "1/2"]) == 1
        out = capsys.readouterr().out
        assert "MISMATCH" in out
        assert "machine: 1/3" in out
        assert "target:  1/2" in out

    def test_dice_accepts_either_variable_style(self, machine_path, capsys):
        path = machine_path("sqrt_dice")
        for style in (
            ["(1-p)/2", "p", "(1-p)/2"],
            ["(1-p2)/2", "p2", "(1-p2)/2"],
            ["p1/2", "1-p1", "p1/2"],
        ):
            argv = ["verify-exact", "--machine", path]
            for text in style:
                argv += ["--f", text]
            assert main(argv) == 0

    def test_dice_needs_one_target_per_output(self, machine_path, capsys):
        path = machine_path("sqrt_dice")
        assert (
            main(["verify-exact", "--machine", path, "--f", "p", "--f", "p"]) == 4
        )

    def test_pushdown_is_refused(self, machine_path, capsys):
        path = machine_path("ladder")
        assert main(["verify-exact", "--machine", path, "--f", "p"]) == 4


class TestSimulate:
    def test_text_report(self, machine_path, capsys):
        path = machine_path("square")
        capsys.readouterr()
        code = main([
            "simulate", "--machine", path, "--p", "0.3",
            "--n", "2000", "--seed", "1",
        ])
        assert code == 0
        fields = fields_of(capsys)
        assert fields["kind"] == "finite"
        assert fields["n_trials"] == "2000"
        assert abs(float(fields["estimate"]) - 0.09) < 0.03
        assert abs(float(fields["z_score"])) < 4.0

    def test_json_report_is_reproducible(self, machine_path, capsys):
        path = machine_path("square")
        argv = [
            "simulate", "--machine", path, "--p", "0.3",
            "--n", "2000", "--seed", "7", "--json",
        ]
        capsys.readouterr()
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        second = capsys.readouterr().out
        assert first == second
        assert json.loads(first)["seed"] == 7
        other = [
            "simulate", "--machine", path, "--p", "0.3",
            "--n", "2000", "--seed", "8", "--json",
        ]
        assert main(other) == 0
        assert capsys.readouterr().out != first

    def test_explicit_target(self, machine_path, capsys):
        path = machine_path("square")
        capsys.readouterr()
        code = main([
            "simulate", "--machine", path, "--p", "0.3", "--n", "100",
            "--seed", "0", "--target", "p^2",
        ])
        assert code == 0
        assert float(fields_of(capsys)["target"]) == pytest.approx(0.09)

    def test_bias_must_be_interior(self, machine_path, capsys):
        path = machine_path("square")
        assert main(["simulate", "--machine", path, "--p", "1.0", "--n", "10"]) == 2
        assert main(["simulate", "--machine", path, "--p", "-0.2", "--n", "10"]) == 2

    def test_needs_a_trial(self, machine_path, capsys):
        path = machine_path("square")
        assert main(["simulate", "--machine", path, "--p", "0.5", "--n", "0"]) == 2

    def test_missing_machine_is_exit_4(self, tmp_path, capsys):
        missing = str(tmp_path / "gone.json")
        assert main(["simulate", "--machine", missing, "--p", "0.5"]) == 4


class TestPdaValue:
    def test_ladder_closed_form(self, machine_path, capsys):
        path = machine_path("ladder")
        capsys.readouterr()
        assert main(["pda-value", "--machine", path, "--p", "0.25"]) == 0
        fields = fields_of(capsys)
        assert float(fields["value"]) == pytest.approx(2 / 3, abs=1e-9)
        assert fields["method"] in ("lr", "jacobi", "block-lr")

    def test_transient_walk_is_exit_5(self, machine_path, capsys):
        path = machine_path("transient_ladder")
        assert main(["pda-value", "--machine", path, "--p", "0.5"]) == 5
        assert "error:" in capsys.readouterr().err

    def test_finite_machine_is_refused(self, machine_path, capsys):
        path = machine_path("square")
        assert main(["pda-value", "--machine", path, "--p", "0.5"]) == 4

    def test_iteration_budget_is_exit_3(self, machine_path, capsys):
        path = machine_path("ladder")
        assert (
            main([
                "pda-value", "--machine", path, "--p", "0.25",
                "--iter-cap", "1",
            ])
            == 3
        )


class TestDiceBuild:
    def test_binary_three_outputs(self, tmp_path, capsys):
        out = tmp_path / "walk.json"
        code = main([
            "dice-build",
            "--f", "(1-p)/2", "--f", "p", "--f", "(1-p)/2",
            "--out", str(out),
        ])
        assert code == 0
        fields = fields_of(capsys)
        assert fields["s"] == "2"
        assert fields["outputs"] == "3"
        machine = machinefile.load(out)
        assert machine.outputs == 3

    def test_three_letter_alphabet(self, capsys):
        code = main([
            "dice-build", "--s", "3",
            "--f", "p1", "--f", "p2", "--f", "p3",
        ])
        assert code == 0
        assert fields_of(capsys)["s"] == "3"

    def test_targets_must_sum_to_one(self, capsys):
        assert main(["dice-build", "--f", "p/2", "--f", "p/2"]) == 2
