"""Command-line behavior: exit codes, validation messages, determinism."""

import json
import subprocess
import sys

from connectgraph import cli, verify

SBM_ARGS = [
    "--r", "2", "--m", "2", "--n", "6",
    "--rho", "0.6", "--alpha", "0.4", "--beta", "0.3", "--gamma", "0.1",
]


def run_cli(capsys, argv):
    code = cli.parse_and_dispatch(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSuccessPaths:
    def test_toy_json(self, capsys):
        code, out, err = run_cli(
            capsys,
            ["toy", "--rho", "0.7", "--alpha", "0.15", "--beta", "0.1", "--gamma", "0.05"],
        )
        assert code == 0 and err == ""
        rep = json.loads(out)
        assert rep["target_error"] == 0.0
        assert abs(rep["spectrum"][0] - 0.25) < 1e-12

    def test_toy_degenerate_still_succeeds(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["toy", "--rho", "0.25", "--alpha", "0.25", "--beta", "0.25", "--gamma", "0.25"],
        )
        assert code == 0
        assert json.loads(out)["degenerate"] is True

    def test_separation_json(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["separation", "--rho", "0.5", "--alpha", "0.25", "--beta", "0", "--gamma", "0"],
        )
        assert code == 0
        rep = json.loads(out)
        assert rep["contrastive_err"] == 0.0
        assert abs(rep["dann_domain_term"] - 0.375) < 1e-15

    def test_sbm_run_expected(self, capsys):
        code, out, _ = run_cli(capsys, ["sbm-run", *SBM_ARGS, "--expected"])
        assert code == 0
        rep = json.loads(out)
        assert rep["target_error"] == 0.0 and rep["op_norm_dev"] == 0.0

    def test_sbm_sweep_csv(self, capsys):
        code, out, _ = run_cli(
            capsys,
            [
                "sbm-sweep", *SBM_ARGS,
                "--vary", "alpha", "--from", "0.2", "--to", "0.4", "--steps", "3",
                "--trials", "2", "--base-seed", "7",
            ],
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == (
            "vary,value,trial,seed,target_error,domain_error,"
            "scaling_factor,op_norm_dev,cos_src_tgt,cos_src_dom"
        )
        assert len(lines) == 1 + 3 * 2

    def test_ablate_json(self, capsys):
        code, out, _ = run_cli(
            capsys, ["ablate", *SBM_ARGS, "--fraction", "0.5", "--seed", "3"]
        )
        assert code == 0
        json.loads(out)

    def test_fit_round_trip(self, capsys, tmp_path):
        csv = tmp_path / "records.csv"
        lines = ["pair_id,accuracy,alpha,beta,gamma"]
        import math

        for i, (a, b) in enumerate(((2.0, 3.0), (3.0, 2.0), (4.0, 5.0), (5.0, 4.0))):
            acc = 10.0 * math.log(a) + 2.0 * math.log(b)
            lines.append(f"p{i},{acc},{a},{b},1.0")
        csv.write_text("\n".join(lines) + "\n", encoding="utf-8")
        code, out, _ = run_cli(capsys, ["fit", "--input", str(csv)])
        assert code == 0
        fit = json.loads(out)
        assert abs(fit["w_alpha"] - 10.0) < 1e-8
        assert abs(fit["w_beta"] - 2.0) < 1e-8

    def test_paper_tables(self, capsys):
        code, out, _ = run_cli(capsys, ["paper-tables"])
        assert code == 0
        rep = json.loads(out)
        assert rep["published"]["w_alpha"] == 14.9

    def test_verify_single_suite(self, capsys):
        code, out, _ = run_cli(capsys, ["verify", "--suite", "graph_core"])
        assert code == 0
        assert "ok graph_core." in out
        assert "0 failed" in out

    def test_output_file(self, capsys, tmp_path):
        dest = tmp_path / "report.json"
        code, out, _ = run_cli(
            capsys,
            [
                "toy", "--rho", "0.7", "--alpha", "0.15", "--beta", "0.1",
                "--gamma", "0.05", "--output", str(dest),
            ],
        )
        assert code == 0 and out == ""
        assert json.loads(dest.read_text(encoding="utf-8"))["target_error"] == 0.0


class TestValidationExitCode:
    def test_params_not_a_distribution(self, capsys):
        code, _, err = run_cli(
            capsys,
            ["toy", "--rho", "0.7", "--alpha", "0.2", "--beta", "0.2", "--gamma", "0.05"],
        )
        assert code == 2
        assert "--rho/--alpha/--beta/--gamma" in err

    def test_r_below_two(self, capsys):
        code, _, err = run_cli(
            capsys,
            ["sbm-run", "--r", "1", "--m", "2", "--n", "4", "--rho", "0.6",
             "--alpha", "0.4", "--beta", "0.3", "--gamma", "0.1"],
        )
        assert code == 2
        assert "--r" in err

    def test_probability_out_of_range(self, capsys):
        code, _, err = run_cli(
            capsys,
            ["sbm-run", "--r", "2", "--m", "2", "--n", "4", "--rho", "1.2",
             "--alpha", "0.4", "--beta", "0.3", "--gamma", "0.1"],
        )
        assert code == 2
        assert "--rho" in err

    def test_fraction_out_of_range(self, capsys):
        code, _, err = run_cli(capsys, ["ablate", *SBM_ARGS, "--fraction", "1.5"])
        assert code == 2
        assert "--fraction" in err

    def test_k_beyond_rank(self, capsys):
        code, _, err = run_cli(capsys, ["sbm-run", *SBM_ARGS, "--expected", "--k", "9"])
        assert code == 2
        assert "positive eigenvalues" in err

    def test_unknown_flag(self, capsys):
        code, _, _ = run_cli(
            capsys,
            ["toy", "--rho", "0.7", "--alpha", "0.15", "--beta", "0.1",
             "--gamma", "0.05", "--zap", "1"],
        )
        assert code == 2

    def test_non_numeric_value(self, capsys):
        code, _, _ = run_cli(
            capsys,
            ["toy", "--rho", "seven", "--alpha", "0.15", "--beta", "0.1", "--gamma", "0.05"],
        )
        assert code == 2

    def test_unknown_suite(self, capsys):
        code, _, err = run_cli(capsys, ["verify", "--suite", "bogus"])
        assert code == 2
        assert "--suite" in err

    def test_bad_fit_header(self, capsys, tmp_path):
        csv = tmp_path / "bad.csv"
        csv.write_text("a,b,c\n1,2,3\n", encoding="utf-8")
        code, _, err = run_cli(capsys, ["fit", "--input", str(csv)])
        assert code == 2
        assert "--input" in err


class TestNumericalFailureExitCode:
    def test_failing_check_returns_one(self, capsys, monkeypatch):
        def boom():
            raise verify.CheckFailure("forced failure for the exit-code contract")

        monkeypatch.setattr(
            verify, "CHECKS", [("graph_core", "forced_failure", boom)]
        )
        code, out, _ = run_cli(capsys, ["verify", "--suite", "graph_core"])
        assert code == 1
        assert "FAIL graph_core.forced_failure" in out


class TestDeterminism:
    def test_seed_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv("CONNECTGRAPH_SEED", "42")
        code, out, _ = run_cli(capsys, ["sbm-run", *SBM_ARGS, "--seed", "5"])
        assert code == 0
        assert json.loads(out)["seed"] == 42

    def test_repeated_invocations_are_identical(self, capsys):
        argv = [
            "sbm-sweep", *SBM_ARGS,
            "--vary", "gamma", "--from", "0.05", "--to", "0.15", "--steps", "2",
            "--trials", "2", "--base-seed", "3",
        ]
        outs = []
        for threads in ("1", "2", "4"):
            code, out, _ = run_cli(capsys, argv + ["--threads", threads])
            assert code == 0
            outs.append(out)
        assert outs[0] == outs[1] == outs[2]
        code, out, _ = run_cli(capsys, argv + ["--threads", "1"])
        assert out == outs[0]


class TestInstalledEntryPoint:
    def test_console_script_runs(self):
        proc = subprocess.run(
            [sys.executable, "-m", "connectgraph.cli", "verify", "--suite", "graph_core"],
            capture_output=True,
            text=True,
            timeout=120,
        )
        assert proc.returncode == 0, proc.stderr
        assert "0 failed" in proc.stdout

    def test_module_and_script_agree(self):
        argv = ["toy", "--rho", "0.7", "--alpha", "0.15", "--beta", "0.1", "--gamma", "0.05"]
        a = subprocess.run(
            [sys.executable, "-m", "connectgraph.cli", *argv],
            capture_output=True,
            timeout=120,
        )
        b = subprocess.run(
            [sys.executable, "-m", "connectgraph.cli", *argv],
            capture_output=True,
            timeout=120,
        )
        assert a.returncode == 0 and a.stdout == b.stdout
