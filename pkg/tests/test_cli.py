"""CLI surface: formats, exit codes, cache wiring, determinism."""

import json
import subprocess
import sys

import pytest

from sigmalab.cli import main


def run_cli(argv, capsys):
    rc = main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


class TestBasics:
    def test_factor(self, capsys):
        rc, out, _ = run_cli(["factor", "16105"], capsys)
        assert rc == 0
        assert out == "16105 = 5 * 3221\n"

    def test_sigma_iterate(self, capsys):
        rc, out, _ = run_cli(["sigma", "6", "--iterate", "2"], capsys)
        assert rc == 0
        assert "k=0  value=6  residue=0" in out
        assert "k=2  value=28  residue=4" in out

    def test_aliquot(self, capsys):
        rc, out, _ = run_cli(["aliquot", "220", "--k-max", "10"], capsys)
        assert rc == 0
        assert "status: CYCLE(2)" in out

    def test_lenstra(self, capsys):
        rc, out, _ = run_cli(["lenstra", "--k", "1", "--m-max", "11"], capsys)
        assert rc == 0
        assert "smallest_m=NONE" in out


class TestExitCodes:
    def test_usage_error_is_64(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["ctr-scan"])  # missing --to
        assert exc.value.code == 64

    def test_unknown_subcommand_is_64(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 64

    def test_tiny_budget_gives_2(self, capsys):
        rc, out, _ = run_cli(
            ["ctr-scan", "--to", "20", "--budget-work", "1", "--jobs", "1"], capsys
        )
        assert rc == 2
        assert "UNRESOLVED_BUDGET" in out

    def test_no_k_within_horizon_gives_1(self, capsys):
        # smallest k for 67 is 101, so a 100-step horizon is a reportable finding
        rc, out, _ = run_cli(
            ["ctr-scan", "--from", "67", "--to", "67", "--k-max", "100", "--jobs", "1"],
            capsys,
        )
        assert rc == 1
        assert "NO_K_WITHIN_HORIZON" in out

    def test_powersum_grid_ok_gives_0(self, capsys):
        rc, _, _ = run_cli(
            ["powersum-check", "--p-max", "12", "--e-max", "3", "--k-max", "8"], capsys
        )
        assert rc == 0


class TestFormats:
    def test_ctr_scan_defaults_to_csv(self, capsys):
        rc, out, _ = run_cli(["ctr-scan", "--to", "6", "--jobs", "1"], capsys)
        assert rc == 0
        lines = out.splitlines()
        assert lines[0] == "n,smallest_k,status"
        assert lines[1] == "2,2,RESOLVED"
        assert len(lines) == 6  # header + n in 2..6

    def test_json_lines(self, capsys):
        rc, out, _ = run_cli(["mp-scan", "--limit", "500", "--format", "json"], capsys)
        assert rc == 0
        records = [json.loads(line) for line in out.splitlines()]
        assert [r["n"] for r in records] == [6, 28, 120, 496]
        assert records[0]["factorization"] == {"value": 6, "parts": [[2, 1], [3, 1]]}

    def test_csv_rejected_where_shapeless(self, capsys):
        rc, _, err = run_cli(["periodicity", "4", "--format", "csv"], capsys)
        assert rc == 64
        assert "no CSV shape" in err

    def test_out_file(self, tmp_path, capsys):
        out_path = tmp_path / "table.csv"
        rc, out, _ = run_cli(
            ["ctr-scan", "--to", "10", "--jobs", "1", "--out", str(out_path)], capsys
        )
        assert rc == 0
        assert out == ""
        assert out_path.read_text().startswith("n,smallest_k,status\n")


class TestCache:
    def test_cache_file_grows_and_is_reused(self, tmp_path, capsys):
        cache = tmp_path / "factors.cache"
        rc, _, _ = run_cli(["factor", "16105", "--cache", str(cache)], capsys)
        assert rc == 0
        body = cache.read_text()
        assert "16105 5^1 3221^1\n" in body
        rc, out, _ = run_cli(["factor", "16105", "--cache", str(cache)], capsys)
        assert rc == 0 and "5 * 3221" in out

    def test_env_var_default(self, tmp_path, capsys, monkeypatch):
        cache = tmp_path / "env.cache"
        monkeypatch.setenv("SIGMA_LAB_CACHE", str(cache))
        rc, _, _ = run_cli(["factor", "12"], capsys)
        assert rc == 0
        assert cache.exists()


class TestVerifyAll:
    def test_list_claims(self, capsys):
        rc, out, _ = run_cli(["verify-all", "--list-claims"], capsys)
        assert rc == 0
        assert "odd-k-disambiguation" in out.split()

    def test_single_claim_finding_exit_zero(self, capsys):
        rc, out, _ = run_cli(
            ["verify-all", "--claim", "odd-k-disambiguation", "--format", "json"],
            capsys,
        )
        assert rc == 0
        (record,) = [json.loads(line) for line in out.splitlines()]
        assert record["status"] == "FINDING"
        assert "power sum" in record["detail"] or "power-sum" in record["detail"]

    def test_unknown_claim_is_usage_error(self, capsys):
        rc, _, err = run_cli(["verify-all", "--claim", "no-such-claim"], capsys)
        assert rc == 64

    def test_quick_claims_pass(self, capsys):
        rc, out, _ = run_cli(
            [
                "verify-all",
                "--claim", "lenstra-chains",
                "--claim", "quintuple-perfect-example",
                "--mp-limit", "10000",
            ],
            capsys,
        )
        assert rc == 0
        claim_lines = [l for l in out.splitlines() if not l.startswith("--")]
        assert len(claim_lines) == 2
        assert all(l.startswith("PASS") for l in claim_lines)


SUBCOMMAND_SAMPLES = [
    ["factor", "360"],
    ["sigma", "6", "--iterate", "2"],
    ["aliquot", "12", "--k-max", "10"],
    ["ctr-scan", "--to", "8", "--jobs", "1"],
    ["meta-scan", "--limit", "500", "--k-max", "5"],
    ["mp-scan", "--limit", "500"],
    ["lprime", "--limit", "500"],
    ["periodicity", "4"],
    ["powersum-check", "--p-max", "6", "--e-max", "2", "--k-max", "4"],
    ["lenstra", "--k", "1", "--m-max", "20"],
    ["erdos-sample", "--k", "2", "--delta", "1/2", "--to", "200"],
    ["conjecture-scan", "--limit", "500"],
    ["verify-all", "--claim", "lenstra-chains", "--mp-limit", "1000"],
]


@pytest.mark.parametrize("argv", SUBCOMMAND_SAMPLES, ids=lambda a: a[0])
def test_every_subcommand_honors_json(argv, capsys):
    rc = main(argv + ["--format", "json"])
    out = capsys.readouterr().out
    assert rc in (0, 1)
    for line in out.splitlines():
        json.loads(line)


class TestDeterminism:
    def test_repeat_runs_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            rc, _, _ = run_cli(
                ["ctr-scan", "--to", "60", "--jobs", "2", "--out", str(path)], capsys
            )
            assert rc == 0
        assert a.read_bytes() == b.read_bytes()


def test_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "sigmalab.cli", "--version"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "sigma-lab" in proc.stdout
