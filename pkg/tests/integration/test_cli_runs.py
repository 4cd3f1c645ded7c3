""" command line runs end to end
"""
import csv
import io

import pytest


def _csv_rows(text: bytes):
    return list(csv.reader(io.StringIO(text.decode("utf-8"), newline="")))


def test_empty_suite_list(lab) -> None:
    """no suites, a manifest without checks, exit 0"""
    result = lab.run(["all", "--suites", ""])
    assert result.exit_code == 0
    manifest = result.manifest
    assert not manifest.suites
    assert manifest.seed == 0
    assert manifest.config["suites"] == []


@pytest.mark.parametrize(
    "cmdline",
    [["osc-check", "--go", "2"], ["all", "--suites", "spectrum"], ["osc-check", "-j", "0"]],
    ids=["grid order too small", "unknown suite", "no workers"],
)
def test_config_errors_exit_with_2(lab, cmdline) -> None:
    """nothing is written when the configuration is rejected"""
    result = lab.run(cmdline)
    assert result.exit_code == 2
    assert "[ERROR]" in result.stderr


def test_reduced_osc_check(lab_config) -> None:
    """one family from the config file, rows in the csv and the manifest"""
    result = lab_config.run(["osc-check"])
    assert result.exit_code in (0, 1)
    manifest = result.manifest
    assert manifest.seed == 1234
    assert manifest.grid_orders == []
    ids = [row.check_id for row in manifest.suites["osc-check"]]
    assert ids == ["J.decay-gaussian", "J.small-a-alpha-0.9"]

    rows = _csv_rows(result.read("osc-check.csv"))
    assert rows[0] == ["check_id", "inputs", "measured", "target", "status"]
    assert [row[0] for row in rows[1:]] == ids
    assert "osc-check: " in result.stdout


def test_deterministic_runs_are_byte_identical(lab_config) -> None:
    """same seed and config, same bytes"""
    first = lab_config.run(["osc-check", "--deterministic", "true"])
    files = {name: first.read(name) for name in ("manifest.json", "osc-check.csv", "summary.md")}
    second = lab_config.run(["osc-check", "--deterministic", "true"])
    assert {name: second.read(name) for name in files} == files


def test_seed_reaches_the_random_samples(lab_config) -> None:
    """the connection samples depend on the seed"""
    first = lab_config.run(["spectrum-scan", "--seed", "1", "--deterministic", "true"], "one")
    second = lab_config.run(["spectrum-scan", "--seed", "2", "--deterministic", "true"], "two")
    connection = [
        [row for row in run.manifest.suites["spectrum-scan"] if row.check_id == "D.connection"][0]
        for run in (first, second)
    ]
    assert connection[0].inputs == connection[1].inputs
    assert first.read("spectrum-scan.csv") != second.read("spectrum-scan.csv")


@pytest.mark.slow
def test_spectrum_scan_default(lab) -> None:
    """one zero at lambda = 1 and the hypergeometric identities"""
    result = lab.run(["spectrum-scan"])
    assert result.exit_code == 0
    rows = {row.check_id: row for row in result.manifest.suites["spectrum-scan"]}
    assert rows["A.zero-count"].measured == 1
    assert rows["A.spectrum"].measured < 1e-6
    assert all(row.status == "pass" for row in rows.values())


@pytest.mark.slow
def test_stability_sweep_two_deltas(lab) -> None:
    """two tuned runs, their ratio and the sweep columns"""
    result = lab.run(["stability-sweep", "--delta", "1e-2,5e-3"])
    rows = {row.check_id: row for row in result.manifest.suites["stability-sweep"]}
    assert {"K.delta-0.01", "K.delta-0.005", "K.ratio-0.01-0.005"} <= set(rows)
    assert 0.9 <= rows["K.delta-0.01"].measured <= 1.1
    ratio = rows["K.ratio-0.01-0.005"]
    assert ratio.status == "pass"
    assert 2.5 <= ratio.measured <= 6.0
    for delta in ("0.01", "0.005"):
        detune = rows[f"K.detune-{delta}"]
        assert detune.status == "pass"
        assert detune.measured >= 10

    header = _csv_rows(result.read("stability-sweep.csv"))[0]
    assert header[-4:] == ["delta", "T_star", "strichartz_integral", "ratio"]
    assert result.exit_code == result.manifest.exit_code


@pytest.mark.slow
def test_all_suites_default(lab) -> None:
    """every check at the default resolution"""
    result = lab.run(["all"])
    manifest = result.manifest
    assert sorted(manifest.suites) == sorted(manifest.config["suites"])
    failed = [(row.check_id, row.measured) for row in manifest.failed]
    assert not failed
    assert result.exit_code == 0
