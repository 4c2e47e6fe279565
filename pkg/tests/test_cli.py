from __future__ import annotations

import json

import numpy as np
import pytest

import tiltmedian as tm
from tiltmedian.cli import EXIT_CONFIG, EXIT_IO, EXIT_MEASURE, EXIT_OK, main, parse_measure


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_summary(stdout: str) -> tuple[float, float]:
    line = stdout.strip().splitlines()[-1]
    assert line.startswith("max|residual| = ")
    value_part, t_part = line.split(" at t = ")
    return float(value_part.removeprefix("max|residual| = ")), float(t_part)


def test_parse_measure_literals():
    assert parse_measure("gaussian(0,1)") == tm.Gaussian(0.0, 1.0)
    assert parse_measure(" perturbed_cosine( 0.5 )") == tm.PerturbedCosine(0.5)
    assert parse_measure("gaussian_mixture(0.5,-1,1,1,1)") == tm.GaussianMixture(
        0.5, -1.0, 1.0, 1.0, 1.0
    )
    assert parse_measure("tabulated(/tmp/g.txt)") == tm.Tabulated("/tmp/g.txt")


@pytest.mark.parametrize(
    "text",
    ["gaussian", "gaussian(1)", "gaussian(a,b)", "lognormal(0,1)", "gaussian(0,-1)", "tabulated()"],
)
def test_parse_measure_rejects(text):
    from tiltmedian.cli import ConfigError

    with pytest.raises(ConfigError):
        parse_measure(text)


def test_median_gap_command(tmp_path, capsys):
    out = tmp_path / "gap.csv"
    code, stdout, _ = run_cli(
        ["median-gap", "--measure", "gaussian(0,1)", "--out", str(out)], capsys
    )
    assert code == EXIT_OK
    max_abs, _ = parse_summary(stdout)
    assert max_abs <= 1e-8
    lines = out.read_text().splitlines()
    assert lines[0] == "t,residual,error_estimate"
    assert len(lines) == 50  # header + default 49-point grid
    first = lines[1].split(",")
    assert float(first[0]) == -6.0
    assert abs(float(first[1])) <= 1e-8


def test_byte_identical_reruns(tmp_path, capsys):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    base = ["median-gap", "--measure", "gaussian(0,1)", "--t-points", "9"]
    assert run_cli(base + ["--out", str(first)], capsys)[0] == EXIT_OK
    assert run_cli(base + ["--out", str(second)], capsys)[0] == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_json_round_trip(tmp_path, capsys):
    out = tmp_path / "gap.json"
    code, stdout, _ = run_cli(
        [
            "sign-kernel",
            "--measure", "perturbed_quadratic(1)",
            "--t-points", "5",
            "--t-min", "-2",
            "--t-max", "2",
            "--format", "json",
            "--out", str(out),
        ],
        capsys,
    )
    assert code == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["name"] == "sign_kernel"
    report = tm.scan(
        tm.build_measure(tm.PerturbedQuadratic(1.0)), "sign_kernel", np.linspace(-2.0, 2.0, 5)
    )
    assert payload["t_grid"] == list(report.t_grid)
    assert payload["residuals"] == list(report.residuals)
    assert payload["error_estimates"] == list(report.error_estimates)
    assert payload["summary"]["max_abs_residual"] == report.max_abs_residual
    assert payload["summary"]["argmax_t"] == report.argmax_t
    max_abs, argmax_t = parse_summary(stdout)
    assert max_abs == report.max_abs_residual
    assert argmax_t == report.argmax_t


def test_single_point_grid(tmp_path, capsys):
    out = tmp_path / "point.csv"
    code, stdout, _ = run_cli(
        [
            "median-gap",
            "--measure", "perturbed_quadratic(1)",
            "--t-min", "0", "--t-max", "0", "--t-points", "1",
            "--out", str(out),
        ],
        capsys,
    )
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    t_value, residual, _ = lines[1].split(",")
    assert float(t_value) == 0.0
    assert abs(float(residual)) <= 1e-8


def test_full_report(tmp_path, capsys):
    out = tmp_path / "full.json"
    code, _, _ = run_cli(
        [
            "full-report",
            "--measure", "perturbed_cosine(0.5)",
            "--t-points", "7",
            "--format", "json",
            "--out", str(out),
        ],
        capsys,
    )
    assert code == EXIT_OK
    payload = json.loads(out.read_text())
    assert sorted(payload) == ["deriva", "mean_median", "median_gap", "sign_kernel"]
    for name, report in payload.items():
        assert report["name"] == name
        assert len(report["residuals"]) == 7


def test_full_report_requires_json(tmp_path, capsys):
    code, _, err = run_cli(
        [
            "full-report",
            "--measure", "gaussian(0,1)",
            "--format", "csv",
            "--out", str(tmp_path / "x.csv"),
        ],
        capsys,
    )
    assert code == EXIT_CONFIG
    assert "json" in err


def test_choquet_iterate(tmp_path, capsys):
    out = tmp_path / "trace.csv"
    code, _, _ = run_cli(
        [
            "choquet-iterate",
            "--measure", "perturbed_cosine(0.5)",
            "--steps", "3",
            "--out", str(out),
        ],
        capsys,
    )
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "step,oscillation,window_lo,window_hi"
    rows = [line.split(",") for line in lines[1:]]
    assert [int(row[0]) for row in rows] == [1, 2, 3]
    oscillations = [float(row[1]) for row in rows]
    assert oscillations[0] > oscillations[1] > oscillations[2]
    lo_values = [float(row[2]) for row in rows]
    hi_values = [float(row[3]) for row in rows]
    assert lo_values[0] < lo_values[1] < lo_values[2]
    assert hi_values[0] > hi_values[1] > hi_values[2]


def test_symmetry_sweep(tmp_path, capsys):
    out = tmp_path / "sym.csv"
    code, stdout, _ = run_cli(
        [
            "symmetry-sweep",
            "--measure", "perturbed_quadratic(1)",
            "--t-min", "-2", "--t-max", "2", "--t-points", "5",
            "--out", str(out),
        ],
        capsys,
    )
    assert code == EXIT_OK
    max_abs, _ = parse_summary(stdout)
    assert max_abs > 1e-4
    lines = out.read_text().splitlines()
    assert lines[0] == "t,residual,error_estimate"
    assert len(lines) == 6


def test_lipschitz_command(tmp_path, capsys):
    out = tmp_path / "lip.csv"
    code, stdout, _ = run_cli(
        [
            "lipschitz",
            "--measure", "gaussian(0,1)",
            "--halfwidth", "1",
            "--out", str(out),
        ],
        capsys,
    )
    assert code == EXIT_OK
    bound, halfwidth = parse_summary(stdout)
    assert halfwidth == 1.0
    assert abs(bound - 11.951010743549277) <= 1e-6
    lines = out.read_text().splitlines()
    assert lines[0] == "halfwidth,bound"
    assert float(lines[1].split(",")[1]) == bound


def test_config_file_with_flag_override(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(
        json.dumps(
            {
                "measure": "gaussian(0,1)",
                "t_min": -2,
                "t_max": 2,
                "t_points": 5,
                "out": str(tmp_path / "from_config.csv"),
                "quadrature": {"rel_tol": 1e-9},
            }
        )
    )
    override = tmp_path / "override.csv"
    code, _, _ = run_cli(
        ["median-gap", "--config", str(config), "--out", str(override), "--t-points", "3"],
        capsys,
    )
    assert code == EXIT_OK
    assert override.exists()
    assert not (tmp_path / "from_config.csv").exists()
    assert len(override.read_text().splitlines()) == 4  # header + 3 overridden points


def test_tabulated_measure_via_cli(tmp_path, capsys):
    table = tmp_path / "ratio.txt"
    xs = np.linspace(-6.0, 6.0, 101)
    table.write_text("\n".join(f"{x} {1.0 + 0.25 * np.cos(x)}" for x in xs) + "\n")
    out = tmp_path / "tab.csv"
    code, _, _ = run_cli(
        [
            "sign-kernel",
            "--measure", f"tabulated({table})",
            "--t-min", "-1", "--t-max", "1", "--t-points", "3",
            "--out", str(out),
        ],
        capsys,
    )
    assert code == EXIT_OK
    assert len(out.read_text().splitlines()) == 4


def test_exit_code_bad_measure(tmp_path, capsys):
    code, _, err = run_cli(
        ["median-gap", "--measure", "gaussian(oops)", "--out", str(tmp_path / "x.csv")], capsys
    )
    assert code == EXIT_CONFIG
    assert err


def test_exit_code_measure_build_failure(tmp_path, capsys):
    code, _, err = run_cli(
        ["median-gap", "--measure", "perturbed_cosine(1.5)", "--out", str(tmp_path / "x.csv")],
        capsys,
    )
    assert code == EXIT_MEASURE
    assert "measure" in err


def test_exit_code_unwritable_output(tmp_path, capsys):
    code, _, _ = run_cli(
        [
            "median-gap",
            "--measure", "gaussian(0,1)",
            "--t-points", "1", "--t-min", "0", "--t-max", "0",
            "--out", str(tmp_path / "missing_dir" / "x.csv"),
        ],
        capsys,
    )
    assert code == EXIT_IO


def test_exit_code_missing_required(tmp_path, capsys):
    code, _, err = run_cli(["median-gap", "--out", str(tmp_path / "x.csv")], capsys)
    assert code == EXIT_CONFIG
    assert "measure" in err
    code, _, err = run_cli(["median-gap", "--measure", "gaussian(0,1)"], capsys)
    assert code == EXIT_CONFIG
    assert "output" in err


def test_exit_code_unknown_command(capsys):
    code = main(["spectral-gap"])
    capsys.readouterr()
    assert code == EXIT_CONFIG


def test_exit_code_malformed_config(tmp_path, capsys):
    config = tmp_path / "broken.json"
    config.write_text("{not json")
    code, _, err = run_cli(
        ["median-gap", "--config", str(config), "--out", str(tmp_path / "x.csv")], capsys
    )
    assert code == EXIT_CONFIG
    assert "config" in err


def test_exit_code_unknown_config_key(tmp_path, capsys):
    config = tmp_path / "extra.json"
    config.write_text(json.dumps({"measure": "gaussian(0,1)", "colour": "red"}))
    code, _, err = run_cli(
        ["median-gap", "--config", str(config), "--out", str(tmp_path / "x.csv")], capsys
    )
    assert code == EXIT_CONFIG
    assert "colour" in err


def test_json_determinism_full_report(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    base = [
        "full-report",
        "--measure", "gaussian_mixture(0.5,-1,1,1,1)",
        "--t-points", "3", "--t-min", "-1", "--t-max", "1",
        "--format", "json",
    ]
    assert run_cli(base + ["--out", str(a)], capsys)[0] == EXIT_OK
    assert run_cli(base + ["--out", str(b)], capsys)[0] == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
