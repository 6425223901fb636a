import json
import math

import pytest

from itereq.cli import main

SQRT2 = math.sqrt(2.0)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def test_analyze_3_1(capsys):
    code, out, _ = run_cli(capsys, "analyze", "--n", "3", "--k", "1")
    assert code == 0
    assert "case C5" in out
    assert "0.4142135623" in out
    assert "-2.4142135623" in out


def test_analyze_4_2_double_root(capsys):
    code, out, _ = run_cli(capsys, "analyze", "--n", "4", "--k", "2", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["case_label"] == "C8"
    assert payload["matched"] is True
    ones = [r for r in payload["real_roots"] if r["value"] == 1.0]
    assert ones[0]["multiplicity"] == 2
    assert payload["modulus_separation_min_gap"] == "not_applicable"


def test_analyze_rejects_small_n(capsys):
    code, _, err = run_cli(capsys, "analyze", "--n", "1", "--k", "0")
    assert code == 2
    assert "n must be" in err


def test_analyze_unknown_flag_is_an_error(capsys):
    code = main(["analyze", "--n", "3", "--k", "1", "--frobnicate"])
    assert code == 2


def test_analyze_json_is_deterministic(capsys):
    _, out1, _ = run_cli(capsys, "analyze", "--n", "5", "--k", "2", "--json")
    _, out2, _ = run_cli(capsys, "analyze", "--n", "5", "--k", "2", "--json")
    assert out1 == out2


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def test_solve_translation_family(capsys):
    code, out, _ = run_cli(
        capsys, "solve", "--n", "6", "--k", "3",
        "--interval", "(-inf,inf)", "--params", "c=1", "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["status"] == "ok"
    spec = payload["solutions"][0]
    assert spec["family"] == "translation"
    assert spec["params"]["c"] == 1.0


def test_solve_three_piece_slope(capsys):
    code, out, _ = run_cli(
        capsys, "solve", "--n", "4", "--k", "1",
        "--interval", "(-inf,inf)", "--params", "a=0,b=1", "--json",
    )
    assert code == 0
    spec = json.loads(out)["solutions"][0]
    assert spec["family"] == "three_piece"
    assert spec["params"]["a"] == 0.0
    assert spec["params"]["b"] == 1.0
    assert spec["params"]["slope"] == pytest.approx(0.27568220365098495, abs=1e-9)


def test_solve_open_problem_exit_3(capsys):
    code, out, _ = run_cli(
        capsys, "solve", "--n", "4", "--k", "2", "--interval", "(-inf,inf)",
        "--json",
    )
    assert code == 3
    assert json.loads(out) == {"status": "open_problem"}


def test_solve_two_families_for_odd_odd(capsys):
    code, out, _ = run_cli(
        capsys, "solve", "--n", "3", "--k", "1", "--interval", "(-inf,inf)",
        "--json",
    )
    assert code == 0
    families = [s["family"] for s in json.loads(out)["solutions"]]
    assert families == ["affine", "three_piece"]


def test_solve_interval_syntax(capsys):
    code, out, _ = run_cli(
        capsys, "solve", "--n", "2", "--k", "0", "--interval", "[0,1)", "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert [s["family"] for s in payload["solutions"]] == ["identity"]
    dom = payload["solutions"][0]["domain"]
    assert dom == {"lo": 0.0, "hi": 1.0, "lo_closed": True, "hi_closed": False}


def test_solve_bad_interval_rejected(capsys):
    code, _, err = run_cli(
        capsys, "solve", "--n", "2", "--k", "0", "--interval", "zap",
    )
    assert code == 2
    assert "interval" in err


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def write_spec(tmp_path, spec):
    path = tmp_path / "solution.json"
    path.write_text(json.dumps(spec))
    return str(path)


REAL_LINE_JSON = {
    "lo": "-inf", "hi": "+inf", "lo_closed": False, "hi_closed": False,
}


def test_verify_three_piece_passes(tmp_path, capsys):
    spec = {
        "family": "three_piece",
        "params": {"a": 0.0, "b": 1.0, "slope": 0.27568220365098495},
        "domain": REAL_LINE_JSON,
    }
    code, out, _ = run_cli(
        capsys, "verify", "--n", "4", "--k", "1",
        "--solution", write_spec(tmp_path, spec),
    )
    assert code == 0
    report = json.loads(out)
    assert report["pass"] is True
    assert report["points_evaluated"] == 1001
    assert set(report) == {
        "max_residual", "pass", "points_evaluated", "points_escaped",
    }


def test_verify_affine_against_k0(tmp_path, capsys):
    spec = {
        "family": "affine",
        "params": {"slope": -2.0, "c": 5.0},
        "domain": REAL_LINE_JSON,
    }
    code, out, _ = run_cli(
        capsys, "verify", "--n", "2", "--k", "0",
        "--solution", write_spec(tmp_path, spec),
    )
    assert code == 0
    assert json.loads(out)["pass"] is True


def test_verify_identity_zero_residual(tmp_path, capsys):
    spec = {"family": "identity", "params": {}, "domain": REAL_LINE_JSON}
    code, out, _ = run_cli(
        capsys, "verify", "--n", "7", "--k", "3",
        "--solution", write_spec(tmp_path, spec),
    )
    assert code == 0
    assert json.loads(out)["max_residual"] == 0.0


def test_verify_wrong_solution_exit_1(tmp_path, capsys):
    spec = {
        "family": "affine",
        "params": {"slope": -2.0, "c": 5.0},
        "domain": REAL_LINE_JSON,
    }
    code, out, _ = run_cli(
        capsys, "verify", "--n", "3", "--k", "1",
        "--solution", write_spec(tmp_path, spec),
    )
    assert code == 1
    assert json.loads(out)["pass"] is False


def test_verify_generator_flag(tmp_path, capsys):
    spec = {
        "family": "conjugate",
        "params": {
            "generator": {"kind": "log"},
            "inner": {
                "family": "affine",
                "params": {"slope": -0.5, "c": math.log(2.0)},
                "domain": {
                    "lo": 0.0, "hi": math.log(4.0),
                    "lo_closed": True, "hi_closed": True,
                },
            },
        },
        "domain": {"lo": 1.0, "hi": 4.0, "lo_closed": True, "hi_closed": True},
    }
    code, out, _ = run_cli(
        capsys, "verify", "--n", "2", "--k", "2",
        "--solution", write_spec(tmp_path, spec), "--generator", "log",
    )
    assert code == 0
    assert json.loads(out)["pass"] is True


def test_verify_missing_file_exit_2(tmp_path, capsys):
    code, _, err = run_cli(
        capsys, "verify", "--n", "2", "--k", "0",
        "--solution", str(tmp_path / "missing.json"),
    )
    assert code == 2


# ---------------------------------------------------------------------------
# orbit
# ---------------------------------------------------------------------------


def test_orbit_identity(tmp_path, capsys):
    spec = {"family": "identity", "params": {}, "domain": REAL_LINE_JSON}
    code, out, _ = run_cli(
        capsys, "orbit", "--solution", write_spec(tmp_path, spec),
        "--x0", "1", "--steps", "3",
    )
    assert code == 0
    assert out.splitlines() == ["m,x_m", "0,1.0", "1,1.0", "2,1.0", "3,1.0"]


def test_orbit_affine_powers(tmp_path, capsys):
    spec = {
        "family": "affine",
        "params": {"slope": -2.0, "c": 0.0},
        "domain": REAL_LINE_JSON,
    }
    code, out, _ = run_cli(
        capsys, "orbit", "--solution", write_spec(tmp_path, spec),
        "--x0", "1", "--steps", "3",
    )
    assert code == 0
    values = [line.split(",")[1] for line in out.splitlines()[1:]]
    assert values == ["1.0", "-2.0", "4.0", "-8.0"]


def test_orbit_backward_translation(tmp_path, capsys):
    spec = {
        "family": "translation",
        "params": {"c": 0.5},
        "domain": REAL_LINE_JSON,
    }
    code, out, _ = run_cli(
        capsys, "orbit", "--solution", write_spec(tmp_path, spec),
        "--x0", "0", "--steps", "2", "--back", "2",
    )
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[1:]]
    assert [r[0] for r in rows] == ["-2", "-1", "0", "1", "2"]
    assert [float(r[1]) for r in rows] == [-1.0, -0.5, 0.0, 0.5, 1.0]


def test_orbit_to_csv_file(tmp_path, capsys):
    spec = {"family": "identity", "params": {}, "domain": REAL_LINE_JSON}
    target = tmp_path / "orbit.csv"
    code, out, _ = run_cli(
        capsys, "orbit", "--solution", write_spec(tmp_path, spec),
        "--x0", "2", "--steps", "2", "--csv", str(target),
    )
    assert code == 0
    assert target.read_text().startswith("m,x_m\n")


def test_orbit_domain_violation_exit_2(tmp_path, capsys):
    spec = {
        "family": "identity",
        "params": {},
        "domain": {"lo": 0.0, "hi": 1.0, "lo_closed": True, "hi_closed": True},
    }
    code, _, err = run_cli(
        capsys, "orbit", "--solution", write_spec(tmp_path, spec),
        "--x0", "5", "--steps", "3",
    )
    assert code == 2


# ---------------------------------------------------------------------------
# fit-recurrence
# ---------------------------------------------------------------------------


def _write_orbit_csv(tmp_path, values, start=0):
    path = tmp_path / "orbit.csv"
    lines = ["m,x_m"] + [f"{start + i},{v!r}" for i, v in enumerate(values)]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def test_fit_recurrence_power_orbit(tmp_path, capsys):
    values = [(-2.0) ** m for m in range(12)]
    code, out, _ = run_cli(
        capsys, "fit-recurrence", "--n", "2", "--k", "0",
        "--orbit", _write_orbit_csv(tmp_path, values), "--json",
    )
    assert code == 0
    payload = json.loads(out)
    weights = {
        round(t["lambda"], 6): t["coeffs"][0] for t in payload["real_terms"]
    }
    assert weights[-2.0] == pytest.approx(1.0, abs=1e-10)
    assert weights[1.0] == pytest.approx(0.0, abs=1e-10)
    assert payload["held_out_max_relative_error"] <= 1e-6


def test_fit_recurrence_arithmetic_progression(tmp_path, capsys):
    values = [0.5 * m for m in range(10)]
    code, out, _ = run_cli(
        capsys, "fit-recurrence", "--n", "2", "--k", "1",
        "--orbit", _write_orbit_csv(tmp_path, values), "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["real_terms"][0]["coeffs"][1] == pytest.approx(0.5, abs=1e-10)


def test_fit_recurrence_constant_orbit(tmp_path, capsys):
    code, out, _ = run_cli(
        capsys, "fit-recurrence", "--n", "2", "--k", "0",
        "--orbit", _write_orbit_csv(tmp_path, [3.0] * 8), "--json",
    )
    assert code == 0
    payload = json.loads(out)
    weights = {
        round(t["lambda"], 6): t["coeffs"][0] for t in payload["real_terms"]
    }
    assert weights[1.0] == pytest.approx(3.0, abs=1e-12)


def test_fit_recurrence_reindexes_negative_start(tmp_path, capsys):
    # rows may start at any index; the recurrence is shift invariant
    values = [(-2.0) ** m for m in range(-3, 9)]
    code, out, _ = run_cli(
        capsys, "fit-recurrence", "--n", "2", "--k", "0",
        "--orbit", _write_orbit_csv(tmp_path, values, start=-3), "--json",
    )
    assert code == 0
    assert json.loads(out)["held_out_max_relative_error"] <= 1e-6


def test_solve_rejects_unknown_parameter(tmp_path, capsys):
    code, _, err = run_cli(
        capsys, "solve", "--n", "6", "--k", "3",
        "--interval", "(-inf,inf)", "--params", "zz=1",
    )
    assert code == 2
    assert "unknown parameter" in err


def test_fit_recurrence_short_orbit_exit_2(tmp_path, capsys):
    code, _, err = run_cli(
        capsys, "fit-recurrence", "--n", "4", "--k", "1",
        "--orbit", _write_orbit_csv(tmp_path, [1.0, 2.0, 3.0]),
    )
    assert code == 2


def test_fit_recurrence_prediction_failure_exit_1(tmp_path, capsys):
    # not a recurrence orbit of (2, 0): held-out error is large
    values = [1.0, 2.0, 3.0, 5.0, 8.0, 13.0, 21.0]
    code, out, _ = run_cli(
        capsys, "fit-recurrence", "--n", "2", "--k", "0",
        "--orbit", _write_orbit_csv(tmp_path, values),
    )
    assert code == 1


def test_solve_human_readable_output(capsys):
    code, out, _ = run_cli(
        capsys, "solve", "--n", "3", "--k", "1", "--interval", "(-inf,inf)",
    )
    assert code == 0
    assert "affine" in out and "three_piece" in out
    assert "spec:" in out


def test_verify_samples_and_tol_flags(tmp_path, capsys):
    spec = {"family": "identity", "params": {}, "domain": REAL_LINE_JSON}
    code, out, _ = run_cli(
        capsys, "verify", "--n", "4", "--k", "2",
        "--solution", write_spec(tmp_path, spec),
        "--samples", "101", "--tol", "1e-12",
    )
    assert code == 0
    assert json.loads(out)["points_evaluated"] == 101


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------


def test_selftest_runs_clean(capsys):
    code, out, _ = run_cli(capsys, "selftest")
    assert code == 0
    lines = [line for line in out.splitlines() if line.startswith("[")]
    assert len(lines) == 10
    assert all(line.startswith("[PASS]") for line in lines)
