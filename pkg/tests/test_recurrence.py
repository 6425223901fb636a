import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from itereq.charpoly import CharProblem, analyze_roots, build_char_poly
from itereq.errors import DomainError, SingularSystem, TooShort
from itereq.families import Affine, ThreePiece, Translation
from itereq.intervals import REAL_LINE
from itereq.recurrence import (
    check_recurrence,
    fit_closed_form,
    predict,
    prediction_error,
    single_regime,
)
from itereq.verify import Orbit, iterate


def orbit_from_values(values):
    vals = np.asarray(values, dtype=float)
    return Orbit(float(vals[0]), 0, len(vals) - 1, vals)


# ---------------------------------------------------------------------------
# check_recurrence
# ---------------------------------------------------------------------------


def test_arithmetic_progression_satisfies_double_root_recurrence():
    orbit = iterate(Translation(REAL_LINE, 1.0), 0.0, 0, 12)
    report = check_recurrence(orbit, build_char_poly(CharProblem(2, 1)))
    assert report.passed
    assert report.max_residual <= 1e-12


def test_power_orbit_satisfies_k0_recurrence():
    orbit = iterate(Affine(REAL_LINE, -2.0, 0.0), 1.0, 0, 12)
    report = check_recurrence(orbit, build_char_poly(CharProblem(2, 0)))
    assert report.passed
    assert report.max_residual <= 1e-9


def test_single_branch_three_piece_orbit_satisfies_recurrence():
    slope = analyze_roots(CharProblem(4, 1)).real_root_in(0.0, 1.0)
    sol = ThreePiece(REAL_LINE, 0.0, 1.0, slope)
    orbit = iterate(sol, -4.0, 0, 20)
    report = check_recurrence(orbit, build_char_poly(CharProblem(4, 1)))
    assert report.passed


def test_recurrence_too_short():
    with pytest.raises(TooShort):
        check_recurrence(
            orbit_from_values([1.0, 2.0]), build_char_poly(CharProblem(3, 1))
        )


def test_recurrence_detects_non_solution():
    orbit = orbit_from_values([1.0, 2.0, 4.5, 8.0, 16.0, 32.0])
    report = check_recurrence(orbit, build_char_poly(CharProblem(2, 1)))
    assert not report.passed


# ---------------------------------------------------------------------------
# fit_closed_form
# ---------------------------------------------------------------------------


def test_fit_pure_power_orbit():
    # orbit (1, -2, 4, -8, ...) over the spectrum {1, -2}: all weight on -2
    orbit = iterate(Affine(REAL_LINE, -2.0, 0.0), 1.0, 0, 10)
    spectrum = analyze_roots(CharProblem(2, 0))
    cf = fit_closed_form(orbit, spectrum)
    weights = {round(t.lam, 6): t.coeffs[0] for t in cf.real_terms}
    assert weights[1.0] == pytest.approx(0.0, abs=1e-12)
    assert weights[-2.0] == pytest.approx(1.0, abs=1e-12)


def test_fit_arithmetic_progression_double_root():
    # x_j = 0.5 j: linear polynomial on the double root 1
    orbit = iterate(Translation(REAL_LINE, 0.5), 0.0, 0, 10)
    spectrum = analyze_roots(CharProblem(2, 1))
    cf = fit_closed_form(orbit, spectrum)
    assert len(cf.real_terms) == 1
    coeffs = cf.real_terms[0].coeffs
    assert coeffs[0] == pytest.approx(0.0, abs=1e-12)
    assert coeffs[1] == pytest.approx(0.5, abs=1e-12)


def test_fit_constant_orbit():
    orbit = orbit_from_values([3.0] * 8)
    spectrum = analyze_roots(CharProblem(2, 0))
    cf = fit_closed_form(orbit, spectrum)
    weights = {round(t.lam, 6): t.coeffs[0] for t in cf.real_terms}
    assert weights[1.0] == pytest.approx(3.0, abs=1e-12)
    assert weights[-2.0] == pytest.approx(0.0, abs=1e-12)


def test_fit_reproduces_anchors_exactly():
    slope = analyze_roots(CharProblem(4, 1)).real_root_in(0.0, 1.0)
    sol = ThreePiece(REAL_LINE, 0.0, 1.0, slope)
    orbit = iterate(sol, -1.0, 0, 30)
    spectrum = analyze_roots(CharProblem(4, 1))
    cf = fit_closed_form(orbit, spectrum, regime_of=sol)
    for j in range(4):
        assert predict(cf, j) == pytest.approx(orbit.value(j), abs=1e-10)


def test_fit_predicts_iterated_values():
    slope = analyze_roots(CharProblem(4, 1)).real_root_in(0.0, 1.0)
    sol = ThreePiece(REAL_LINE, 0.0, 1.0, slope)
    orbit = iterate(sol, -1.0, 0, 30)
    spectrum = analyze_roots(CharProblem(4, 1))
    cf = fit_closed_form(orbit, spectrum, regime_of=sol)
    assert prediction_error(cf, orbit, 4, 30) <= 1e-6


def test_fit_requires_enough_values():
    with pytest.raises(TooShort):
        fit_closed_form(
            orbit_from_values([1.0, 2.0]), analyze_roots(CharProblem(4, 1))
        )


def test_fit_refuses_branch_crossing_orbit():
    # constructed orbits never cross (the anchors are fixed points), but
    # external orbit data can straddle the regimes and must be refused
    slope = analyze_roots(CharProblem(4, 1)).real_root_in(0.0, 1.0)
    sol = ThreePiece(REAL_LINE, 0.0, 1.0, slope)
    straddling = orbit_from_values([-1.0, 0.5, 2.0, 3.0, 4.0])
    assert not single_regime(sol, straddling)
    with pytest.raises(DomainError):
        fit_closed_form(
            straddling, analyze_roots(CharProblem(4, 1)), regime_of=sol
        )


def test_constructed_three_piece_orbits_stay_single_regime():
    slope = analyze_roots(CharProblem(4, 1)).real_root_in(0.0, 1.0)
    sol = ThreePiece(REAL_LINE, 0.0, 1.0, slope)
    for x0 in (-3.0, 0.5, 5.0):
        assert single_regime(sol, iterate(sol, x0, 0, 30))


def test_single_regime_certificates():
    slope = analyze_roots(CharProblem(4, 1)).real_root_in(0.0, 1.0)
    sol = ThreePiece(REAL_LINE, 0.0, 1.0, slope)
    below = iterate(sol, -2.0, 0, 20)
    inside = iterate(sol, 0.5, 0, 20)
    assert single_regime(sol, below)
    assert single_regime(sol, inside)
    # non-piecewise families always certify
    assert single_regime(Affine(REAL_LINE, -2.0, 0.0), below)


def test_fit_singular_for_repeated_spectrum_entry():
    # a spectrum whose parameter count disagrees with the degree is refused
    spectrum = analyze_roots(CharProblem(2, 0))
    orbit = orbit_from_values([1.0, 2.0, 3.0, 4.0])
    bad = spectrum.__class__(
        problem=CharProblem(3, 1),
        real_roots=spectrum.real_roots,  # only 2 parameters for degree 3
        complex_roots=(),
        bound_2n1_ok=True,
        modulus_separation_min_gap=None,
    )
    with pytest.raises(SingularSystem):
        fit_closed_form(orbit, bad)


# ---------------------------------------------------------------------------
# predict
# ---------------------------------------------------------------------------


def test_predict_pure_power():
    orbit = iterate(Affine(REAL_LINE, -2.0, 0.0), 1.0, 0, 10)
    cf = fit_closed_form(orbit, analyze_roots(CharProblem(2, 0)))
    assert predict(cf, 5) == pytest.approx(-32.0, rel=1e-12)


def test_predict_linear_double_root_term():
    orbit = iterate(Translation(REAL_LINE, 0.5), 0.0, 0, 10)
    cf = fit_closed_form(orbit, analyze_roots(CharProblem(2, 1)))
    assert predict(cf, 10) == pytest.approx(5.0, rel=1e-12)


def test_predict_matches_long_iteration():
    slope = analyze_roots(CharProblem(3, 1)).real_root_in(0.0, 1.0)
    sol = ThreePiece(REAL_LINE, 0.0, 1.0, slope)
    orbit = iterate(sol, -1.0, 0, 20)
    cf = fit_closed_form(orbit, analyze_roots(CharProblem(3, 1)), regime_of=sol)
    assert predict(cf, 20) == pytest.approx(orbit.value(20), rel=1e-6, abs=1e-9)


def test_closed_form_json_shape():
    orbit = iterate(Affine(REAL_LINE, -2.0, 0.0), 1.0, 0, 10)
    cf = fit_closed_form(orbit, analyze_roots(CharProblem(2, 0)))
    payload = cf.to_json()
    assert set(payload) == {"real_terms", "complex_terms"}
    assert {"lambda", "coeffs"} == set(payload["real_terms"][0])
    cf41 = fit_closed_form(
        iterate(Affine(REAL_LINE, -2.0, 0.0), 1.0, 0, 10),
        analyze_roots(CharProblem(2, 0)),
    )
    assert cf41.parameter_count == 2


def test_complex_terms_json_shape():
    sol = Affine(REAL_LINE, 1.0, 0.0)  # placeholder identity-slope map
    orbit = orbit_from_values([3.0] * 10)
    spectrum = analyze_roots(CharProblem(4, 1))
    cf = fit_closed_form(orbit, spectrum)
    payload = cf.to_json()
    assert {"modulus", "argument", "cos_poly", "sin_poly"} == set(
        payload["complex_terms"][0]
    )
    assert 0.0 < cf.complex_terms[0].argument < math.pi


# ---------------------------------------------------------------------------
# linearity
# ---------------------------------------------------------------------------


@given(
    st.floats(min_value=-5.0, max_value=5.0),
    st.floats(min_value=-5.0, max_value=5.0),
)
def test_fit_is_linear_in_the_orbit(x0, y0):
    spectrum = analyze_roots(CharProblem(2, 0))
    sol = Affine(REAL_LINE, -2.0, 0.0)
    a = iterate(sol, x0, 0, 6).forward_values() if x0 else np.zeros(7)
    b = iterate(sol, y0, 0, 6).forward_values() if y0 else np.zeros(7)
    fit_a = fit_closed_form(orbit_from_values(a), spectrum)
    fit_b = fit_closed_form(orbit_from_values(b), spectrum)
    fit_sum = fit_closed_form(orbit_from_values(a + b), spectrum)
    for t_a, t_b, t_s in zip(
        fit_a.real_terms, fit_b.real_terms, fit_sum.real_terms
    ):
        for ca, cb, cs in zip(t_a.coeffs, t_b.coeffs, t_s.coeffs):
            assert cs == pytest.approx(ca + cb, abs=1e-9)
