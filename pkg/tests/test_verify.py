import math

import numpy as np
import pytest

from itereq.charpoly import CharProblem, analyze_roots, build_char_poly
from itereq.errors import DomainError
from itereq.families import (
    Affine,
    Identity,
    ThreePiece,
    Translation,
    build_involution,
    conjugate,
)
from itereq.intervals import Interval, REAL_LINE
from itereq.means import Generator
from itereq.poly import Polynomial
from itereq.verify import (
    antimonotone_signs_constant,
    iterate,
    sample_grid,
    verify_dual,
    verify_general,
    verify_mean,
    verify_second_order,
)

SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------


def test_identity_orbit_constant():
    orb = iterate(Identity(REAL_LINE), 3.0, 0, 5)
    assert list(orb.forward_values()) == [3.0] * 6


def test_affine_orbit_powers():
    orb = iterate(Affine(REAL_LINE, -2.0, 0.0), 1.0, 0, 3)
    assert list(orb.forward_values()) == [1.0, -2.0, 4.0, -8.0]


def test_translation_orbit_backward():
    orb = iterate(Translation(REAL_LINE, 0.5), 0.0, -2, 2)
    assert list(orb.all_values()) == [-1.0, -0.5, 0.0, 0.5, 1.0]


def test_orbit_value_indexing():
    orb = iterate(Translation(REAL_LINE, 1.0), 0.0, -1, 2)
    assert orb.value(-1) == -1.0
    assert orb.value(2) == 2.0
    with pytest.raises(IndexError):
        orb.value(3)


def test_orbit_consecutive_values_satisfy_map():
    s = ThreePiece(REAL_LINE, 0.0, 1.0, 0.5)
    orb = iterate(s, -3.7, 0, 12)
    for m in range(0, 12):
        assert orb.value(m + 1) == pytest.approx(s(orb.value(m)), rel=1e-15)


def test_orbit_escape_flag_backward():
    # inverse of the contraction expands; backward iterates leave (0, 2)
    s = Affine(Interval(0.0, 2.0, True, True), 0.5, 0.5)
    orb = iterate(s, 1.8, -8, 0)
    assert orb.escaped
    assert orb.escape_index is not None and orb.escape_index < 0


def test_orbit_x0_outside_domain():
    with pytest.raises(DomainError):
        iterate(Identity(Interval(0.0, 1.0)), 5.0, 0, 3)


def test_sample_grid_respects_open_endpoints():
    grid = sample_grid(Interval(0.0, 1.0), 101)
    assert grid[0] > 0.0 and grid[-1] < 1.0
    closed = sample_grid(Interval(0.0, 1.0, True, True), 101)
    assert closed[0] == 0.0 and closed[-1] == 1.0


def test_sample_grid_clips_infinite_domains():
    grid = sample_grid(REAL_LINE, 11)
    assert grid[0] >= -10.0 and grid[-1] <= 10.0


# ---------------------------------------------------------------------------
# verify_mean
# ---------------------------------------------------------------------------


def test_identity_passes_any_problem_with_zero_residual():
    for n, k in ((2, 0), (5, 3), (9, 9)):
        report = verify_mean(Identity(REAL_LINE), CharProblem(n, k))
        assert report.passed
        assert report.max_residual == 0.0
        assert report.points_escaped == 0


def test_affine_minus_two_solves_k0_n2():
    # (f(x) + f(f(x)))/2 = x for f(x) = -2x + 5
    report = verify_mean(Affine(REAL_LINE, -2.0, 5.0), CharProblem(2, 0))
    assert report.passed
    assert report.max_residual <= 1e-12


def test_affine_negative_root_solves_3_1():
    report = verify_mean(Affine(REAL_LINE, -1.0 - SQRT2, 0.0), CharProblem(3, 1))
    assert report.passed
    assert report.max_residual <= 1e-12


def test_three_piece_solves_4_1():
    slope = analyze_roots(CharProblem(4, 1)).real_root_in(0.0, 1.0)
    report = verify_mean(
        ThreePiece(REAL_LINE, 0.0, 1.0, slope), CharProblem(4, 1), samples=1001
    )
    assert report.passed
    assert report.max_residual <= 1e-9


def test_wrong_translation_fails():
    # translations only solve the n = 2k equation
    report = verify_mean(Translation(REAL_LINE, 0.5), CharProblem(4, 1))
    assert not report.passed
    assert report.max_residual > 1e-3


def test_report_json_keys():
    report = verify_mean(Identity(REAL_LINE), CharProblem(2, 1))
    assert report.to_json() == {
        "max_residual": 0.0,
        "pass": True,
        "points_evaluated": 1001,
        "points_escaped": 0,
    }


def test_grid_refinement_never_flips_pass():
    slope = analyze_roots(CharProblem(4, 1)).real_root_in(0.0, 1.0)
    sol = ThreePiece(REAL_LINE, 0.0, 1.0, slope)
    r1 = verify_mean(sol, CharProblem(4, 1), samples=500)
    r2 = verify_mean(sol, CharProblem(4, 1), samples=1000)
    r3 = verify_mean(sol, CharProblem(4, 1), samples=2000)
    assert r1.passed and r2.passed and r3.passed


# ---------------------------------------------------------------------------
# verify_general
# ---------------------------------------------------------------------------


def test_geometric_mean_power_law():
    # F(x) = 2 x^(-1/2) satisfies F^2 = geometric mean of (x, F, F^2)
    domain = Interval(1.0, 4.0, True, True)
    gen = Generator("log", domain)
    F = conjugate(gen, Affine(gen.image(), -0.5, math.log(2.0)))
    report = verify_general(F, gen, CharProblem(2, 2))
    assert report.passed
    assert report.max_residual <= 1e-9


def test_identity_generator_reduces_to_verify_mean():
    sol = Affine(REAL_LINE, -2.0, 5.0)
    prob = CharProblem(2, 0)
    gen = Generator("identity", REAL_LINE)
    a = verify_general(sol, gen, prob)
    b = verify_mean(sol, prob)
    assert a == b  # bit for bit: same grid, same reduction


def test_identity_solution_zero_residual_under_log_mean():
    domain = Interval(0.5, 8.0)
    gen = Generator("log", domain)
    report = verify_general(Identity(domain), gen, CharProblem(3, 2))
    assert report.passed
    assert report.max_residual == 0.0


def test_generator_domain_must_cover_solution():
    gen = Generator("log", Interval(1.0, 2.0))
    with pytest.raises(DomainError):
        verify_general(Identity(Interval(0.5, 8.0)), gen, CharProblem(2, 1))


# ---------------------------------------------------------------------------
# verify_dual
# ---------------------------------------------------------------------------


def test_dual_affine_k0():
    report = verify_dual(
        Affine(REAL_LINE, -2.0, 0.0), build_char_poly(CharProblem(2, 0))
    )
    assert report.passed
    assert report.primal.passed and report.dual.passed


def test_dual_identity_zero_sum_coefficients():
    # any coefficient row summing to zero annihilates constant orbits
    report = verify_dual(Identity(REAL_LINE), Polynomial((2.0, -3.0, 1.0)))
    assert report.passed
    assert report.primal.max_residual == 0.0
    assert report.dual.max_residual == 0.0


def test_dual_three_piece_slope_equation():
    slope = analyze_roots(CharProblem(4, 1)).real_root_in(0.0, 1.0)
    sol = ThreePiece(REAL_LINE, 0.0, 1.0, slope)
    report = verify_dual(sol, build_char_poly(CharProblem(4, 1)))
    assert report.passed
    assert report.primal.passed and report.dual.passed


def test_dual_consistency_for_non_solution():
    # a map solving neither equation still satisfies the equivalence
    report = verify_dual(
        Affine(REAL_LINE, -3.0, 1.0), build_char_poly(CharProblem(2, 0))
    )
    assert report.passed
    assert not report.primal.passed and not report.dual.passed


def test_dual_json_shape():
    payload = verify_dual(
        Identity(REAL_LINE), Polynomial((1.0, -2.0, 1.0))
    ).to_json()
    assert set(payload) == {"primal", "dual", "pass"}


def test_dual_requires_bijection_onto_domain():
    from itereq.errors import NotInvertible

    squeezed = Affine(Interval(0.0, 1.0, True, True), 0.5, 0.25)
    with pytest.raises(NotInvertible):
        verify_dual(squeezed, Polynomial((1.0, -2.0, 1.0)))


# ---------------------------------------------------------------------------
# verify_second_order
# ---------------------------------------------------------------------------


def test_second_order_translation_rho_one():
    # (x + 2c) - 2(x + c) + x cancels to rounding level
    report = verify_second_order(Translation(REAL_LINE, 0.7), 1.0)
    assert report.passed
    assert report.max_residual <= 16 * np.finfo(float).eps * 12.0


def test_second_order_affine_any_rho():
    for rho in (-0.5, 0.25, 2.0):
        sol = Affine(REAL_LINE, rho, 1.0) if abs(rho) <= 1 else Affine(
            REAL_LINE, rho, 0.0
        )
        report = verify_second_order(sol, rho)
        assert report.passed
        assert report.max_residual <= 1e-12


def test_second_order_three_piece():
    report = verify_second_order(ThreePiece(REAL_LINE, -1.0, 1.0, 0.5), 0.5)
    assert report.passed
    assert report.max_residual <= 1e-9


def test_second_order_wrong_rho_fails():
    report = verify_second_order(Affine(REAL_LINE, 0.5, 0.0), 0.25)
    assert not report.passed


# ---------------------------------------------------------------------------
# orbit properties
# ---------------------------------------------------------------------------


def test_telescoping_constant():
    # f^{m+1}(x) - rho f^m(x) is independent of m for second-order solutions
    rho = 0.5
    for sol in (
        ThreePiece(REAL_LINE, -1.0, 1.0, rho),
        Affine(REAL_LINE, rho, 0.3),
        Translation(REAL_LINE, 0.7),  # rho = 1
    ):
        r = 1.0 if isinstance(sol, Translation) else rho
        for x0 in (-3.3, 0.1, 2.9):
            orb = iterate(sol, x0, 0, 11)
            ref = orb.value(1) - r * orb.value(0)
            for m in range(0, 11):
                tele = orb.value(m + 1) - r * orb.value(m)
                assert tele == pytest.approx(ref, abs=1e-9)


def test_antimonotone_for_decreasing_maps():
    for sol, x0 in (
        (Affine(REAL_LINE, -2.0, 5.0), 1.0),
        (Affine(REAL_LINE, -0.5, 0.0), 1.0),
        (Affine(REAL_LINE, -1.0 - SQRT2, 0.0), 0.3),
    ):
        orb = iterate(sol, x0, 0, 30)
        assert antimonotone_signs_constant(orb)


def test_antimonotone_detects_violation():
    # a growing increasing map produces same-sign differences, which the
    # alternating-sign statistic rejects
    orb = iterate(Translation(REAL_LINE, 1.0), 0.0, 0, 10)
    assert not antimonotone_signs_constant(orb)


def test_geometric_envelope_for_contracting_negative_slope():
    rho, c = -0.5, 1.0
    sol = Affine(REAL_LINE, rho, c)
    limit = c / (1.0 - rho)
    for x0 in (-4.0, 0.0, 9.0):
        orb = iterate(sol, x0, 0, 25)
        for m in range(26):
            bound = abs(rho) ** m * abs(x0 - limit)
            assert abs(orb.value(m) - limit) <= bound * (1.0 + 1e-12) + 1e-15


def test_involution_orbit_two_cycle():
    s = build_involution(
        Interval(0.0, math.inf), 1.0, f0=lambda x: 1.0 / x,
        f0_inverse=lambda y: 1.0 / y,
    )
    orb = iterate(s, 2.0, -4, 4)
    assert orb.value(0) == 2.0
    for m in range(-4, 5):
        expected = 2.0 if m % 2 == 0 else 0.5
        assert orb.value(m) == pytest.approx(expected, rel=1e-12)
    assert antimonotone_signs_constant(orb)
