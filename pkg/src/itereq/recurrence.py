"""Closed forms for orbits: fit, predict, and check the linear recurrence.

An orbit of a solution obeys ``sum_i a_i x_{m+i} = 0`` with the
characteristic coefficients, so it matches a closed form

    x_j = sum_k A_k(j) lambda_k^j
        + sum_k (B_k(j) cos(j phi_k) + C_k(j) sin(j phi_k)) |mu_k|^j

where the polynomial degrees are bounded by the root multiplicities.
Fitting anchors the first ``degree`` forward orbit entries on a
generalized (confluent) Vandermonde system; the solve runs in extended
precision because prediction at index 30 amplifies weight errors by
|root|^30.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .charpoly import RootReport
from .errors import DomainError, SingularSystem, TooShort
from .families import Solution, ThreePiece
from .poly import Polynomial
from .verify import Orbit

_COND_LIMIT = 1e12
_SOLVE_DPS = 50
_ANCHOR_TOL = 1e-9


@dataclass(frozen=True)
class RealTerm:
    """Contribution ``A(j) * lam^j`` with ``A`` of degree multiplicity-1."""

    lam: float
    coeffs: tuple[float, ...]


@dataclass(frozen=True)
class ComplexTerm:
    """Contribution ``(B(j) cos(j*arg) + C(j) sin(j*arg)) * modulus^j``."""

    modulus: float
    argument: float
    cos_poly: tuple[float, ...]
    sin_poly: tuple[float, ...]


@dataclass(frozen=True)
class ClosedForm:
    real_terms: tuple[RealTerm, ...]
    complex_terms: tuple[ComplexTerm, ...]

    @property
    def parameter_count(self) -> int:
        return sum(len(t.coeffs) for t in self.real_terms) + sum(
            len(t.cos_poly) + len(t.sin_poly) for t in self.complex_terms
        )

    def to_json(self) -> dict:
        return {
            "real_terms": [
                {"lambda": t.lam, "coeffs": list(t.coeffs)}
                for t in self.real_terms
            ],
            "complex_terms": [
                {
                    "modulus": t.modulus,
                    "argument": t.argument,
                    "cos_poly": list(t.cos_poly),
                    "sin_poly": list(t.sin_poly),
                }
                for t in self.complex_terms
            ],
        }


def _polyval(coeffs: tuple[float, ...], j: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * j + c
    return acc


def predict(cf: ClosedForm, j: int) -> float:
    """Evaluate the closed form at index ``j``."""
    total = 0.0
    for t in cf.real_terms:
        total += _polyval(t.coeffs, j) * t.lam**j
    for t in cf.complex_terms:
        envelope = t.modulus**j
        total += (
            _polyval(t.cos_poly, j) * math.cos(j * t.argument)
            + _polyval(t.sin_poly, j) * math.sin(j * t.argument)
        ) * envelope
    return total


@dataclass(frozen=True)
class RecurrenceReport:
    max_residual: float
    passed: bool
    windows: int

    def to_json(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "pass": self.passed,
            "windows": self.windows,
        }


def _contiguous_values(orbit: Orbit) -> np.ndarray:
    """The longest non-NaN run of orbit values containing index 0."""
    pts = orbit.all_values()
    zero = -orbit.m_lo
    lo = zero
    while lo > 0 and not np.isnan(pts[lo - 1]):
        lo -= 1
    hi = zero
    while hi + 1 < len(pts) and not np.isnan(pts[hi + 1]):
        hi += 1
    return pts[lo : hi + 1]


def check_recurrence(
    orbit: Orbit, coeffs: Polynomial, tol: float = 1e-9
) -> RecurrenceReport:
    """Max residual of ``sum_i a_i x_{m+i}`` over all admissible windows."""
    vals = _contiguous_values(orbit)
    deg = coeffs.degree
    if len(vals) < deg + 1:
        raise TooShort(
            f"orbit provides {len(vals)} values, recurrence needs {deg + 1}"
        )
    arr = coeffs.as_array()
    windows = len(vals) - deg
    residuals = np.empty(windows)
    for m in range(windows):
        residuals[m] = math.fsum(arr[i] * vals[m + i] for i in range(deg + 1))
    scale = coeffs.inf_norm * (1.0 + float(np.max(np.abs(vals))))
    max_resid = float(np.max(np.abs(residuals)))
    return RecurrenceReport(max_resid, max_resid <= tol * scale, windows)


def single_regime(sol: Solution, orbit: Orbit) -> bool:
    """Certificate that an orbit never crosses an affine regime boundary.

    Only three-piece maps have regime boundaries; every other family is a
    single affine law, so the certificate holds trivially.
    """
    if not isinstance(sol, ThreePiece):
        return True
    vals = _contiguous_values(orbit)
    return bool(
        np.all(vals <= sol.a) or np.all(vals >= sol.b)
        or np.all((vals >= sol.a) & (vals <= sol.b))
    )


def _spectrum_terms(spectrum: RootReport):
    reals = [(r.value, r.multiplicity) for r in spectrum.real_roots]
    complexes = []
    for z in spectrum.complex_roots:
        if z.im > 0.0:
            phi = math.atan2(z.im, z.re)
            complexes.append((z.modulus, phi, z.multiplicity))
        elif z.im == 0.0:
            reals.append((z.re, z.multiplicity))
    return reals, complexes


def fit_closed_form(
    orbit: Orbit,
    spectrum: RootReport,
    regime_of: Solution | None = None,
) -> ClosedForm:
    """Fit the closed form through the first ``degree`` orbit entries.

    The anchor system is a confluent Vandermonde matrix (powers-of-j
    columns for multiple roots, cos/sin columns for conjugate pairs).
    ``regime_of`` optionally supplies the generating solution so that
    branch-crossing orbits of three-piece maps are refused: the linear
    recurrence only holds while the orbit stays in one affine regime.
    Raises :class:`SingularSystem` when the system's condition number
    exceeds 1e12 or the anchors cannot be reproduced.
    """
    deg = spectrum.problem.degree
    vals = orbit.forward_values()
    if len(vals) < deg:
        raise TooShort(f"orbit provides {len(vals)} forward values, need {deg}")
    if regime_of is not None and not single_regime(regime_of, orbit):
        raise DomainError(
            "orbit crosses an affine regime boundary; the linear recurrence "
            "does not apply across branches"
        )
    anchors = vals[:deg]
    reals, complexes = _spectrum_terms(spectrum)

    n_cols = sum(m for _, m in reals) + sum(2 * m for _, _, m in complexes)
    if n_cols != deg:
        raise SingularSystem(
            f"spectrum provides {n_cols} parameters for degree {deg}"
        )

    # condition guard on the double-precision rendering of the system
    cols64 = []
    J = np.arange(deg, dtype=float)
    for lam, mult in reals:
        for t in range(mult):
            cols64.append(J**t * np.sign(lam) ** J * np.abs(lam) ** J
                          if lam < 0 else J**t * lam**J)
    for mod, phi, mult in complexes:
        for t in range(mult):
            cols64.append(J**t * np.cos(J * phi) * mod**J)
            cols64.append(J**t * np.sin(J * phi) * mod**J)
    A64 = np.column_stack(cols64)
    cond = float(np.linalg.cond(A64))
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise SingularSystem(
            f"anchor system condition number {cond:.3e} exceeds {_COND_LIMIT:.0e}"
        )

    weights = _solve_extended(reals, complexes, anchors, deg)

    cf = _assemble(reals, complexes, weights)
    scale = 1.0 + float(np.max(np.abs(anchors)))
    for j in range(deg):
        if abs(predict(cf, j) - anchors[j]) > _ANCHOR_TOL * scale:
            raise SingularSystem(
                f"fit does not reproduce anchor {j}: "
                f"{predict(cf, j)!r} vs {anchors[j]!r}"
            )
    return cf


def _solve_extended(reals, complexes, anchors, deg: int) -> list[float]:
    """Solve the anchor system in extended precision.

    Weight errors are amplified by |root|^j at prediction time; a
    50-digit solve keeps them irrelevant for every condition number the
    1e12 guard admits.
    """
    with mp.workdps(_SOLVE_DPS):
        rows = []
        for j in range(deg):
            row = []
            jm = mp.mpf(j)
            for lam, mult in reals:
                lam_m = mp.mpf(lam)
                pw = lam_m**j
                for t in range(mult):
                    row.append(jm**t * pw)
            for mod, phi, mult in complexes:
                mod_m, phi_m = mp.mpf(mod), mp.mpf(phi)
                env = mod_m**j
                cosv, sinv = mp.cos(jm * phi_m), mp.sin(jm * phi_m)
                for t in range(mult):
                    row.append(jm**t * cosv * env)
                    row.append(jm**t * sinv * env)
            rows.append(row)
        A = mp.matrix(rows)
        b = mp.matrix([mp.mpf(float(v)) for v in anchors])
        try:
            x = mp.lu_solve(A, b)
        except ZeroDivisionError as exc:
            raise SingularSystem("anchor system is singular") from exc
        return [float(v) for v in x]


def _assemble(reals, complexes, weights: list[float]) -> ClosedForm:
    real_terms = []
    pos = 0
    for lam, mult in reals:
        real_terms.append(RealTerm(lam, tuple(weights[pos : pos + mult])))
        pos += mult
    complex_terms = []
    for mod, phi, mult in complexes:
        cos_c, sin_c = [], []
        for _ in range(mult):
            cos_c.append(weights[pos])
            sin_c.append(weights[pos + 1])
            pos += 2
        complex_terms.append(ComplexTerm(mod, phi, tuple(cos_c), tuple(sin_c)))
    return ClosedForm(tuple(real_terms), tuple(complex_terms))


def prediction_error(
    cf: ClosedForm, orbit: Orbit, j_lo: int, j_hi: int
) -> float:
    """Max guarded relative error of predictions against stored values."""
    worst = 0.0
    for j in range(j_lo, j_hi + 1):
        if j < orbit.m_lo or j > orbit.m_hi:
            continue
        actual = orbit.value(j)
        if math.isnan(actual):
            continue
        err = abs(predict(cf, j) - actual) / (1.0 + abs(actual))
        worst = max(worst, err)
    return worst
