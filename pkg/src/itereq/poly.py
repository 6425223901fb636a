"""Real-coefficient polynomials: evaluation, division, and root finding.

Coefficients are stored in ascending order (constant term first), matching
the characteristic form ``sum_i a_i r^i``.  Root finding is split between
bracketed bisection (for real roots with known isolation intervals) and a
Durand-Kerner simultaneous iteration (for the full complex spectrum).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import NonConvergence, NoSignChange, RootMismatch


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with real coefficients, ascending by power.

    ``coeffs`` is never empty; trailing zeros are stripped on construction
    so that ``degree == len(coeffs) - 1`` (the zero polynomial keeps a
    single 0.0 coefficient).
    """

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        cs = [float(c) for c in self.coeffs]
        if not cs:
            raise ValueError("a polynomial needs at least one coefficient")
        while len(cs) > 1 and cs[-1] == 0.0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def inf_norm(self) -> float:
        """Largest absolute coefficient, the scale for residual tolerances."""
        return max(abs(c) for c in self.coeffs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=np.float64)

    def __call__(self, x):
        return evaluate(self, x)

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial((0.0,))
        return Polynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i > 0))

    def scaled(self, factor: float) -> "Polynomial":
        return Polynomial(tuple(factor * c for c in self.coeffs))

    def __str__(self) -> str:
        terms = [f"{c:+g}*r^{i}" for i, c in enumerate(self.coeffs) if c != 0.0]
        return " ".join(terms) if terms else "0"


@dataclass(frozen=True)
class ComplexRoot:
    """One root of a polynomial with its multiplicity.

    ``modulus`` is cached at construction; roots with nonzero imaginary
    part always travel in conjugate pairs inside any root list produced
    here.
    """

    re: float
    im: float
    multiplicity: int = 1
    modulus: float = field(default=0.0)

    def __post_init__(self) -> None:
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be >= 1")
        object.__setattr__(self, "modulus", float(np.hypot(self.re, self.im)))

    @property
    def is_real(self) -> bool:
        return self.im == 0.0

    def as_complex(self) -> complex:
        return complex(self.re, self.im)


def evaluate(p: Polynomial, x):
    """Evaluate ``p`` at ``x`` (scalar or ndarray) via Horner's scheme."""
    if isinstance(x, np.ndarray):
        return _kernels.horner_vec(p.as_array(), np.asarray(x, dtype=np.float64))
    return float(_kernels.horner(p.as_array(), float(x)))


def evaluate_complex(p: Polynomial, z: complex) -> complex:
    acc = 0.0 + 0.0j
    for c in reversed(p.coeffs):
        acc = acc * z + c
    return acc


def multiply_linear(p: Polynomial, root_shift: float) -> Polynomial:
    """Return ``p(r) * (r - root_shift)``; the degree grows by one."""
    cs = p.coeffs
    out = [0.0] * (len(cs) + 1)
    for i, c in enumerate(cs):
        out[i + 1] += c
        out[i] -= root_shift * c
    return Polynomial(tuple(out))


def eval_condition_scale(p: Polynomial, x: float) -> float:
    """``sum |c_i| |x|^i``: the magnitude against which p(x) can be resolved.

    Horner's rounding error is a small multiple of eps times this sum, so
    residual tolerances at points of large modulus must be read relative
    to it, not to the coefficient norm.
    """
    ax = abs(x)
    total = 0.0
    power = 1.0
    for c in p.coeffs:
        total += abs(c) * power
        power *= ax
    return total


def deflate(p: Polynomial, root: float, tol: float = 1e-9) -> Polynomial:
    """Divide out ``(r - root)`` by synthetic division.

    Requires the remainder ``p(root)`` to be small: at most ``tol`` times
    the larger of the coefficient norm and the evaluation magnitude
    ``sum |c_i| |root|^i`` (the best resolution double precision offers
    at the point); raises :class:`RootMismatch` otherwise.  Division runs
    from the leading coefficient for ``|root| <= 1`` and from the
    constant term otherwise, which keeps the quotient stable for roots
    of any modulus.
    """
    scale = max(p.inf_norm, eval_condition_scale(p, root))
    remainder = evaluate(p, root)
    if abs(remainder) > tol * scale:
        raise RootMismatch(
            f"{root!r} is not a root: remainder {remainder:.3e} exceeds "
            f"{tol:.1e} * {scale:.3e}"
        )
    cs = p.coeffs
    if len(cs) == 1:
        raise RootMismatch("cannot deflate a constant polynomial")
    out = [0.0] * (len(cs) - 1)
    if abs(root) <= 1.0:
        acc = 0.0
        for i in range(len(cs) - 1, 0, -1):
            acc = acc * root + cs[i]
            out[i - 1] = acc
    else:
        out[0] = -cs[0] / root
        for i in range(1, len(cs) - 1):
            out[i] = (out[i - 1] - cs[i]) / root
    return Polynomial(tuple(out))


def bisect_root(
    p: Polynomial,
    lo: float,
    hi: float,
    tol: float = 1e-10,
) -> float:
    """Locate the sign-change point of ``p`` inside ``[lo, hi]``.

    The endpoints must straddle a sign change (:class:`NoSignChange`
    otherwise).  The result ``r`` satisfies ``|r - root| <= tol`` and the
    sign change is re-confirmed on ``[r - tol, r + tol]``;
    :class:`NonConvergence` is raised if the iteration budget runs out
    before the bracket narrows to ``tol``.
    """
    if not lo < hi:
        raise NoSignChange(f"empty bracket [{lo}, {hi}]")
    flo = evaluate(p, lo)
    fhi = evaluate(p, hi)
    if flo * fhi >= 0.0:
        raise NoSignChange(
            f"no sign change on [{lo}, {hi}]: p(lo)={flo:.3e}, p(hi)={fhi:.3e}"
        )
    mid, blo, bhi, _ = _kernels.bisect_loop(p.as_array(), lo, hi, flo, tol)
    if bhi - blo > max(tol, 4.0 * np.spacing(max(abs(blo), abs(bhi)))):
        raise NonConvergence(
            f"bisection stalled at width {bhi - blo:.3e} > tol {tol:.1e}",
            best_residual=abs(evaluate(p, mid)),
        )
    # confirm the sign change survives inside [r - tol, r + tol]
    a, b = max(lo, mid - tol), min(hi, mid + tol)
    if evaluate(p, a) * evaluate(p, b) > 0.0 and evaluate(p, blo) * evaluate(p, bhi) > 0.0:
        raise NonConvergence(
            f"sign change not confirmed within {tol:.1e} of {mid!r}",
            best_residual=abs(evaluate(p, mid)),
        )
    return mid


def newton_polish(p: Polynomial, x: float, steps: int = 3) -> float:
    """A few guarded Newton steps to sharpen an already-isolated root."""
    dp = p.derivative()
    best_x, best_f = x, abs(evaluate(p, x))
    for _ in range(steps):
        d = evaluate(dp, x)
        if d == 0.0:
            break
        x = x - evaluate(p, x) / d
        fx = abs(evaluate(p, x))
        if fx < best_f:
            best_x, best_f = x, fx
    return best_x


def _start_circle(
    p: Polynomial, angle_offset: float = 0.5, radius_factor: float = 1.0
) -> np.ndarray:
    """Durand-Kerner start: points on a circle of radius 1 + max|c_i/c_deg|.

    The angles carry a fixed offset so the configuration is not mirror
    symmetric about the real axis, which can stall the iteration on real
    polynomials.  ``angle_offset`` and ``radius_factor`` vary the start
    between retry attempts.
    """
    deg = p.degree
    lead = p.coeffs[-1]
    radius = 1.0 + max(abs(c / lead) for c in p.coeffs[:-1]) if deg > 0 else 1.0
    radius *= radius_factor
    angles = 2.0 * np.pi * (np.arange(deg) + 0.25) / deg + angle_offset / deg
    return radius * np.exp(1j * angles)


def _pair_conjugates(z: np.ndarray, tol: float) -> np.ndarray:
    """Symmetrize a root list of a real polynomial.

    Estimates with tiny imaginary part are snapped to the real axis; the
    rest are matched into conjugate pairs and each pair is replaced by
    ``re +/- i*im`` of its average.
    """
    z = z.copy()
    real_cut = max(1e-8, 100.0 * tol)
    is_real = np.abs(z.imag) <= real_cut * (1.0 + np.abs(z))
    z[is_real] = z[is_real].real
    plus = [i for i in range(len(z)) if z[i].imag > 0]
    minus = [i for i in range(len(z)) if z[i].imag < 0]
    used = set()
    for i in plus:
        best_j, best_d = None, np.inf
        for j in minus:
            if j in used:
                continue
            d = abs(z[j] - np.conj(z[i]))
            if d < best_d:
                best_j, best_d = j, d
        if best_j is None:
            # unpaired estimate: force it onto the real axis
            z[i] = z[i].real
            continue
        used.add(best_j)
        re = 0.5 * (z[i].real + z[best_j].real)
        im = 0.5 * (z[i].imag - z[best_j].imag)
        z[i] = complex(re, im)
        z[best_j] = complex(re, -im)
    for j in minus:
        if j not in used:
            z[j] = z[j].real
    return z


def _merge_clusters(z: np.ndarray, p: Polynomial, tol: float) -> list[ComplexRoot]:
    """Group estimates that describe one multiple root.

    A multiple root of multiplicity m is only located to ~(residual)^(1/m)
    by simultaneous iteration, so the merge radius uses the local Newton
    step |p(z)/p'(z)| as a conditioning-aware error estimate on top of the
    base ``10 * tol`` radius.  The numerator is floored at the rounding
    level of the evaluation: near a multiple root the computed |p(z)| is
    noise and can fluctuate far below its floor, which would make the
    estimate arbitrarily optimistic.
    """
    dp = p.derivative()
    eps = float(np.finfo(float).eps)

    def err_radius(v: complex) -> float:
        pd = evaluate_complex(dp, v)
        pv = evaluate_complex(p, v)
        if abs(pd) == 0.0:
            return np.inf
        floor = eps * eval_condition_scale(p, abs(v))
        return max(abs(pv), floor) / abs(pd)

    remaining = sorted((complex(v) for v in z), key=lambda v: (v.real, v.imag))
    groups: list[list[complex]] = []
    for v in remaining:
        placed = False
        for g in groups:
            ref = g[0]
            radius = 10.0 * (tol + err_radius(v) + err_radius(ref))
            if abs(v - ref) <= radius:
                g.append(v)
                placed = True
                break
        if not placed:
            groups.append([v])
    roots: list[ComplexRoot] = []
    for g in groups:
        m = len(g)
        center = sum(g) / m
        if m > 1 and abs(center.imag) <= 1e-6 * (1.0 + abs(center)):
            # an m-fold root is a simple root of the (m-1)-th derivative;
            # Newton there recovers the full double-precision accuracy the
            # stalled simultaneous iteration cannot reach
            dm = p
            for _ in range(m - 1):
                dm = dm.derivative()
            polished = newton_polish(dm, center.real, steps=4)
            spread = max(abs(v - center) for v in g)
            if abs(polished - center.real) <= 2.0 * spread + 10.0 * tol:
                center = complex(polished, 0.0)
        if abs(center.imag) <= 1e-12 * (1.0 + abs(center)):
            roots.append(ComplexRoot(center.real, 0.0, m))
        else:
            roots.append(ComplexRoot(center.real, center.imag, m))
    roots.sort(key=lambda r: (r.re, r.im))
    return roots


def _factorization_error(p: Polynomial, roots: Sequence[ComplexRoot]) -> float:
    """Worst coefficient mismatch of prod (r - root_i) against p, relative."""
    rebuilt = expand_root_list(roots, leading=p.coeffs[-1])
    if rebuilt.degree != p.degree:
        return np.inf
    scale = max(p.inf_norm, 1e-300)
    return max(
        abs(a - b) / scale for a, b in zip(rebuilt.coeffs, p.coeffs)
    )


def _expand_complex(roots: Sequence[complex]) -> np.ndarray:
    """Ascending coefficients of ``prod (x - root_i)`` in complex arithmetic."""
    cs = np.array([1.0 + 0.0j])
    for root in roots:
        nxt = np.zeros(len(cs) + 1, dtype=np.complex128)
        nxt[1:] += cs
        nxt[:-1] -= root * cs
        cs = nxt
    return cs


def _refine_root_set(
    p: Polynomial, roots: list[ComplexRoot], iters: int = 4
) -> list[ComplexRoot]:
    """Newton refinement of the whole root set on the coefficient map.

    Individually converged estimates near a root cluster satisfy their own
    residuals yet reconstruct the coefficients only to the cluster's
    conditioning level; a few joint Newton steps on
    ``roots -> coefficients`` (least squares over real parameters,
    conjugate pairs held symmetric) restore backward-stable agreement.
    Each step is kept only if it reduces the factorization error.
    """
    lc = p.coeffs[-1]
    target = np.asarray(p.coeffs)

    def flat_factors(rs: list[ComplexRoot]) -> list[complex]:
        flat: list[complex] = []
        for r in rs:
            flat.extend([r.as_complex()] * r.multiplicity)
        return flat

    current = list(roots)
    best_err = _factorization_error(p, current)
    for _ in range(iters):
        if best_err < 64.0 * np.finfo(float).eps:
            break
        factors = flat_factors(current)
        rebuilt = np.asarray(expand_root_list(current, lc).coeffs)
        resid = target - rebuilt

        # one column of d(coeffs)/d(parameter) per real degree of freedom
        cols: list[np.ndarray] = []
        updates: list[tuple[int, str]] = []
        for idx, r in enumerate(current):
            if r.im < 0.0:
                continue  # moved with its conjugate partner
            z = r.as_complex()
            others = list(factors)
            others.remove(z)
            q = np.zeros(len(target), dtype=np.complex128)
            qc = _expand_complex(others)
            q[: len(qc)] = lc * qc
            m = r.multiplicity
            if r.im == 0.0:
                cols.append(-m * q.real)
                updates.append((idx, "re"))
            else:
                cols.append(-2.0 * m * q.real)
                updates.append((idx, "re"))
                cols.append(2.0 * m * q.imag)
                updates.append((idx, "im"))
        if not cols:
            break
        jac = np.column_stack(cols)
        try:
            delta, *_ = np.linalg.lstsq(jac, resid, rcond=None)
        except np.linalg.LinAlgError:
            break

        trial = list(current)
        for (idx, part), d in zip(updates, delta):
            r = trial[idx]
            if part == "re":
                trial[idx] = ComplexRoot(r.re + d, r.im, r.multiplicity)
            else:
                trial[idx] = ComplexRoot(r.re, r.im + d, r.multiplicity)
        # re-symmetrize conjugate partners
        for idx, r in enumerate(trial):
            if r.im < 0.0:
                partner = min(
                    (s for s in trial if s.im > 0.0),
                    key=lambda s: abs(complex(s.re, -s.im) - r.as_complex()),
                    default=None,
                )
                if partner is not None:
                    trial[idx] = ComplexRoot(
                        partner.re, -partner.im, r.multiplicity
                    )
        err = _factorization_error(p, trial)
        if err < best_err:
            current, best_err = trial, err
        else:
            break
    current.sort(key=lambda r: (r.re, r.im))
    return current


# (angle offset, radius factor, residual fast-path on/off) per attempt;
# later attempts drop the residual stop because parked estimates on a
# multiple root can fake convergence while another root is still unfound
_DK_ATTEMPTS = ((0.5, 1.0, True), (0.5, 1.0, False), (1.7, 1.25, False), (2.9, 0.8, False))


def all_roots(p: Polynomial, tol: float = 1e-12) -> list[ComplexRoot]:
    """All complex roots (with multiplicity) by simultaneous iteration.

    Runs Durand-Kerner sweeps from a Cauchy-circle start, symmetrizes the
    estimates into conjugate pairs, merges clustered estimates into
    multiple roots, and accepts the result only if (a) every root's
    residual clears ``tol`` relative to the coefficient norm or to the
    evaluation magnitude at the root, whichever is larger, and (b) the
    re-expanded factorization reproduces the coefficients.  On failure
    the iteration restarts from perturbed configurations; exhausted
    retries raise :class:`NonConvergence` with the best residual seen.
    """
    if p.degree < 1:
        raise ValueError("root finding needs degree >= 1")

    # roots at exactly zero show up as trailing zero coefficients; peel
    # them off exactly rather than asking the iteration to resolve them
    zero_mult = 0
    while zero_mult < p.degree and p.coeffs[zero_mult] == 0.0:
        zero_mult += 1
    if zero_mult:
        zero_root = [ComplexRoot(0.0, 0.0, zero_mult)]
        if zero_mult == p.degree:
            return zero_root
        reduced = Polynomial(p.coeffs[zero_mult:])
        return sorted(
            zero_root + all_roots(reduced, tol), key=lambda r: (r.re, r.im)
        )

    scale = p.inf_norm
    best_seen = np.inf
    for angle, factor, fast_path in _DK_ATTEMPTS:
        z0 = _start_circle(p, angle, factor)
        resid_stop = tol * scale if fast_path else 0.0
        z, best, _ = _kernels.dk_sweeps(p.as_array(), z0, resid_stop, 1e-15)
        best_seen = min(best_seen, best)
        z = np.asarray(z)
        ok = True
        for zi in z:
            allowed = tol * max(scale, eval_condition_scale(p, abs(zi)))
            if abs(evaluate_complex(p, complex(zi))) > allowed:
                ok = False
                break
        if not ok:
            continue
        roots = _merge_clusters(_pair_conjugates(z, tol), p, tol)
        roots = _refine_root_set(p, roots)
        if _factorization_error(p, roots) <= 1e-7 * max(1.0, float(p.degree)):
            return roots
    raise NonConvergence(
        f"simultaneous iteration failed to factor the polynomial "
        f"(best residual {best_seen:.3e})",
        best_residual=float(best_seen),
    )


def from_roots(roots: Iterable[complex], leading: float = 1.0) -> Polynomial:
    """Expand ``leading * prod (r - root_i)`` back into coefficients."""
    cs = np.array([leading], dtype=np.complex128)
    for root in roots:
        nxt = np.zeros(len(cs) + 1, dtype=np.complex128)
        nxt[1:] += cs
        nxt[:-1] -= root * cs
        cs = nxt
    return Polynomial(tuple(float(c.real) for c in cs))


def expand_root_list(roots: Sequence[ComplexRoot], leading: float = 1.0) -> Polynomial:
    """Expand a multiplicity-annotated root list into a polynomial."""
    flat: list[complex] = []
    for r in roots:
        flat.extend([r.as_complex()] * r.multiplicity)
    return from_roots(flat, leading)
