"""Command-line front end.

Subcommands
-----------
analyze         root classification and verification for one (n, k)
solve           emit solution specs for (n, k) on an interval
verify          check a solution spec file against its equation
orbit           iterate a solution spec and emit CSV
fit-recurrence  fit a closed form to an orbit CSV and validate predictions
selftest        run the full acceptance battery

Exit codes: 0 success/pass, 1 check failure, 2 usage or input error,
3 unsolved regime (both k and n even).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .charpoly import CharProblem, analyze_roots, classify, report_matches_expectation
from .errors import ItereqError
from .families import enumerate_families, solution_from_json
from .intervals import parse_interval
from .means import Generator
from .recurrence import ClosedForm, fit_closed_form, predict
from .verify import Orbit, iterate, verify_general, verify_mean

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_OPEN_PROBLEM = 3

_PREDICTION_TOL = 1e-6


def _float_repr(x: float) -> str:
    return repr(float(x))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="itereq",
        description=(
            "Analyze and verify the iterate-mean equation "
            "f^k(x) = (f^0(x) + ... + f^n(x))/(n+1)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="classify and verify the root layout")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-10, help="bisection width")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("solve", help="emit solution specs for (n, k)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument(
        "--interval",
        default="(-inf,+inf)",
        help='domain, e.g. "(-inf,inf)", "[0,1]", "(0,+inf)"',
    )
    p.add_argument(
        "--params",
        default="",
        help=(
            "comma-separated free parameters, e.g. c=1 or a=0,b=1; "
            "defaults anchor at the sample-window midpoint"
        ),
    )
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("verify", help="verify a solution spec file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--solution", required=True, help="solution spec JSON file")
    p.add_argument("--samples", type=int, default=1001)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument(
        "--generator",
        default="identity",
        help='mean generator: "identity", "log", or "power:P"',
    )

    p = sub.add_parser("orbit", help="iterate a solution spec, emit CSV")
    p.add_argument("--solution", required=True)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--back", type=int, default=0)
    p.add_argument("--csv", default=None, help="output file (default stdout)")

    p = sub.add_parser(
        "fit-recurrence", help="fit a closed form to an orbit CSV"
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--orbit", required=True, help="CSV of rows m,x_m")
    p.add_argument("--json", action="store_true")

    sub.add_parser("selftest", help="run the acceptance battery")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {
        "analyze": _cmd_analyze,
        "solve": _cmd_solve,
        "verify": _cmd_verify,
        "orbit": _cmd_orbit,
        "fit-recurrence": _cmd_fit,
        "selftest": _cmd_selftest,
    }[args.command]
    try:
        return handler(args)
    except ItereqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _cmd_analyze(args) -> int:
    try:
        prob = CharProblem(args.n, args.k)
    except ItereqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    analysis = classify(prob)
    try:
        report = analyze_roots(prob, tol=args.tol)
    except ItereqError as exc:
        print(f"root analysis failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    matched, problems = report_matches_expectation(report, analysis)

    if args.json:
        payload = report.to_json()
        payload["case_label"] = analysis.case_label
        payload["r_min"] = analysis.r_min
        payload["r_max"] = analysis.r_max
        payload["expected_real_roots"] = [
            {"bracket": [e.bracket[0], e.bracket[1]], "multiplicity": e.multiplicity}
            for e in analysis.expected_real_roots
        ]
        payload["matched"] = matched
        payload["mismatches"] = problems
        print(json.dumps(payload, indent=2))
    else:
        print(f"case {analysis.case_label}  (n={prob.n}, k={prob.k})")
        for r in report.real_roots:
            lo, hi = r.bracket
            where = "exact" if r.value == 1.0 else f"in ({lo:g}, {hi:g})"
            print(
                f"  real root {_float_repr(r.value)}  multiplicity {r.multiplicity}  {where}"
            )
        for z in report.complex_roots:
            print(
                f"  complex root {_float_repr(z.re)} + {_float_repr(z.im)}i"
                f"  modulus {_float_repr(z.modulus)}"
            )
        bound = 2 * prob.n + 1
        print(
            f"  modulus bound < {bound}: {'ok' if report.bound_2n1_ok else 'VIOLATED'}"
            f"  (margin {_float_repr(report.bound_margin)})"
        )
        gap = report.modulus_separation_min_gap
        if gap is None:
            print("  modulus separation: not applicable (k and n both even)")
        else:
            print(f"  modulus separation min gap: {_float_repr(gap)}")
        print(f"  expectations matched: {matched}")
        for msg in problems:
            print(f"  mismatch: {msg}")
    return EXIT_OK if matched else EXIT_CHECK_FAILED


def _parse_params(text: str) -> dict[str, float]:
    params: dict[str, float] = {}
    if not text.strip():
        return params
    for chunk in text.split(","):
        if "=" not in chunk:
            raise ItereqError(f"bad --params chunk {chunk!r}; expected name=value")
        name, value = chunk.split("=", 1)
        params[name.strip()] = float(value)
    return params


def _cmd_solve(args) -> int:
    try:
        prob = CharProblem(args.n, args.k)
        domain = parse_interval(args.interval)
        params = _parse_params(args.params)
    except (ItereqError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    enumeration = enumerate_families(prob, domain)
    if enumeration.is_open_problem:
        if args.json:
            print(json.dumps({"status": "open_problem"}))
        else:
            print(
                f"(n={prob.n}, k={prob.k}): both k and n even; the "
                "continuous-solution classification is unsolved"
            )
        return EXIT_OPEN_PROBLEM

    known = {name for desc in enumeration.families for name in desc.free_params}
    unknown = set(params) - known
    if unknown:
        print(
            f"error: unknown parameter(s) {sorted(unknown)}; "
            f"this case takes {sorted(known) or 'none'}",
            file=sys.stderr,
        )
        return EXIT_USAGE

    wlo, whi = domain.window(10.0)
    mid = 0.5 * (wlo + whi)
    solutions = []
    for desc in enumeration.families:
        filled = dict(params)
        if desc.family == "translation":
            filled.setdefault("c", 0.0)
        elif desc.family == "affine":
            filled.setdefault("c", mid * (1.0 - desc.slope))
        elif desc.family == "three_piece":
            filled.setdefault("a", mid)
            filled.setdefault("b", max(mid, filled["a"]))
        keep = {k: v for k, v in filled.items() if k in desc.free_params}
        try:
            sol = desc.instantiate(domain, **keep)
        except ItereqError as exc:
            print(f"error: cannot build {desc.family}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        solutions.append(sol)

    if args.json:
        print(
            json.dumps(
                {"status": "ok", "solutions": [s.to_json() for s in solutions]},
                indent=2,
            )
        )
    else:
        for desc, sol in zip(enumeration.families, solutions):
            print(f"{desc.family}: {desc.note}")
            print(f"  spec: {json.dumps(sol.to_json())}")
    return EXIT_OK


def _load_solution(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    return solution_from_json(obj)


def _parse_generator(text: str, domain) -> Generator:
    token = text.strip().lower()
    if token == "identity":
        return Generator("identity", domain)
    if token == "log":
        return Generator("log", domain)
    if token.startswith("power:") or token.startswith("power="):
        return Generator("power", domain, p=float(token[6:]))
    raise ItereqError(f"unknown generator {text!r}; use identity, log, power:P")


def _cmd_verify(args) -> int:
    try:
        prob = CharProblem(args.n, args.k)
        sol = _load_solution(args.solution)
    except (ItereqError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.generator.strip().lower() == "identity":
            report = verify_mean(sol, prob, samples=args.samples, tol=args.tol)
        else:
            gen = _parse_generator(args.generator, sol.domain)
            report = verify_general(
                sol, gen, prob, samples=args.samples, tol=args.tol
            )
    except ItereqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps(report.to_json()))
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def _cmd_orbit(args) -> int:
    try:
        sol = _load_solution(args.solution)
        if args.steps < 0 or args.back < 0:
            raise ItereqError("--steps and --back must be nonnegative")
        orb = iterate(sol, args.x0, m_lo=-args.back, m_hi=args.steps)
    except (ItereqError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    lines = ["m,x_m"]
    for m in range(orb.m_lo, orb.m_hi + 1):
        v = orb.points[m - orb.m_lo]
        if np.isnan(v):
            continue
        lines.append(f"{m},{_float_repr(v)}")
    text = "\n".join(lines) + "\n"
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _read_orbit_csv(path: str) -> Orbit:
    rows: list[tuple[int, float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                m, v = int(parts[0]), float(parts[1])
            except (ValueError, IndexError):
                continue  # header or malformed line
            rows.append((m, v))
    if not rows:
        raise ItereqError(f"no orbit rows found in {path!r}")
    rows.sort()
    ms = [m for m, _ in rows]
    if ms != list(range(ms[0], ms[0] + len(ms))):
        raise ItereqError("orbit indices must be consecutive")
    # re-index so the first row is j = 0: the recurrence is shift-invariant
    vals = np.asarray([v for _, v in rows])
    return Orbit(vals[0], 0, len(vals) - 1, vals)


def _cmd_fit(args) -> int:
    try:
        prob = CharProblem(args.n, args.k)
        orb = _read_orbit_csv(args.orbit)
        if orb.m_hi + 1 < prob.n:
            raise ItereqError(
                f"orbit has {orb.m_hi + 1} rows, need at least {prob.n}"
            )
        spectrum = analyze_roots(prob)
        cf = fit_closed_form(orb, spectrum)
    except (ItereqError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    worst = 0.0
    for j in range(prob.n, orb.m_hi + 1):
        actual = orb.value(j)
        err = abs(predict(cf, j) - actual) / (1.0 + abs(actual))
        worst = max(worst, err)

    if args.json:
        payload = cf.to_json()
        payload["held_out_max_relative_error"] = worst
        payload["held_out_points"] = max(0, orb.m_hi + 1 - prob.n)
        print(json.dumps(payload, indent=2))
    else:
        _print_closed_form(cf)
        print(f"held-out max relative error: {_float_repr(worst)}")
    return EXIT_OK if worst <= _PREDICTION_TOL else EXIT_CHECK_FAILED


def _print_closed_form(cf: ClosedForm) -> None:
    for t in cf.real_terms:
        poly = " + ".join(
            f"{_float_repr(c)}*j^{i}" if i else _float_repr(c)
            for i, c in enumerate(t.coeffs)
        )
        print(f"  ({poly}) * ({_float_repr(t.lam)})^j")
    for t in cf.complex_terms:
        cos_poly = " + ".join(
            f"{_float_repr(c)}*j^{i}" if i else _float_repr(c)
            for i, c in enumerate(t.cos_poly)
        )
        sin_poly = " + ".join(
            f"{_float_repr(c)}*j^{i}" if i else _float_repr(c)
            for i, c in enumerate(t.sin_poly)
        )
        print(
            f"  [({cos_poly})*cos({_float_repr(t.argument)}*j) + "
            f"({sin_poly})*sin({_float_repr(t.argument)}*j)] * "
            f"({_float_repr(t.modulus)})^j"
        )


def _cmd_selftest(args) -> int:
    from .selftest import run_all

    results = run_all(verbose=True)
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
