"""Real intervals with open/closed/infinite endpoints."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import DomainError

_INF_TOKENS = {"inf": math.inf, "+inf": math.inf, "-inf": -math.inf}


@dataclass(frozen=True)
class Interval:
    """Non-trivial interval; infinite endpoints are always open."""

    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise DomainError(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")
        if math.isinf(self.lo) and self.lo_closed:
            object.__setattr__(self, "lo_closed", False)
        if math.isinf(self.hi) and self.hi_closed:
            object.__setattr__(self, "hi_closed", False)

    # -- membership ---------------------------------------------------------

    def contains(self, x: float) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo:
            return self.lo_closed
        if x == self.hi:
            return self.hi_closed
        return True

    def contains_in_closure(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def is_interior(self, x: float) -> bool:
        return self.lo < x < self.hi

    def __contains__(self, x: float) -> bool:
        return self.contains(x)

    # -- structure -----------------------------------------------------------

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def is_real_line(self) -> bool:
        return math.isinf(self.lo) and math.isinf(self.hi)

    @property
    def is_open(self) -> bool:
        return not self.lo_closed and not self.hi_closed

    @property
    def is_closed(self) -> bool:
        lo_ok = self.lo_closed or math.isinf(self.lo)
        hi_ok = self.hi_closed or math.isinf(self.hi)
        return lo_ok and hi_ok

    def window(self, half_width: float = 10.0) -> tuple[float, float]:
        """Bounded sampling window: the interval clipped to +-half_width."""
        lo = max(self.lo, -half_width)
        hi = min(self.hi, half_width)
        if not lo < hi:  # interval lies entirely outside the clip range
            return self.lo, self.hi
        return lo, hi

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        def enc(v: float) -> float | str:
            if v == math.inf:
                return "+inf"
            if v == -math.inf:
                return "-inf"
            return v

        return {
            "lo": enc(self.lo),
            "hi": enc(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Interval":
        def dec(v) -> float:
            if isinstance(v, str):
                token = v.strip().lower()
                if token in _INF_TOKENS:
                    return _INF_TOKENS[token]
                return float(token)
            return float(v)

        return cls(
            lo=dec(obj["lo"]),
            hi=dec(obj["hi"]),
            lo_closed=bool(obj.get("lo_closed", False)),
            hi_closed=bool(obj.get("hi_closed", False)),
        )

    def __str__(self) -> str:
        lb = "[" if self.lo_closed else "("
        rb = "]" if self.hi_closed else ")"
        lo = "-inf" if math.isinf(self.lo) else f"{self.lo:g}"
        hi = "+inf" if math.isinf(self.hi) else f"{self.hi:g}"
        return f"{lb}{lo},{hi}{rb}"


REAL_LINE = Interval()

_INTERVAL_RE = re.compile(r"^\s*([\[\(])\s*([^,\s]+)\s*,\s*([^,\s\]\)]+)\s*([\]\)])\s*$")


def parse_interval(text: str) -> Interval:
    """Parse ``"(lo,hi)"`` / ``"[lo,hi]"`` (mixed brackets allowed).

    The tokens ``-inf`` / ``+inf`` / ``inf`` denote infinite endpoints.
    """
    m = _INTERVAL_RE.match(text)
    if not m:
        raise DomainError(f"cannot parse interval {text!r}")
    lb, lo_s, hi_s, rb = m.groups()

    def num(s: str) -> float:
        token = s.strip().lower()
        if token in _INF_TOKENS:
            return _INF_TOKENS[token]
        try:
            return float(token)
        except ValueError as exc:
            raise DomainError(f"bad interval endpoint {s!r}") from exc

    return Interval(
        lo=num(lo_s),
        hi=num(hi_s),
        lo_closed=(lb == "["),
        hi_closed=(rb == "]"),
    )
