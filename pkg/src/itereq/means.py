"""Quasi-arithmetic means and their generator maps.

A generator is a continuous bijection ``phi`` from an interval onto an
interval; the associated mean of ``x_0..x_n`` is
``phi^{-1}( (phi(x_0) + ... + phi(x_n)) / (n+1) )``.  Three generator
kinds cover the solved instances:

* ``identity``  -- arithmetic mean;
* ``power`` p   -- ``phi(x) = x^(1/p)``; e.g. p = 2 averages square roots;
* ``log``       -- ``phi(x) = log x``, the geometric mean.

Power and log generators require a domain inside (0, +inf).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .intervals import Interval

_KINDS = ("identity", "power", "log")


@dataclass(frozen=True)
class Generator:
    """Generator map of a quasi-arithmetic mean, with its domain."""

    kind: str
    domain: Interval
    p: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise DomainError(f"unknown generator kind {self.kind!r}")
        if self.kind == "power":
            if self.p is None or self.p == 0.0:
                raise DomainError("power generator needs a nonzero exponent p")
        elif self.p is not None:
            raise DomainError(f"{self.kind} generator takes no exponent")
        if self.kind in ("power", "log") and self.domain.lo < 0.0:
            raise DomainError(
                f"{self.kind} generator needs a domain inside (0, +inf), "
                f"got {self.domain}"
            )
        if self.kind in ("power", "log") and self.domain.lo == 0.0 and self.domain.lo_closed:
            raise DomainError(f"{self.kind} generator domain must exclude 0")

    # -- forward / inverse maps ------------------------------------------------

    def phi(self, x):
        if self.kind == "identity":
            return x
        if self.kind == "log":
            return np.log(x) if isinstance(x, np.ndarray) else math.log(x)
        e = 1.0 / self.p
        return _power(x, e)

    def phi_inv(self, y):
        if self.kind == "identity":
            return y
        if self.kind == "log":
            return np.exp(y) if isinstance(y, np.ndarray) else math.exp(y)
        return _power(y, self.p)

    @property
    def increasing(self) -> bool:
        """Orientation of phi on its domain."""
        if self.kind == "power":
            return self.p > 0.0
        return True

    # -- domain transport --------------------------------------------------------

    def _phi_limit(self, v: float) -> float:
        """phi extended to endpoint values 0 and +-inf by continuity."""
        if self.kind == "identity":
            return v
        if self.kind == "log":
            if v == 0.0:
                return -math.inf
            if v == math.inf:
                return math.inf
            return math.log(v)
        e = 1.0 / self.p
        if v == 0.0:
            return 0.0 if e > 0 else math.inf
        if v == math.inf:
            return math.inf if e > 0 else 0.0
        return v ** e

    def _phi_inv_limit(self, v: float) -> float:
        """phi^{-1} extended to endpoint values 0 and +-inf by continuity."""
        if self.kind == "identity":
            return v
        if self.kind == "log":
            if v == -math.inf:
                return 0.0
            if v == math.inf:
                return math.inf
            return math.exp(v)
        if v == 0.0:
            return 0.0 if self.p > 0 else math.inf
        if v == math.inf:
            return math.inf if self.p > 0 else 0.0
        return v ** self.p

    def transport(self, interval: Interval) -> Interval:
        """The image phi(interval), respecting orientation and openness."""
        lo_img = self._phi_limit(interval.lo)
        hi_img = self._phi_limit(interval.hi)
        if self.increasing:
            return Interval(lo_img, hi_img, interval.lo_closed, interval.hi_closed)
        return Interval(hi_img, lo_img, interval.hi_closed, interval.lo_closed)

    def image(self) -> Interval:
        return self.transport(self.domain)

    # -- serialization --------------------------------------------------------------

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "power":
            out["p"] = self.p
        return out

    @classmethod
    def from_json(cls, obj: dict, domain: Interval) -> "Generator":
        kind = obj["kind"]
        return cls(kind=kind, domain=domain, p=obj.get("p"))


def _power(x, e: float):
    if isinstance(x, np.ndarray):
        return np.power(x, e)
    return float(x) ** e


def identity_generator(domain: Interval) -> Generator:
    return Generator("identity", domain)


def log_generator(domain: Interval) -> Generator:
    return Generator("log", domain)


def power_generator(p: float, domain: Interval) -> Generator:
    return Generator("power", domain, p=p)


def qa_mean(gen: Generator, values: Sequence[float]) -> float:
    """Quasi-arithmetic mean of ``values`` under ``gen``.

    Every value must lie in the generator's domain; the result lies
    between the smallest and largest input (internality).  A constant
    tuple returns its value exactly (idempotence).
    """
    vals = [float(v) for v in values]
    if not vals:
        raise DomainError("mean of an empty tuple")
    for v in vals:
        if not gen.domain.contains(v):
            raise DomainError(f"value {v!r} outside generator domain {gen.domain}")
    if min(vals) == max(vals):
        return vals[0]
    total = math.fsum(gen.phi(v) for v in vals)
    return float(gen.phi_inv(total / len(vals)))


def qa_mean_rows(gen: Generator, rows: np.ndarray, anchor: int = 0) -> np.ndarray:
    """Column-wise quasi-arithmetic mean of a (terms, points) array.

    The sum is taken over deviations from the ``anchor`` row, which keeps
    the result exact (by idempotence) wherever all rows agree and well
    conditioned everywhere else.  No domain checking: callers mask points
    first.
    """
    if gen.kind == "identity":
        phi_vals = rows
    else:
        phi_vals = gen.phi(rows)
    dev = np.add.reduce(phi_vals - phi_vals[anchor], axis=0) / rows.shape[0]
    mean_phi = phi_vals[anchor] + dev
    if gen.kind == "identity":
        general = mean_phi
    else:
        general = gen.phi_inv(mean_phi)
    return np.where(dev == 0.0, rows[anchor], general)
