"""Degrees, boxes and exact slopes."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from .fields import UsageError


@dataclass(frozen=True, order=True)
class Degree:
    """A bidegree (n, d) or tridegree (n, d, f)."""

    n: int
    d: int
    f: int | None = None

    def __post_init__(self):
        for v in (self.n, self.d):
            if not isinstance(v, int):
                raise UsageError("degree components must be integers")
        if self.f is not None and not isinstance(self.f, int):
            raise UsageError("filtration must be an integer")

    def __add__(self, other: "Degree") -> "Degree":
        f = None
        if self.f is not None and other.f is not None:
            f = self.f + other.f
        return Degree(self.n + other.n, self.d + other.d, f)

    def scale(self, c: int) -> "Degree":
        return Degree(c * self.n, c * self.d, None if self.f is None else c * self.f)

    @property
    def slope(self) -> Fraction:
        if self.n == 0:
            raise UsageError("slope d/n undefined at n = 0")
        return Fraction(self.d, self.n)

    def as_pair(self):
        return (self.n, self.d)

    def __str__(self):
        if self.f is None:
            return f"({self.n},{self.d})"
        return f"({self.n},{self.d},{self.f})"


def parse_degree(s: str) -> Degree:
    parts = [p.strip() for p in s.strip().lstrip("(").rstrip(")").split(",")]
    if len(parts) == 2:
        return Degree(int(parts[0]), int(parts[1]))
    if len(parts) == 3:
        return Degree(int(parts[0]), int(parts[1]), int(parts[2]))
    raise UsageError(f"cannot parse degree {s!r}")


@dataclass(frozen=True)
class Box:
    """A finite rectangular degree window.

    n ranges over n_min..n_max (n_min <= 0 extends into localization territory),
    d over d_min..d_max, and optionally f over f_min..f_max.
    """

    n_max: int
    d_min: int
    d_max: int
    n_min: int = 0
    f_min: int | None = None
    f_max: int | None = None

    def __post_init__(self):
        if self.n_min > self.n_max:
            raise UsageError("n_min > n_max")
        if self.d_min > self.d_max:
            raise UsageError("d_min > d_max")
        if (self.f_min is None) != (self.f_max is None):
            raise UsageError("f bounds must be given together")
        if self.f_min is not None and self.f_min > self.f_max:
            raise UsageError("f_min > f_max")

    def contains(self, deg: Degree) -> bool:
        if not (self.n_min <= deg.n <= self.n_max and self.d_min <= deg.d <= self.d_max):
            return False
        if self.f_min is not None and deg.f is not None:
            return self.f_min <= deg.f <= self.f_max
        return True

    def contains_nd(self, n: int, d: int) -> bool:
        return self.n_min <= n <= self.n_max and self.d_min <= d <= self.d_max

    def degrees(self):
        for n in range(self.n_min, self.n_max + 1):
            for d in range(self.d_min, self.d_max + 1):
                yield Degree(n, d)

    def shrink(self, n_max=None, d_min=None, d_max=None) -> "Box":
        return Box(n_max=self.n_max if n_max is None else n_max,
                   d_min=self.d_min if d_min is None else d_min,
                   d_max=self.d_max if d_max is None else d_max,
                   n_min=self.n_min, f_min=self.f_min, f_max=self.f_max)

    def to_json(self):
        out = {"n_min": self.n_min, "n_max": self.n_max,
               "d_min": self.d_min, "d_max": self.d_max}
        if self.f_min is not None:
            out["f_min"] = self.f_min
            out["f_max"] = self.f_max
        return out

    @staticmethod
    def from_json(obj) -> "Box":
        return Box(n_max=obj["n_max"], d_min=obj["d_min"], d_max=obj["d_max"],
                   n_min=obj.get("n_min", 0), f_min=obj.get("f_min"),
                   f_max=obj.get("f_max"))


def slope_str(q: Fraction) -> str:
    """Exact slope serialization 'p/q'."""
    return f"{q.numerator}/{q.denominator}"


def parse_slope(s) -> Fraction:
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(s.strip())


def compare_x_order(a: Degree, b: Degree) -> int:
    """The total order on x-element tridegrees: lexicographic on (d/n, f/d).

    Returns -1, 0 or 1. Both arguments need n > 0, d != 0 and f defined.
    """
    for deg in (a, b):
        if deg.n <= 0 or deg.d == 0 or deg.f is None:
            raise UsageError(f"x-order undefined at {deg}")
    key_a = (Fraction(a.d, a.n), Fraction(a.f, a.d))
    key_b = (Fraction(b.d, b.n), Fraction(b.f, b.d))
    return (key_a > key_b) - (key_a < key_b)


def quantized_slope(lam) -> Fraction:
    """The least k/(k+1) with lam <= k/(k+1); defined for 0 <= lam < 1."""
    lam = parse_slope(lam)
    if lam < 0:
        raise UsageError("slope must be >= 0")
    if lam >= 1:
        raise UsageError("no quantization below slope 1")
    # k/(k+1) >= lam  <=>  k >= lam/(1-lam)
    k = max(0, ceil(lam / (1 - lam)))
    return Fraction(k, k + 1)
