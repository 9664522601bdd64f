"""Coefficient fields: Q and F_p with exact arithmetic."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction


class UsageError(ValueError):
    """Caller violated a precondition (bad input, mismatched field, ...)."""


class ResourceError(RuntimeError):
    """A computation exceeded its budget; carries the completed sub-box."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 2 ** 16:
        if p in (2, 3):
            return True
        if p % 2 == 0 or p % 3 == 0:
            return False
        i = 5
        while i * i <= p:
            if p % i == 0 or p % (i + 2) == 0:
                return False
            i += 6
        return True
    # Miller-Rabin, 40 fixed-seed rounds: probabilistic but deterministic per input.
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    rng = random.Random(0xC0FFEE ^ p)
    for _ in range(40):
        a = rng.randrange(2, p - 1)
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The coefficient field: kind 'prime' with characteristic p, or 'rational'."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind == "prime":
            if self.p is None or not _is_prime(self.p):
                raise UsageError(f"not a prime: {self.p!r}")
        elif self.kind == "rational":
            if self.p is not None:
                raise UsageError("rational field takes no p")
        else:
            raise UsageError(f"unknown field kind {self.kind!r}")

    @staticmethod
    def prime(p: int) -> "FieldSpec":
        return FieldSpec("prime", p)

    @staticmethod
    def rational() -> "FieldSpec":
        return FieldSpec("rational")

    @property
    def char(self) -> int:
        return self.p if self.kind == "prime" else 0

    # -- scalar arithmetic ------------------------------------------------
    def zero(self):
        return 0 if self.kind == "prime" else Fraction(0)

    def one(self):
        return 1 if self.kind == "prime" else Fraction(1)

    def coerce(self, a):
        if self.kind == "prime":
            return int(a) % self.p
        return Fraction(a)

    def add(self, a, b):
        return (a + b) % self.p if self.kind == "prime" else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.kind == "prime" else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.kind == "prime" else a * b

    def neg(self, a):
        return (-a) % self.p if self.kind == "prime" else -a

    def inv(self, a):
        if self.kind == "prime":
            if a % self.p == 0:
                raise ZeroDivisionError("inverse of 0")
            return pow(a, -1, self.p)
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return Fraction(1) / a

    def is_zero(self, a) -> bool:
        return (a % self.p == 0) if self.kind == "prime" else a == 0

    def __str__(self):
        return f"F_{self.p}" if self.kind == "prime" else "Q"


F2 = FieldSpec.prime(2)
F3 = FieldSpec.prime(3)
QQ = FieldSpec.rational()
