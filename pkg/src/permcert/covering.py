"""Covering systems of rational arithmetic progressions alpha + beta*Z.

Every such progression meets Z in either nothing or a single residue class
x0 + M*Z with M the numerator of beta, so coverage questions about integers
reduce to residue arithmetic with period lcm(M_s).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Sequence

from .errors import InputError, TooManyAPsError, WrongLengthError

MAX_APS = 20


@dataclass(frozen=True)
class RationalAP:
    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "beta", Fraction(self.beta))
        if self.beta <= 0:
            raise InputError(f"beta must be positive, got {self.beta}")

    def to_json(self) -> list[str]:
        return [str(self.alpha), str(self.beta)]

    def __str__(self):
        return f"{self.alpha}+({self.beta})Z"


@dataclass(frozen=True)
class IntegerTrace:
    residue: int | None = None
    modulus: int | None = None

    @property
    def empty(self) -> bool:
        return self.modulus is None

    def contains(self, x: int) -> bool:
        return not self.empty and (x - self.residue) % self.modulus == 0


def integer_trace(ap: RationalAP) -> IntegerTrace:
    """Integers of the form alpha + beta*q.

    With alpha = A/D and beta = P/D over a common denominator, we need
    P*q = -A (mod D). This is solvable iff g = gcd(P, D) divides A, and then
    the solutions x form a class modulo P/g = numerator(beta).
    """
    D = math.lcm(ap.alpha.denominator, ap.beta.denominator)
    A = ap.alpha.numerator * (D // ap.alpha.denominator)
    P = ap.beta.numerator * (D // ap.beta.denominator)
    g = math.gcd(P, D)
    if A % g:
        return IntegerTrace()
    step = D // g
    q0 = (-A // g) * pow(P // g, -1, step) % step if step > 1 else 0
    M = ap.beta.numerator
    x0 = (A + P * q0) // D
    return IntegerTrace(x0 % M, M)


@dataclass(frozen=True)
class CoveringSystem:
    aps: tuple[RationalAP, ...]

    def __post_init__(self):
        object.__setattr__(self, "aps", tuple(self.aps))
        if not self.aps:
            raise InputError("covering system needs at least one progression")

    @property
    def k(self) -> int:
        return len(self.aps)

    def traces(self) -> tuple[IntegerTrace, ...]:
        return self._traces

    @cached_property
    def _traces(self) -> tuple[IntegerTrace, ...]:
        return tuple(integer_trace(ap) for ap in self.aps)

    @cached_property
    def period(self) -> int:
        mods = [t.modulus for t in self._traces if not t.empty]
        return math.lcm(*mods) if mods else 1

    def to_json(self) -> list[list[str]]:
        return [ap.to_json() for ap in self.aps]

    @classmethod
    def from_json(cls, obj) -> CoveringSystem:
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(tuple(RationalAP(Fraction(a), Fraction(b)) for a, b in obj))

    def __str__(self):
        return "{" + ", ".join(str(ap) for ap in self.aps) + "}"


def covers_integer(sys: CoveringSystem, x: int) -> bool:
    return any(t.contains(x) for t in sys.traces())


def covers_range(sys: CoveringSystem, start: int, length: int) -> bool:
    if length < 1:
        raise InputError("range length must be at least 1")
    traces = [t for t in sys.traces() if not t.empty]
    return all(any(t.contains(x) for t in traces) for x in range(start, start + length))


def coverage_mask(sys: CoveringSystem) -> bytearray:
    """covered[x] for x in [0, period)."""
    L = sys.period
    covered = bytearray(L)
    for t in sys.traces():
        if not t.empty:
            covered[t.residue :: t.modulus] = b"\x01" * len(range(t.residue, L, t.modulus))
    return covered


def covers_all_integers(sys: CoveringSystem) -> bool:
    return all(coverage_mask(sys))


def distinct_fractional_sums(sys: CoveringSystem) -> int:
    """Number of distinct values {sum_{s in I} 1/beta_s} over subsets I.

    Reciprocals are scaled by the common denominator D of all 1/beta_s, so the
    fractional part of a subset sum is its scaled value mod D. Subsets are
    folded in one reciprocal at a time, deduplicating as we go.
    """
    if sys.k > MAX_APS:
        raise TooManyAPsError(f"{sys.k} progressions exceeds the limit of {MAX_APS}")
    recips = [1 / ap.beta for ap in sys.aps]
    D = math.lcm(*(r.denominator for r in recips))
    steps = [r.numerator * (D // r.denominator) % D for r in recips]
    sums = {0}
    for v in steps:
        sums |= {(x + v) % D for x in sums}
    return len(sums)


@dataclass(frozen=True)
class Lemma31Verdict:
    consistent: bool
    distinct_sums: int
    period: int
    covers_all: bool
    run_start: int | None = None

    @property
    def verdict(self) -> str:
        return "CONSISTENT" if self.consistent else "LEMMA_VIOLATION"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "N": self.distinct_sums,
            "period": self.period,
            "covers_all": self.covers_all,
            "run_start": self.run_start,
        }


def find_covered_run(sys: CoveringSystem, length: int) -> int | None:
    """Start of the first run of ``length`` consecutive covered integers in [0, L + length)."""
    covered = coverage_mask(sys)
    L = len(covered)
    run = 0
    for x in range(L + length):
        if covered[x % L]:
            run += 1
            if run >= length:
                return x - length + 1
        else:
            run = 0
    return None


def verify_lemma31(sys: CoveringSystem) -> Lemma31Verdict:
    """If N consecutive integers are covered then every integer is covered,
    where N counts the distinct fractional subset sums of 1/beta_s."""
    N = distinct_fractional_sums(sys)
    start = find_covered_run(sys, N)
    total = covers_all_integers(sys)
    return Lemma31Verdict(
        consistent=start is None or total,
        distinct_sums=N,
        period=sys.period,
        covers_all=total,
        run_start=start,
    )


def build_thm12_system(n: int, m: Sequence[int], sigma: Sequence[int]) -> CoveringSystem:
    """{s + (n / m_{sigma(s)}) Z : s = 1..n-1} for m already normalized into 1..n."""
    m = list(m)
    sigma = list(sigma)
    if len(m) != n - 1 or len(sigma) != n - 1:
        raise WrongLengthError(f"n={n} needs {n - 1} values of m and sigma")
    if sorted(sigma) != list(range(1, n)):
        raise InputError(f"{sigma} is not a permutation of 1..{n - 1}")
    for x in m:
        if not 1 <= x <= n:
            raise InputError(f"m values must lie in 1..{n}, got {x}")
    return CoveringSystem(
        tuple(RationalAP(Fraction(s), Fraction(n, m[sigma[s - 1] - 1])) for s in range(1, n))
    )
