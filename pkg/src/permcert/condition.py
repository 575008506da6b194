"""The divisor condition on n-1 group elements (and its integer form)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import SpecMismatchError, WrongLengthError, ZeroInputError
from .group_core import GroupElement, GroupSpec, scalar_mul


def divisors(n: int) -> list[int]:
    """Positive divisors of n in increasing order."""
    if n < 1:
        raise ZeroInputError(f"divisors of {n} are undefined here")
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i != n // i:
                large.append(n // i)
        i += 1
    return small + large[::-1]


@dataclass(frozen=True)
class GroupInstance:
    """A group together with exactly exp(G) - 1 elements a_1..a_{n-1}."""

    spec: GroupSpec
    elements: tuple[GroupElement, ...]

    def __post_init__(self):
        n = self.spec.exponent
        if len(self.elements) != n - 1:
            raise WrongLengthError(
                f"exponent {n} needs {n - 1} elements, got {len(self.elements)}"
            )
        for a in self.elements:
            if not self.spec.contains(a):
                raise SpecMismatchError(f"{a!r} is not an element of {self.spec}")

    @classmethod
    def from_coords(cls, moduli: Sequence[int], elements: Sequence[Sequence[int]]):
        spec = moduli if isinstance(moduli, GroupSpec) else GroupSpec(tuple(moduli))
        return cls(spec, tuple(spec.element(e) for e in elements))

    @property
    def n(self) -> int:
        return self.spec.exponent

    def to_json(self) -> dict:
        return {"group": self.spec.to_json(), "elements": [list(a) for a in self.elements]}

    @classmethod
    def from_json(cls, obj: dict) -> GroupInstance:
        return cls.from_coords(obj["group"], obj["elements"])


@dataclass(frozen=True)
class ConditionRow:
    d: int
    count: int
    required: int

    @property
    def ok(self) -> bool:
        return self.count >= self.required

    def to_json(self) -> dict:
        return {"d": self.d, "count": self.count, "required": self.required, "ok": self.ok}


@dataclass(frozen=True)
class ConditionReport:
    n: int
    rows: tuple[ConditionRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.rows)

    @property
    def first_violation(self) -> int | None:
        for r in self.rows:
            if not r.ok:
                return r.d
        return None

    def row(self, d: int) -> ConditionRow:
        for r in self.rows:
            if r.d == d:
                return r
        raise KeyError(d)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "rows": [r.to_json() for r in self.rows],
            "passed": self.passed,
            "first_violation": self.first_violation,
        }


def check_condition(instance: GroupInstance) -> ConditionReport:
    """For each d | n count the a_s with (n/d) a_s != 0 and compare with d - 1."""
    spec, n = instance.spec, instance.n
    zero = spec.identity
    rows = []
    for d in divisors(n):
        k = n // d
        count = sum(1 for a in instance.elements if scalar_mul(spec, k, a) != zero)
        rows.append(ConditionRow(d, count, d - 1))
    return ConditionReport(n, tuple(rows))


def lift_integers(n: int, m: Sequence[int]) -> GroupInstance:
    """Cyclic instance over Z/n with a_s = m_s mod n.

    For d | n, d does not divide m_s exactly when (n/d)(m_s mod n) is nonzero
    in Z/n, so the integer condition and the group condition coincide.
    """
    if n < 2:
        raise ZeroInputError(f"n must be at least 2, got {n}")
    m = list(m)
    if len(m) != n - 1:
        raise WrongLengthError(f"n={n} needs {n - 1} integers, got {len(m)}")
    spec = GroupSpec((n,))
    return GroupInstance(spec, tuple((int(x) % n,) for x in m))


def integer_condition_counts(n: int, m: Sequence[int]) -> dict[int, int]:
    """Direct integer form: d -> |{s : d does not divide m_s}|."""
    return {d: sum(1 for x in m if x % d != 0) for d in divisors(n)}
