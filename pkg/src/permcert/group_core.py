"""Finite abelian groups presented as direct products Z/d_1 x ... x Z/d_k.

Elements are plain tuples of ints, one reduced coordinate per cyclic factor.
The presentation is not normalized to invariant factors; everything the
theorems need is the exponent and the element orders.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterator, Sequence

from .errors import (
    BudgetExceededError,
    EmptySpecError,
    ModulusTooSmallError,
    SpecMismatchError,
)

GroupElement = tuple[int, ...]

ENUMERATION_BUDGET = 1 << 24
LEX_SCAN_LIMIT = 1 << 16
MAX_MODULUS = 1 << 32


@dataclass(frozen=True)
class GroupSpec:
    moduli: tuple[int, ...]

    def __post_init__(self):
        if len(self.moduli) == 0:
            raise EmptySpecError("group needs at least one cyclic factor")
        for d in self.moduli:
            if not isinstance(d, int) or isinstance(d, bool):
                raise ModulusTooSmallError(f"modulus {d!r} is not an integer")
            if d < 2:
                raise ModulusTooSmallError(f"modulus {d} < 2")
            if d > MAX_MODULUS:
                raise ModulusTooSmallError(f"modulus {d} exceeds 2^32")

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.moduli)

    @cached_property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def is_cyclic(self) -> bool:
        # a finite abelian group is cyclic iff its order equals its exponent
        return self.order == self.exponent

    @property
    def identity(self) -> GroupElement:
        return (0,) * len(self.moduli)

    def contains(self, a) -> bool:
        return (
            isinstance(a, tuple)
            and len(a) == len(self.moduli)
            and all(isinstance(x, int) and 0 <= x < d for x, d in zip(a, self.moduli))
        )

    def check(self, a) -> GroupElement:
        if not self.contains(a):
            raise SpecMismatchError(f"{a!r} is not an element of Z/{self.moduli}")
        return a

    def element(self, coords: Sequence[int]) -> GroupElement:
        """Build an element, reducing each coordinate into range."""
        coords = tuple(int(c) for c in coords)
        if len(coords) != len(self.moduli):
            raise SpecMismatchError(
                f"expected {len(self.moduli)} coordinates, got {len(coords)}"
            )
        return tuple(c % d for c, d in zip(coords, self.moduli))

    def to_json(self) -> list[int]:
        return list(self.moduli)

    def __str__(self):
        return " x ".join(f"Z/{d}" for d in self.moduli)


def validate_spec(moduli: Sequence[int]) -> GroupSpec:
    if isinstance(moduli, str):
        moduli = json.loads(moduli)
    moduli = tuple(moduli)
    if not moduli:
        raise EmptySpecError("group needs at least one cyclic factor")
    return GroupSpec(moduli)


def add(spec: GroupSpec, a: GroupElement, b: GroupElement) -> GroupElement:
    spec.check(a)
    spec.check(b)
    return tuple((x + y) % d for x, y, d in zip(a, b, spec.moduli))


def neg(spec: GroupSpec, a: GroupElement) -> GroupElement:
    spec.check(a)
    return tuple((-x) % d for x, d in zip(a, spec.moduli))


def scalar_mul(spec: GroupSpec, s: int, a: GroupElement) -> GroupElement:
    if s < 0:
        raise ValueError("scalar must be non-negative")
    spec.check(a)
    return tuple((s * x) % d for x, d in zip(a, spec.moduli))


def order(spec: GroupSpec, a: GroupElement) -> int:
    spec.check(a)
    return math.lcm(*(d // math.gcd(x, d) for x, d in zip(a, spec.moduli)))


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (n is desk scale)."""
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def construct_max_order_element(spec: GroupSpec) -> GroupElement:
    """Coordinatewise construction of an element of order exp(G).

    For each prime p | n pick the factor with the largest p-adic valuation
    and add the element d_i / p^v of order p^v there. Components of coprime
    order sum to an element whose order is their product.
    """
    coords = [0] * spec.rank
    for p in factorize(spec.exponent):
        vals = [_valuation(d, p) for d in spec.moduli]
        i = max(range(spec.rank), key=lambda j: (vals[j], -j))
        d = spec.moduli[i]
        coords[i] = (coords[i] + d // p ** vals[i]) % d
    return tuple(coords)


def max_order_element(spec: GroupSpec) -> GroupElement:
    """An element whose order equals the exponent.

    Lexicographically least such element for groups of order <= 2^16,
    otherwise the coordinatewise construction.
    """
    n = spec.exponent
    if spec.order <= LEX_SCAN_LIMIT:
        for a in enumerate_elements(spec):
            if order(spec, a) == n:
                return a
    return construct_max_order_element(spec)


def enumerate_elements(
    spec: GroupSpec, budget: int = ENUMERATION_BUDGET
) -> Iterator[GroupElement]:
    """All elements in mixed-radix lexicographic order, identity first."""
    if spec.order > budget:
        raise BudgetExceededError(
            f"group order {spec.order} exceeds enumeration budget {budget}"
        )
    return product(*(range(d) for d in spec.moduli))


def encode(spec: GroupSpec, a: GroupElement) -> int:
    """Mixed-radix index of ``a``; agrees with the enumeration order."""
    idx = 0
    for x, d in zip(a, spec.moduli):
        idx = idx * d + x
    return idx


def decode(spec: GroupSpec, idx: int) -> GroupElement:
    coords = []
    for d in reversed(spec.moduli):
        idx, x = divmod(idx, d)
        coords.append(x)
    return tuple(reversed(coords))
