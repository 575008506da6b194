"""Constructive solvers for the zero-avoiding permutation and shifted-sum problems.

Both are reduced to perfect matchings. Public indices are 1-based: a
permutation sigma of {1..n-1} is stored as a tuple with sigma[s-1] = sigma(s).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

from .condition import ConditionReport, GroupInstance, check_condition
from .errors import (
    HypothesisViolatedError,
    NotABijectionError,
    TheoremContradiction,
    TooLargeError,
    WrongLengthError,
)
from .group_core import GroupElement, order, scalar_mul
from .matching import BipartiteGraph, max_matching

BRUTE_THM11_MAX_N = 7
BRUTE_THM13_MAX_N = 8


@dataclass(frozen=True)
class PermutationCertificate:
    sigma: tuple[int, ...]
    products: tuple[GroupElement, ...]
    violation_set: frozenset[int] = field(default_factory=frozenset)

    @property
    def products_nonzero(self) -> bool:
        return not self.violation_set

    def to_json(self) -> dict:
        return {
            "sigma": list(self.sigma),
            "certified": self.products_nonzero,
            "violations": sorted(self.violation_set),
        }


def _check_bijection(sigma: Sequence[int], n: int) -> tuple[int, ...]:
    sigma = tuple(int(x) for x in sigma)
    if sorted(sigma) != list(range(1, n)):
        raise NotABijectionError(f"{sigma} is not a permutation of 1..{n - 1}")
    return sigma


def build_thm11_graph(instance: GroupInstance) -> BipartiteGraph:
    """Left vertex s-1 (position s) joins right vertex j-1 (element a_j) iff s*a_j != 0,
    i.e. iff the order of a_j does not divide s."""
    n = instance.n
    orders = [order(instance.spec, a) for a in instance.elements]
    adjacency = tuple(
        tuple(j for j, o in enumerate(orders) if s % o != 0) for s in range(1, n)
    )
    return BipartiteGraph(n - 1, n - 1, adjacency)


def verify_permutation(instance: GroupInstance, sigma: Sequence[int]) -> PermutationCertificate:
    """Recompute every s*a_{sigma(s)} and collect the positions where it vanishes."""
    spec, n = instance.spec, instance.n
    sigma = _check_bijection(sigma, n)
    zero = spec.identity
    products = tuple(
        scalar_mul(spec, s, instance.elements[sigma[s - 1] - 1]) for s in range(1, n)
    )
    bad = frozenset(s for s, p in zip(range(1, n), products) if p == zero)
    return PermutationCertificate(sigma, products, bad)


def solve_thm11(instance: GroupInstance) -> PermutationCertificate | ConditionReport:
    """Certified permutation if the divisor condition holds, else the failing report.

    The matching is computed regardless of the condition, so a disagreement in
    either direction surfaces as TheoremContradiction.
    """
    report = check_condition(instance)
    g = build_thm11_graph(instance)
    m = max_matching(g)
    perfect = m.size == g.left_size
    if perfect != report.passed:
        raise TheoremContradiction(
            "matching existence disagrees with the divisor condition",
            {
                "instance": instance.to_json(),
                "condition": report.to_json(),
                "matching_size": m.size,
            },
        )
    if not perfect:
        return report
    sigma = tuple(m.pairs[s] + 1 for s in range(g.left_size))
    cert = verify_permutation(instance, sigma)
    if not cert.products_nonzero:
        raise TheoremContradiction(
            "matching produced a permutation with vanishing products",
            {"instance": instance.to_json(), "certificate": cert.to_json()},
        )
    return cert


def brute_force_thm11(instance: GroupInstance) -> PermutationCertificate | None:
    """Lexicographically first zero-avoiding permutation by scanning all of S_{n-1}."""
    n = instance.n
    if n > BRUTE_THM11_MAX_N:
        raise TooLargeError(f"brute force limited to n <= {BRUTE_THM11_MAX_N}")
    spec = instance.spec
    zero = spec.identity
    ok = [
        [scalar_mul(spec, s, a) != zero for a in instance.elements] for s in range(1, n)
    ]
    for perm in permutations(range(n - 1)):
        if all(ok[s][j] for s, j in enumerate(perm)):
            return verify_permutation(instance, [j + 1 for j in perm])
    return None


def thm13_hypothesis_holds(n: int, m: Sequence[int]) -> bool:
    """gcd(m_s, n) <= s for every s, with gcd(0, n) = n."""
    return all(math.gcd(abs(x), n) <= s for s, x in enumerate(m, start=1))


@dataclass(frozen=True)
class Thm13Input:
    n: int
    m: tuple[int, ...]
    a: tuple[int, ...]

    def __post_init__(self):
        if self.n < 2:
            raise WrongLengthError(f"n must be at least 2, got {self.n}")
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        object.__setattr__(self, "a", tuple(int(x) % self.n for x in self.a))
        if len(self.m) != self.n - 1 or len(self.a) != self.n - 1:
            raise WrongLengthError(f"n={self.n} needs {self.n - 1} values for m and a")
        for s, x in enumerate(self.m, start=1):
            if math.gcd(abs(x), self.n) > s:
                raise HypothesisViolatedError(
                    f"gcd(m_{s}, n) = gcd({x}, {self.n}) = {math.gcd(abs(x), self.n)} > {s}"
                )

    def to_json(self) -> dict:
        return {"n": self.n, "m": list(self.m), "a": list(self.a)}


@dataclass(frozen=True)
class Thm13Assignment:
    f: tuple[int, ...]

    def to_json(self) -> dict:
        return {"f": list(self.f)}


@dataclass(frozen=True)
class Thm13Verdict:
    ok: bool
    clause: str | None = None
    indices: tuple[int, ...] = ()

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "clause": self.clause, "indices": list(self.indices)}


def verify_thm13(inp: Thm13Input, f: Sequence[int]) -> Thm13Verdict:
    n = inp.n
    f = tuple(int(x) for x in f)
    if len(f) != n - 1:
        return Thm13Verdict(False, "length", ())
    for i, v in enumerate(f, start=1):
        if not 1 <= v <= n - 1:
            return Thm13Verdict(False, "range", (i,))
    for i, (v, m) in enumerate(zip(f, inp.m), start=1):
        if (v * m) % n == 0:
            return Thm13Verdict(False, "product", (i,))
    seen: dict[int, int] = {}
    for i, (v, a) in enumerate(zip(f, inp.a), start=1):
        r = (v + a) % n
        if r in seen:
            return Thm13Verdict(False, "distinct", (seen[r], i))
        seen[r] = i
    return Thm13Verdict(True)


def build_thm13_graph(inp: Thm13Input) -> BipartiteGraph:
    """Index i-1 joins residue r iff v = r - a_i (mod n) is nonzero and n does not divide v*m_i."""
    n = inp.n
    adjacency = []
    for m, a in zip(inp.m, inp.a):
        adjacency.append(
            tuple(r for r in range(n) if (r - a) % n != 0 and ((r - a) % n * m) % n != 0)
        )
    return BipartiteGraph(n - 1, n, tuple(adjacency))


def solve_thm13(inp: Thm13Input) -> Thm13Assignment:
    g = build_thm13_graph(inp)
    mt = max_matching(g)
    if mt.size != g.left_size:
        raise TheoremContradiction(
            "no assignment exists for a hypothesis-satisfying input",
            {"input": inp.to_json(), "matching_size": mt.size},
        )
    f = tuple((mt.pairs[i] - a) % inp.n for i, a in enumerate(inp.a))
    verdict = verify_thm13(inp, f)
    if not verdict:
        raise TheoremContradiction(
            "matching produced an invalid assignment",
            {"input": inp.to_json(), "f": list(f), "verdict": verdict.to_json()},
        )
    return Thm13Assignment(f)


def brute_force_thm13(inp: Thm13Input) -> Thm13Assignment | None:
    """Lexicographically first valid f over all maps {1..n-1} -> {1..n-1}.

    Depth-first in lexicographic order, cutting a branch as soon as a prefix
    breaks either clause; the first leaf reached is the lex-first valid map.
    """
    n = inp.n
    if n > BRUTE_THM13_MAX_N:
        raise TooLargeError(f"brute force limited to n <= {BRUTE_THM13_MAX_N}")
    k = n - 1
    f = [0] * k
    used = [False] * n

    def extend(i: int) -> bool:
        if i == k:
            return True
        m, a = inp.m[i], inp.a[i]
        for v in range(1, n):
            r = (v + a) % n
            if used[r] or (v * m) % n == 0:
                continue
            used[r] = True
            f[i] = v
            if extend(i + 1):
                return True
            used[r] = False
        return False

    return Thm13Assignment(tuple(f)) if extend(0) else None
