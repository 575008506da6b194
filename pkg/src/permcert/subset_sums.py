"""Subset-sum reachability modulo n and in finite abelian groups."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

from .condition import GroupInstance
from .errors import (
    BudgetExceededError,
    HypothesisViolatedError,
    TheoremContradiction,
    WrongLengthError,
)
from .group_core import (
    ENUMERATION_BUDGET,
    GroupSpec,
    add,
    decode,
    encode,
    enumerate_elements,
    scalar_mul,
)

TABLE_LIMIT = 4096
REVERIFY_LIMIT = 1 << 20
DUMP_LIMIT = 4096


@dataclass(frozen=True)
class ResidueCoverage:
    n: int
    reachable: frozenset[int]

    @property
    def complete(self) -> bool:
        return len(self.reachable) == self.n

    def missing(self) -> list[int]:
        return [r for r in range(self.n) if r not in self.reachable]

    def to_json(self) -> dict:
        return {"n": self.n, "reachable": sorted(self.reachable), "complete": self.complete}


def residue_coverage(n: int, m: Sequence[int]) -> ResidueCoverage:
    """Residues mod n hit by sums over subsets of m.

    Bit r of ``mask`` marks residue r; adding m_i rotates the mask by m_i.
    """
    m = list(m)
    if n < 2:
        raise WrongLengthError(f"n must be at least 2, got {n}")
    if len(m) != n - 1:
        raise WrongLengthError(f"n={n} needs {n - 1} integers, got {len(m)}")
    full = (1 << n) - 1
    mask = 1
    for x in m:
        k = x % n
        if k:
            mask |= ((mask << k) | (mask >> (n - k))) & full
    return ResidueCoverage(n, frozenset(r for r in range(n) if mask >> r & 1))


def brute_force_subset_sums(spec: GroupSpec, elements: Sequence[tuple]) -> set[tuple]:
    """Every subset sum by explicit enumeration of all 2^len subsets."""
    out = set()
    idx = range(len(elements))
    for size in range(len(elements) + 1):
        for subset in combinations(idx, size):
            total = spec.identity
            for i in subset:
                total = add(spec, total, elements[i])
            out.add(total)
    return out


@lru_cache(maxsize=64)
def _translation_table(spec: GroupSpec) -> tuple[tuple[int, ...], ...]:
    """table[a][x] = encode(decode(x) + decode(a))."""
    elems = list(enumerate_elements(spec))
    return tuple(
        tuple(encode(spec, add(spec, x, a)) for x in elems) for a in elems
    )


def reachable_indices(spec: GroupSpec, elements: Sequence[tuple]) -> set[int]:
    """Mixed-radix indices of all subset sums.

    Small groups use a cached translation table; larger ones a boolean mask
    of shape ``spec.moduli`` translated with np.roll along every axis.
    """
    if spec.order > ENUMERATION_BUDGET:
        raise BudgetExceededError(
            f"group order {spec.order} exceeds budget {ENUMERATION_BUDGET}"
        )
    if spec.order <= TABLE_LIMIT:
        table = _translation_table(spec)
        reach = {0}
        for a in elements:
            row = table[encode(spec, a)]
            reach |= {row[x] for x in reach}
        return reach
    mask = np.zeros(spec.moduli, dtype=bool)
    mask[spec.identity] = True
    axes = tuple(range(spec.rank))
    for a in elements:
        if any(a):
            mask |= np.roll(mask, shift=a, axis=axes)
    return {int(i) for i in np.flatnonzero(mask)}


@dataclass(frozen=True)
class SubsetSumReport:
    instance: GroupInstance
    reachable_count: int
    candidate_counterexample: bool = False
    reverified: bool | None = None
    reachable: tuple[tuple[int, ...], ...] | None = field(default=None, compare=False)

    @property
    def bound(self) -> int:
        return self.instance.n

    @property
    def meets_bound(self) -> bool:
        return self.reachable_count >= self.bound

    @property
    def verdict(self) -> str:
        if self.meets_bound:
            return "meets_bound"
        return "candidate_counterexample"

    def to_json(self) -> dict:
        out = {
            "instance": self.instance.to_json(),
            "count": self.reachable_count,
            "bound": self.bound,
            "meets_bound": self.meets_bound,
            "verdict": self.verdict,
        }
        if self.candidate_counterexample:
            out["reverified"] = self.reverified
            if self.reachable is not None:
                out["reachable"] = [list(x) for x in self.reachable]
        return out


def group_subset_sums(instance: GroupInstance) -> SubsetSumReport:
    reach = reachable_indices(instance.spec, instance.elements)
    return SubsetSumReport(instance, len(reach))


def subset_sum_hypothesis_violations(instance: GroupInstance) -> list[int]:
    """Positions s with s * a_s = 0."""
    spec = instance.spec
    zero = spec.identity
    return [
        s
        for s, a in enumerate(instance.elements, start=1)
        if scalar_mul(spec, s, a) == zero
    ]


def conjecture12_check(instance: GroupInstance) -> SubsetSumReport:
    """Count subset sums of a_1..a_{n-1} given s*a_s != 0 for every s.

    Cyclic groups are covered by a theorem, so a short count there raises
    TheoremContradiction. Elsewhere a short count is returned as a candidate
    counterexample after re-checking it by full subset enumeration.
    """
    bad = subset_sum_hypothesis_violations(instance)
    if bad:
        raise HypothesisViolatedError(f"s * a_s = 0 for s in {bad}")
    report = group_subset_sums(instance)
    if report.meets_bound:
        return report
    spec = instance.spec
    if spec.is_cyclic:
        raise TheoremContradiction(
            "cyclic group with fewer than n subset sums",
            {"instance": instance.to_json(), "count": report.reachable_count},
        )
    reverified = None
    if 2 ** len(instance.elements) <= REVERIFY_LIMIT:
        direct = brute_force_subset_sums(spec, instance.elements)
        reverified = len(direct) == report.reachable_count and len(direct) < instance.n
    dump = None
    if spec.order <= DUMP_LIMIT:
        dump = tuple(
            decode(spec, i)
            for i in sorted(reachable_indices(spec, instance.elements))
        )
    return SubsetSumReport(
        instance,
        report.reachable_count,
        candidate_counterexample=True,
        reverified=reverified,
        reachable=dump,
    )
