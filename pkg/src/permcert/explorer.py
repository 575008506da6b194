"""Batch verification and conjecture sweeps with reproducible JSONL logs.

Log layout: one header line (``"type": "header"``, carries the timestamp and
worker count), then one record per instance in index order, then a summary
line. Everything after the header depends only on the config, never on
scheduling, so two runs of the same config have byte-identical bodies.

Random instances draw from ``random.Random(instance_seed(master, index))``
where the per-instance seed is the first 8 bytes (big-endian) of
``sha256(f"{master}:{index}")``. Parallel workers therefore cannot change
which instances are sampled.
"""
from __future__ import annotations

import hashlib
import json
import math
import multiprocessing
import random
import sys
from collections import Counter
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from itertools import combinations_with_replacement, islice, product
from pathlib import Path
from typing import Iterator

from . import __version__
from .condition import GroupInstance, check_condition, lift_integers
from .covering import (
    CoveringSystem,
    RationalAP,
    build_thm12_system,
    covers_integer,
    covers_range,
    distinct_fractional_sums,
    verify_lemma31,
)
from .errors import (
    BudgetExceededError,
    HypothesisViolatedError,
    InputError,
    MalformedLogError,
    TheoremContradiction,
)
from .group_core import GroupSpec, enumerate_elements
from .subset_sums import (
    conjecture12_check,
    residue_coverage,
    subset_sum_hypothesis_violations,
)
from .theorem_solvers import (
    PermutationCertificate,
    Thm13Input,
    solve_thm11,
    solve_thm13,
    thm13_hypothesis_holds,
)

MODES = ("thm11", "thm12", "thm13", "conj12", "lemma31")
STRATEGIES = ("exhaustive", "random")
FILTERS = ("condition", "hypothesis")
ALARMS = frozenset({"theorem_contradiction", "lemma_violation", "candidate_counterexample"})
RNG_DESCRIPTION = (
    f"python-random-MT19937 (python {sys.version_info.major}.{sys.version_info.minor}); "
    "instance seed = sha256('<master>:<index>')[:8] big-endian"
)
MAX_REJECTIONS = 100_000


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    group: tuple[int, ...] | None = None
    strategy: str = "random"
    count: int = 1000
    seed: int = 0
    jobs: int = 1
    out: str | None = None
    filter: str | None = None
    dedup: bool = False
    max_k: int = 8
    bound: int = 12
    max_instances: int = 10**7
    batch_size: int = 512

    def __post_init__(self):
        if self.mode not in MODES:
            raise InputError(f"unknown mode {self.mode!r}; choose from {MODES}")
        if self.strategy not in STRATEGIES:
            raise InputError(f"unknown strategy {self.strategy!r}")
        if self.filter is not None and self.filter not in FILTERS:
            raise InputError(f"unknown filter {self.filter!r}")
        if self.group is not None:
            object.__setattr__(self, "group", tuple(int(d) for d in self.group))
        if self.mode != "lemma31" and self.group is None:
            raise InputError(f"mode {self.mode} needs --group")
        if self.mode in ("thm12", "thm13") and len(self.group) != 1:
            raise InputError(f"mode {self.mode} needs a single cyclic modulus, e.g. [6]")
        if self.mode == "lemma31" and self.strategy != "random":
            raise InputError("lemma31 systems are sampled; use --strategy random")
        if self.dedup and self.mode in ("thm13", "lemma31"):
            raise InputError(f"dedup is not meaningful for mode {self.mode}")
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must be a 64-bit unsigned integer")
        if self.jobs < 1 or self.count < 0:
            raise InputError("jobs must be >= 1 and count >= 0")

    def body_json(self) -> dict:
        """Config fields that determine the log body (excludes jobs and out)."""
        d = asdict(self)
        d.pop("jobs")
        d.pop("out")
        d.pop("batch_size")
        d["group"] = list(self.group) if self.group is not None else None
        return d


@dataclass
class Summary:
    total: int = 0
    counts: Counter = field(default_factory=Counter)
    alarms: list[dict] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 3 if self.alarms else 0

    def to_json(self) -> dict:
        return {
            "type": "summary",
            "total": self.total,
            "counts": dict(sorted(self.counts.items())),
            "alarms": len(self.alarms),
        }


def instance_seed(master: int, index: int) -> int:
    digest = hashlib.sha256(f"{master}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


# ---------------------------------------------------------------- generation


def _passes_filter(config: ExperimentConfig, desc: dict):
    """Return the (possibly reordered) descriptor if it passes, else None."""
    flt = config.filter
    if flt is None:
        return desc
    mode = config.mode
    if mode == "thm13":
        if flt == "hypothesis":
            return desc if thm13_hypothesis_holds(desc["n"], desc["m"]) else None
        return desc if check_condition(lift_integers(desc["n"], desc["m"])).passed else None
    if mode == "thm12":
        inst = lift_integers(desc["n"], desc["m"])
    else:
        inst = GroupInstance.from_json(desc)
    if flt == "condition":
        return desc if check_condition(inst).passed else None
    # hypothesis: s * a_s != 0 for every s
    if not subset_sum_hypothesis_violations(inst):
        return desc
    if config.dedup and mode != "thm12":
        # a multiset admits a hypothesis-satisfying order iff a zero-avoiding
        # permutation exists; emit the elements in that order
        res = solve_thm11(inst)
        if isinstance(res, PermutationCertificate):
            elems = [inst.elements[j - 1] for j in res.sigma]
            return {"group": desc["group"], "elements": [list(e) for e in elems]}
    return None


def _raw_count(config: ExperimentConfig, base: int, length: int) -> int:
    if config.dedup:
        return math.comb(base + length - 1, length)
    return base**length


def _exhaustive(config: ExperimentConfig) -> Iterator[dict]:
    spec = GroupSpec(config.group)
    n = spec.exponent
    if config.mode == "thm13":
        total = n ** (2 * (n - 1))
        if total > config.max_instances:
            raise BudgetExceededError(f"{total} instances exceed budget {config.max_instances}")
        for m in product(range(1, n + 1), repeat=n - 1):
            for a in product(range(n), repeat=n - 1):
                yield {"n": n, "m": list(m), "a": list(a)}
        return
    if config.mode == "thm12":
        pool = list(range(1, n + 1))
    else:
        pool = [list(e) for e in enumerate_elements(spec)]
    total = _raw_count(config, len(pool), n - 1)
    if total > config.max_instances:
        raise BudgetExceededError(f"{total} instances exceed budget {config.max_instances}")
    tuples = (
        combinations_with_replacement(range(len(pool)), n - 1)
        if config.dedup
        else product(range(len(pool)), repeat=n - 1)
    )
    for t in tuples:
        if config.mode == "thm12":
            yield {"n": n, "m": [pool[i] for i in t]}
        else:
            yield {"group": list(spec.moduli), "elements": [pool[i] for i in t]}


def _random_system(rng: random.Random, max_k: int, bound: int) -> dict:
    aps = []
    for _ in range(rng.randint(1, max_k)):
        beta = Fraction(rng.randint(1, bound), rng.randint(1, bound))
        # half the time share beta's denominator so the trace is often nonempty
        den = beta.denominator if rng.random() < 0.5 else rng.randint(1, bound)
        alpha = Fraction(rng.randint(-bound, bound), den)
        aps.append([str(alpha), str(beta)])
    return {"system": aps}


def _random_descriptor(config: ExperimentConfig, rng: random.Random) -> dict:
    if config.mode == "lemma31":
        return _random_system(rng, config.max_k, config.bound)
    spec = GroupSpec(config.group)
    n = spec.exponent
    if config.mode == "thm13":
        if config.filter == "hypothesis":
            m = [
                rng.choice([x for x in range(1, n + 1) if math.gcd(x, n) <= s])
                for s in range(1, n)
            ]
        else:
            m = [rng.randint(1, n) for _ in range(n - 1)]
        return {"n": n, "m": m, "a": [rng.randrange(n) for _ in range(n - 1)]}
    if config.mode == "thm12":
        return {"n": n, "m": [rng.randint(1, n) for _ in range(n - 1)]}
    elems = [[rng.randrange(d) for d in spec.moduli] for _ in range(n - 1)]
    return {"group": list(spec.moduli), "elements": elems}


def generate_instances(config: ExperimentConfig) -> Iterator[tuple[int, int | None, dict]]:
    """Yield (index, per-instance seed or None, descriptor) in index order."""
    if config.strategy == "exhaustive":
        index = 0
        for desc in _exhaustive(config):
            desc = _passes_filter(config, desc)
            if desc is not None:
                yield index, None, desc
                index += 1
        return
    for index in range(config.count):
        seed = instance_seed(config.seed, index)
        rng = random.Random(seed)
        for _ in range(MAX_REJECTIONS):
            desc = _passes_filter(config, _random_descriptor(config, rng))
            if desc is not None:
                break
        else:
            raise BudgetExceededError(
                f"no instance passed filter {config.filter!r} in {MAX_REJECTIONS} draws"
            )
        yield index, seed, desc


# ---------------------------------------------------------------- evaluation


def _eval_thm12(desc: dict) -> tuple[str, dict]:
    n, m = desc["n"], desc["m"]
    cov = residue_coverage(n, m)
    report = check_condition(lift_integers(n, m))
    if not report.passed:
        return "condition_failed", {
            "complete": cov.complete,
            "first_violation": report.first_violation,
        }
    if not cov.complete:
        raise TheoremContradiction(
            "condition holds but residues are missing",
            {"n": n, "m": m, "missing": cov.missing()},
        )
    cert = solve_thm11(lift_integers(n, m))
    system = build_thm12_system(n, [x if x % n else n for x in m], cert.sigma)
    N = distinct_fractional_sums(system)
    chain = {
        "covers_1_to_n_minus_1": covers_range(system, 1, n - 1),
        "misses_0": not covers_integer(system, 0),
        "N": N,
    }
    if not (chain["covers_1_to_n_minus_1"] and chain["misses_0"] and N >= n):
        raise TheoremContradiction(
            "covering construction broke", {"n": n, "m": m, "sigma": list(cert.sigma), **chain}
        )
    return "complete", {"sigma": list(cert.sigma), **chain}


def evaluate(mode: str, desc: dict) -> tuple[str, dict]:
    """Run one check. Returns (verdict, payload); theorem failures become verdicts."""
    try:
        if mode == "thm11":
            res = solve_thm11(GroupInstance.from_json(desc))
            if isinstance(res, PermutationCertificate):
                return "certified", res.to_json()
            return "condition_failed", res.to_json()
        if mode == "thm12":
            return _eval_thm12(desc)
        if mode == "thm13":
            try:
                inp = Thm13Input(desc["n"], desc["m"], desc["a"])
            except HypothesisViolatedError as exc:
                return "hypothesis_violated", {"reason": str(exc)}
            return "solved", {"f": list(solve_thm13(inp).f)}
        if mode == "conj12":
            try:
                rep = conjecture12_check(GroupInstance.from_json(desc))
            except HypothesisViolatedError as exc:
                return "hypothesis_violated", {"reason": str(exc)}
            payload = rep.to_json()
            payload.pop("instance")
            return rep.verdict, payload
        if mode == "lemma31":
            v = verify_lemma31(CoveringSystem.from_json(desc["system"]))
            return ("consistent" if v.consistent else "lemma_violation"), v.to_json()
    except TheoremContradiction as exc:
        return "theorem_contradiction", {"message": str(exc), "dump": exc.dump}
    raise InputError(f"unknown mode {mode!r}")


def _evaluate_batch(args) -> list[str]:
    mode, batch = args
    lines = []
    for index, seed, desc in batch:
        verdict, payload = evaluate(mode, desc)
        rec = {
            "index": index,
            "seed": seed,
            "mode": mode,
            "instance": desc,
            "verdict": verdict,
            "payload": payload,
        }
        lines.append(json.dumps(rec, separators=(",", ":")))
    return lines


def _batches(config: ExperimentConfig):
    it = generate_instances(config)
    while True:
        batch = list(islice(it, config.batch_size))
        if not batch:
            return
        yield config.mode, batch


def header_line(config: ExperimentConfig) -> str:
    hdr = {
        "type": "header",
        "tool": "permcert",
        "version": __version__,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "jobs": config.jobs,
        "rng": RNG_DESCRIPTION,
        "config": config.body_json(),
    }
    return json.dumps(hdr, separators=(",", ":"))


def iter_records(config: ExperimentConfig) -> Iterator[str]:
    """Record lines in index order, evaluated on ``config.jobs`` processes."""
    if config.jobs == 1:
        for args in _batches(config):
            yield from _evaluate_batch(args)
        return
    ctx = multiprocessing.get_context("fork" if sys.platform != "win32" else "spawn")
    with ctx.Pool(config.jobs) as pool:
        # imap preserves submission order, so merge order is the index order
        for lines in pool.imap(_evaluate_batch, _batches(config)):
            yield from lines


def run_experiment(config: ExperimentConfig) -> Summary:
    summary = Summary()
    fh = open(config.out, "w", encoding="utf-8") if config.out else None
    try:
        if fh:
            fh.write(header_line(config) + "\n")
        for line in iter_records(config):
            rec = json.loads(line)
            summary.total += 1
            summary.counts[rec["verdict"]] += 1
            if rec["verdict"] in ALARMS:
                summary.alarms.append(rec)
            if fh:
                fh.write(line + "\n")
        if fh:
            fh.write(json.dumps(summary.to_json(), separators=(",", ":")) + "\n")
    finally:
        if fh:
            fh.close()
    return summary


# ---------------------------------------------------------------- reporting


def load_log(path) -> tuple[dict, list[dict], dict | None]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedLogError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MalformedLogError(f"{path} is empty")
    try:
        objs = [json.loads(ln) for ln in lines]
    except json.JSONDecodeError as exc:
        raise MalformedLogError(f"{path}: invalid JSON line: {exc}") from exc
    if not isinstance(objs[0], dict) or objs[0].get("type") != "header":
        raise MalformedLogError(f"{path}: first line is not a header")
    header, rest = objs[0], objs[1:]
    summary = None
    if rest and isinstance(rest[-1], dict) and rest[-1].get("type") == "summary":
        summary, rest = rest[-1], rest[:-1]
    for rec in rest:
        if not isinstance(rec, dict) or not {"index", "mode", "instance", "verdict"} <= rec.keys():
            raise MalformedLogError(f"{path}: malformed record {rec!r}")
    return header, rest, summary


def replay_record(rec: dict) -> bool:
    """Re-run a record's descriptor standalone; True if the verdict reproduces."""
    verdict, _ = evaluate(rec["mode"], rec["instance"])
    return verdict == rec["verdict"]


def emit_report(path) -> str:
    header, records, _ = load_log(path)
    counts = Counter(r["verdict"] for r in records)
    alarms = [r for r in records if r["verdict"] in ALARMS]
    cfg = header.get("config", {})
    out = [
        f"log: {path}",
        f"mode: {cfg.get('mode')}  group: {cfg.get('group')}  strategy: {cfg.get('strategy')}",
        "verdicts: " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())),
    ]
    if not alarms:
        out.append(f"all {len(records)} instances consistent")
        return "\n".join(out)
    out.append(f"{len(alarms)} alarm record(s):")
    for rec in alarms:
        out.append(json.dumps(rec, separators=(",", ":")))
        status = "reproduced" if replay_record(rec) else "DID NOT REPRODUCE"
        extra = ""
        if rec["verdict"] == "candidate_counterexample":
            extra = f", re-verified by enumeration: {rec['payload'].get('reverified')}"
        out.append(f"  replay: {status}{extra}")
    return "\n".join(out)


def log_has_alarms(path) -> bool:
    _, records, _ = load_log(path)
    return any(r["verdict"] in ALARMS for r in records)
