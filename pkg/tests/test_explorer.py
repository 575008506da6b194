import json
from itertools import product

import pytest

from permcert import cli
from permcert.condition import check_condition, lift_integers
from permcert.errors import InputError, MalformedLogError
from permcert.explorer import (
    ExperimentConfig,
    emit_report,
    evaluate,
    generate_instances,
    instance_seed,
    load_log,
    replay_record,
    run_experiment,
)
from permcert.condition import GroupInstance
from permcert.subset_sums import subset_sum_hypothesis_violations


def body(path):
    return path.read_text().splitlines()[1:]


def test_exhaustive_counts():
    assert len(list(generate_instances(ExperimentConfig("thm11", (3,), "exhaustive")))) == 9
    assert len(list(generate_instances(ExperimentConfig("thm11", (3,), "exhaustive", dedup=True)))) == 6
    assert len(list(generate_instances(ExperimentConfig("thm11", (2,), "exhaustive")))) == 2


def test_exhaustive_is_lexicographic():
    descs = [d for _, _, d in generate_instances(ExperimentConfig("thm11", (3,), "exhaustive"))]
    assert descs[0]["elements"] == [[0], [0]]
    assert descs[1]["elements"] == [[0], [1]]
    assert descs[-1]["elements"] == [[2], [2]]


def test_random_is_reproducible():
    cfg = ExperimentConfig("thm11", (12,), "random", count=100, seed=7)
    first = list(generate_instances(cfg))
    assert len(first) == 100
    assert first == list(generate_instances(cfg))
    assert first[3][1] == instance_seed(7, 3)


def test_seed_depends_only_on_master_and_index():
    short = list(generate_instances(ExperimentConfig("conj12", (4, 2), count=10, seed=5, filter="hypothesis")))
    long = list(generate_instances(ExperimentConfig("conj12", (4, 2), count=50, seed=5, filter="hypothesis")))
    assert long[:10] == short


def test_filters():
    cfg = ExperimentConfig("thm11", (4,), "exhaustive", filter="condition")
    for _, _, d in generate_instances(cfg):
        assert check_condition(GroupInstance.from_json(d)).passed
    cfg = ExperimentConfig("conj12", (6, 2), count=50, filter="hypothesis")
    for _, _, d in generate_instances(cfg):
        assert not subset_sum_hypothesis_violations(GroupInstance.from_json(d))


def test_dedup_with_hypothesis_reorders_multisets():
    cfg = ExperimentConfig("conj12", (4, 2), "exhaustive", dedup=True, filter="hypothesis")
    descs = [d for _, _, d in generate_instances(cfg)]
    assert descs
    seen = set()
    for d in descs:
        inst = GroupInstance.from_json(d)
        assert not subset_sum_hypothesis_violations(inst)
        key = tuple(sorted(inst.elements))
        assert key not in seen
        seen.add(key)
    # every hypothesis-passing ordered tuple has its multiset represented
    from permcert.group_core import GroupSpec, enumerate_elements

    spec = GroupSpec((4, 2))
    for tup in product(list(enumerate_elements(spec)), repeat=3):
        if not subset_sum_hypothesis_violations(GroupInstance(spec, tup)):
            assert tuple(sorted(tup)) in seen


def test_config_validation():
    with pytest.raises(InputError):
        ExperimentConfig("lemma31", strategy="exhaustive")
    with pytest.raises(InputError):
        ExperimentConfig("thm13", (4, 2))
    with pytest.raises(InputError):
        ExperimentConfig("thm11")
    with pytest.raises(InputError):
        ExperimentConfig("nope", (4,))


def test_thm11_exhaustive_n4(tmp_path):
    out = tmp_path / "a.jsonl"
    summary = run_experiment(ExperimentConfig("thm11", (4,), "exhaustive", out=str(out)))
    assert summary.total == 64 == 4**3
    passing = sum(check_condition(lift_integers(4, m)).passed for m in product(range(4), repeat=3))
    assert summary.counts["certified"] == passing == 26
    assert summary.exit_code == 0
    header, records, tail = load_log(out)
    assert header["type"] == "header" and len(records) == 64 and tail["total"] == 64


def test_conj12_noncyclic_tiny(tmp_path):
    summary = run_experiment(ExperimentConfig("conj12", (2, 2), "exhaustive"))
    assert summary.total == 4
    assert summary.counts["meets_bound"] == 3
    assert summary.counts["hypothesis_violated"] == 1
    assert summary.exit_code == 0


def test_lemma31_random():
    summary = run_experiment(ExperimentConfig("lemma31", count=1000, seed=3, max_k=8))
    assert summary.counts == {"consistent": 1000}


def test_thm12_and_thm13_modes():
    s = run_experiment(ExperimentConfig("thm12", (6,), "exhaustive"))
    assert s.total == 6**5 and set(s.counts) <= {"complete", "condition_failed"}
    s = run_experiment(ExperimentConfig("thm13", (4,), "exhaustive", filter="hypothesis"))
    assert set(s.counts) == {"solved"}
    s = run_experiment(ExperimentConfig("thm13", (9,), count=200, filter="hypothesis"))
    assert s.counts == {"solved": 200}


@pytest.mark.parametrize("mode, group, extra", [
    ("thm11", (6, 2), {}),
    ("conj12", (6, 3), {"filter": "hypothesis"}),
    ("thm13", (7,), {"filter": "hypothesis"}),
    ("lemma31", None, {}),
])
def test_parallel_matches_serial(tmp_path, mode, group, extra):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    base = dict(mode=mode, group=group, count=300, seed=99, batch_size=16, **extra)
    run_experiment(ExperimentConfig(jobs=1, out=str(a), **base))
    run_experiment(ExperimentConfig(jobs=4, out=str(b), **base))
    assert body(a) == body(b)
    assert len(body(a)) == 301


def test_records_replay(tmp_path):
    out = tmp_path / "r.jsonl"
    run_experiment(ExperimentConfig("thm11", (4, 2), count=50, seed=1, out=str(out)))
    _, records, _ = load_log(out)
    assert all(replay_record(r) for r in records)


def test_report_clean(tmp_path):
    out = tmp_path / "r.jsonl"
    run_experiment(ExperimentConfig("thm11", (5,), "exhaustive", out=str(out)))
    assert "all 625 instances consistent" in emit_report(out)


def test_report_malformed(tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    with pytest.raises(MalformedLogError):
        emit_report(empty)
    junk = tmp_path / "junk.jsonl"
    junk.write_text("{not json}\n")
    with pytest.raises(MalformedLogError):
        emit_report(junk)
    noheader = tmp_path / "nh.jsonl"
    noheader.write_text('{"index":0}\n')
    with pytest.raises(MalformedLogError):
        emit_report(noheader)


def test_report_echoes_alarms(tmp_path):
    log = tmp_path / "alarm.jsonl"
    rec = {
        "index": 0,
        "seed": None,
        "mode": "conj12",
        "instance": {"group": [2, 2], "elements": [[1, 0]]},
        "verdict": "candidate_counterexample",
        "payload": {"count": 1, "bound": 2, "reverified": False},
    }
    log.write_text(json.dumps({"type": "header", "config": {}}) + "\n" + json.dumps(rec) + "\n")
    text = emit_report(log)
    assert "1 alarm record(s)" in text
    assert json.dumps(rec, separators=(",", ":")) in text
    assert "DID NOT REPRODUCE" in text and "re-verified by enumeration: False" in text


def test_evaluate_contradiction_becomes_verdict(monkeypatch):
    import permcert.explorer as ex
    from permcert.errors import TheoremContradiction

    def boom(_):
        raise TheoremContradiction("x", {"k": 1})

    monkeypatch.setattr(ex, "solve_thm11", boom)
    verdict, payload = evaluate("thm11", {"group": [2], "elements": [[1]]})
    assert verdict == "theorem_contradiction" and payload["dump"] == {"k": 1}


# ---------------------------------------------------------------------- CLI


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_cli_check(capsys):
    code, out = run_cli(capsys, "check", "--n", "4", "--m", "1,2,3")
    assert code == 0 and json.loads(out)["passed"] is True
    code, out = run_cli(capsys, "check", "--n", "4", "--m=2,2,2")
    assert code == 1 and json.loads(out)["first_violation"] == 2
    code, out = run_cli(capsys, "check", "--n", "4", "--m=-1,6,3")
    assert code == 0


def test_cli_solve(capsys):
    code, out = run_cli(capsys, "solve", "--group", "[4,2]", "--elements", "[[1,0],[1,1],[2,1]]")
    assert code == 0 and json.loads(out)["certified"] is True
    code, out = run_cli(capsys, "solve", "--group", "[4]", "--elements", "[[2],[2],[2]]")
    assert code == 1 and json.loads(out)["passed"] is False
    code, _ = run_cli(capsys, "solve", "--group", "[4]", "--elements", "[[2],[2]]")
    assert code == 2


def test_cli_coverage_and_thm13(capsys):
    code, out = run_cli(capsys, "coverage", "--n", "4", "--m", "1,2,3")
    assert code == 0 and json.loads(out)["complete"]
    code, out = run_cli(capsys, "coverage", "--n", "4", "--m", "2,2,2")
    assert code == 1 and json.loads(out)["reachable"] == [0, 2]
    code, out = run_cli(capsys, "thm13", "--n", "4", "--m", "1,2,3", "--a", "0,0,0")
    assert code == 0 and json.loads(out)["verified"]
    code, out = run_cli(capsys, "thm13", "--n", "3", "--m", "3,1", "--a", "0,0")
    assert code == 1


def test_cli_cover(capsys):
    code, out = run_cli(capsys, "cover", "--system", '[["1","2"],["2","4"],["3","4/3"]]', "--verify-lemma")
    res = json.loads(out)
    assert code == 0 and res["covers_all"] is False and res["N"] == 4
    assert res["lemma"]["verdict"] == "CONSISTENT"


def test_cli_explore_and_report(capsys, tmp_path):
    out = tmp_path / "e.jsonl"
    code, text = run_cli(
        capsys, "explore", "--mode", "thm11", "--group", "[4]", "--strategy", "exhaustive",
        "--out", str(out),
    )
    assert code == 0 and json.loads(text)["total"] == 64
    code, text = run_cli(capsys, "report", "--in", str(out))
    assert code == 0 and "all 64 instances consistent" in text
    bad = tmp_path / "bad.jsonl"
    bad.write_text("")
    code, _ = run_cli(capsys, "report", "--in", str(bad))
    assert code == 2


def test_cli_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["explore", "--mode", "bogus"])
    assert info.value.code == 2
    code, _ = run_cli(capsys, "explore", "--mode", "lemma31", "--strategy", "exhaustive")
    assert code == 2


def test_jobs_env_default(monkeypatch):
    monkeypatch.setenv("PERMCERT_JOBS", "3")
    args = cli.build_parser().parse_args(["explore", "--mode", "lemma31"])
    assert args.jobs == 3


def test_cli_determinism_jobs(capsys, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    common = ["explore", "--mode", "conj12", "--group", "[6,2]", "--count", "200", "--seed", "4",
              "--filter", "hypothesis"]
    run_cli(capsys, *common, "--jobs", "1", "--out", str(a))
    run_cli(capsys, *common, "--jobs", "8", "--out", str(b))
    assert body(a) == body(b)
