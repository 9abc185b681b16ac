import json

import pytest

from pgtower import spec as S
from pgtower.corpus import D8
from pgtower.errors import ConfigError
from pgtower.report import THEOREM_TAGS, RunConfig, VerificationReport, run

D8_JSON = S.to_json(D8)


def _config(*jobs, **extra):
    return RunConfig.from_json({"jobs": list(jobs), "seed": 3, **extra})


def _job(i, job_type, **params):
    return {"id": i, "type": job_type, "params": params}


def test_wreath_central_job():
    spec = S.to_json(S.WreathCentral(D8, 2, 1))
    report = run(_config(_job("j", "verify_construction", spec=spec)))
    (entry,) = report.entries
    assert entry.theorem == "S4.wreath-central.center" and entry.verdict == "pass"
    assert entry.evidence["center_order"] == 2


def test_empty_config():
    report = run(_config())
    assert report.entries == [] and not report.failed


def test_cap_gives_skip():
    spec = S.to_json(S.CentralPower(D8, 6))
    report = run(_config(_job("big", "verify_construction", spec=spec)))
    assert [e.verdict for e in report.entries] == ["skipped(cap)"]
    assert report.entries[0].theorem in THEOREM_TAGS and not report.failed


@pytest.mark.parametrize("obj", [
    [],
    {"jobs": [{"type": "dance"}]},
    {"jobs": [], "caps": {"order_cap": 0}},
    {"jobs": [{"type": "cohomology", "params": {"spec": {"kind": "nope"}}}]},
    {"jobs": [{"type": "tower_audit", "params": {"kind": "spiral"}}]},
])
def test_config_errors(obj):
    with pytest.raises(ConfigError):
        run(RunConfig.from_json(obj))


def test_failing_verdict_carries_witness():
    # a central power needs a cyclic centre; the violated precondition is reported as a fail
    spec = S.to_json(S.CentralPower(S.DirectProduct((S.Cyclic(2), S.Cyclic(2))), 2))
    report = run(_config(_job("bad", "verify_construction", spec=spec)))
    (entry,) = report.entries
    assert entry.verdict == "fail" and "witness" in entry.evidence
    assert report.failed


def test_every_tag_is_known_and_order_is_kept():
    jobs = [
        _job("a", "verify_group", spec=D8_JSON),
        _job("b", "verify_construction", spec=S.to_json(S.CentralPower(D8, 2))),
        _job("c", "verify_construction", spec=S.to_json(S.Wreath(D8, 2))),
        _job("d", "tower_audit", kind="wreath_central", seed=D8_JSON, p=2, stages=1),
        _job("e", "tower_audit", kind="central_power", seed=D8_JSON, p=2, stages=2),
        _job("f", "cohomology", spec=D8_JSON, p=2, max_degree=2),
        _job("g", "comparison_trace", kind="cyclic", p=2, stages=3, q=2),
        _job("h", "comparison_trace", kind="wreath_central", seed=D8_JSON, p=2, stages=1, q=1),
    ]
    report = run(_config(*jobs))
    assert all(e.theorem in THEOREM_TAGS for e in report.entries)
    assert all(e.verdict == "pass" for e in report.entries)
    ids = [e.job_id for e in report.entries]
    assert ids == sorted(ids)
    seen = {e.theorem for e in report.entries}
    assert {"S3.central-monolithic", "S4.wreath-lemma", "S4.last.d-formula", "S2.dimensions.H1",
            "S2.uct.duality", "S2.z.inflation-zero", "S3.tower-links"} <= seen


def test_round_trip_and_determinism():
    cfg = _config(_job("a", "verify_group", spec=D8_JSON), _job("f", "cohomology", spec=D8_JSON, p=2, max_degree=2))
    first = run(cfg)
    text = json.dumps(first.to_json())
    again = VerificationReport.from_json(json.loads(text))
    assert again.to_json() == first.to_json()
    assert run(cfg).dumps(drop_times=True) == first.dumps(drop_times=True)


def test_parallel_matches_serial(monkeypatch):
    jobs = [_job(str(i), "verify_group", spec=S.to_json(S.Cyclic(2 + i))) for i in range(3)]
    serial = run(_config(*jobs)).dumps(drop_times=True)
    monkeypatch.setenv("PGTOWER_WORKERS", "2")
    assert run(_config(*jobs)).dumps(drop_times=True) == serial
    monkeypatch.setenv("PGTOWER_WORKERS", "zero")
    with pytest.raises(ConfigError):
        run(_config(*jobs))
