"""Batch verification: run configs in, theorem-tagged JSON reports out."""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import spec as S
from .build import build_group
from .cohomology import DEFAULT_WORK_CAP, cohomology_dims, tower_comparison_trace
from .constructions import central_power, natural_central_quotient_iso, regular_wreath, wreath_central, \
    wreath_lemma_witnesses
from .errors import ConfigError, MalformedSpec, NotNilpotent, OrderCapExceeded, PGroupError, WorkCapExceeded
from .group import (DEFAULT_ORDER_CAP, MINIMAL_NORMAL_CAP, center, frattini_quotient_dim, minimal_normal_subgroups,
                    monolith, nilpotency_class, verify_axioms)
from .tower import KINDS, build_tower

SCHEMA_VERSION = 1

# every claim a report entry can be tagged with
THEOREM_TAGS = (
    "engine.axioms",
    "S1.monolith-cyclic-centre",
    "S3.central-monolithic",
    "S3.natural-iso",
    "S3.tower-links",
    "S4.wreath-lemma",
    "S4.wreath-central.center",
    "S4.wreath-central.monolithic-stages",
    "S4.psi-extension",
    "S4.last.d-formula",
    "S2.dimensions.H1",
    "S2.uct.duality",
    "S2.z.inflation-zero",
    "S2.limits.inflation-trace",
)
JOB_TYPES = ("verify_group", "verify_construction", "tower_audit", "cohomology", "comparison_trace")
VERDICTS = ("pass", "fail", "skipped(cap)")


@dataclass
class Entry:
    job_id: str
    job_type: str
    theorem: str
    verdict: str
    evidence: dict = field(default_factory=dict)
    wall_time: float = 0.0


@dataclass
class VerificationReport:
    entries: list = field(default_factory=list)
    seed: int = 0

    @property
    def failed(self) -> bool:
        return any(e.verdict == "fail" for e in self.entries)

    def summary(self) -> dict:
        return {v: sum(e.verdict == v for e in self.entries) for v in VERDICTS}

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "seed": self.seed, "summary": self.summary(),
                "entries": [asdict(e) for e in self.entries]}

    def dumps(self, drop_times: bool = False) -> str:
        obj = self.to_json()
        if drop_times:
            for e in obj["entries"]:
                e.pop("wall_time")
        return json.dumps(obj, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict) -> "VerificationReport":
        if obj.get("schema_version") != SCHEMA_VERSION:
            raise ConfigError(f"unsupported report schema {obj.get('schema_version')!r}")
        return cls([Entry(**e) for e in obj["entries"]], obj.get("seed", 0))


@dataclass
class RunConfig:
    jobs: list
    order_cap: int = DEFAULT_ORDER_CAP
    work_cap: int = DEFAULT_WORK_CAP
    seed: int = 0
    workers: Optional[int] = None

    @classmethod
    def from_json(cls, obj) -> "RunConfig":
        if not isinstance(obj, dict) or not isinstance(obj.get("jobs"), list):
            raise ConfigError("config must be an object with a 'jobs' list")
        caps = obj.get("caps", {})
        cfg = cls(jobs=[], order_cap=caps.get("order_cap", DEFAULT_ORDER_CAP),
                  work_cap=caps.get("work_cap", DEFAULT_WORK_CAP), seed=obj.get("seed", 0),
                  workers=obj.get("workers"))
        for cap in (cfg.order_cap, cfg.work_cap):
            if not isinstance(cap, int) or cap <= 0:
                raise ConfigError(f"caps must be positive integers, got {cap!r}")
        for i, job in enumerate(obj["jobs"]):
            if not isinstance(job, dict) or job.get("type") not in JOB_TYPES:
                raise ConfigError(f"job {i}: unknown job type {job.get('type') if isinstance(job, dict) else job!r}")
            params = job.get("params", {})
            if not isinstance(params, dict):
                raise ConfigError(f"job {i}: params must be an object")
            cfg.jobs.append({"id": str(job.get("id", f"job{i}")), "type": job["type"], "params": params})
        return cfg


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


def _spec(params, key="spec"):
    if key not in params:
        raise ConfigError(f"missing {key!r}")
    return S.from_json(params[key])


def group_summary(G, p: Optional[int] = None) -> dict:
    """order, centre order, class, d and monolithicity of a built group."""
    p = p or G.p_group_prime()
    Z = center(G)
    try:
        cls = nilpotency_class(G)
    except NotNilpotent:
        cls = None
    out = {"order": G.order, "center_order": Z.order, "class": cls,
           "d": frattini_quotient_dim(G, p) if p and G.p_group_prime() == p else None}
    try:
        out["monolithic"] = monolith(G) is not None
    except OrderCapExceeded:
        out["monolithic"] = None
    return out


def _job_verify_group(params, cfg):
    G = build_group(_spec(params), cfg.order_cap)
    out = []
    violations = verify_axioms(G, seed=cfg.seed)
    ev = {"order": G.order, "exhaustive": G.order <= 512}
    if violations:
        v = violations[0]
        ev["witness"] = {"law": v.law, "elements": list(v.witness), "count": v.count}
    out.append(("engine.axioms", _verdict(not violations), ev))
    if G.p_group_prime() is None:
        return out
    if G.order > MINIMAL_NORMAL_CAP:
        return out + [("S1.monolith-cyclic-centre", "skipped(cap)", {"order": G.order})]
    Z = center(G)
    minimal = minimal_normal_subgroups(G)
    agree = (len(minimal) == 1) == Z.is_cyclic
    ev = {"order": G.order, "center_order": Z.order, "center_cyclic": Z.is_cyclic,
          "minimal_normal_orders": [N.order for N in minimal]}
    if not agree:
        ev["witness"] = {"minimal_normal": [N.members.tolist() for N in minimal], "center": Z.members.tolist()}
    out.append(("S1.monolith-cyclic-centre", _verdict(agree), ev))
    return out


def _job_verify_construction(params, cfg):
    sp = _spec(params)
    base = build_group(sp.base, cfg.order_cap)
    if isinstance(sp, S.CentralPower):
        K = central_power(base, sp.copies, cfg.order_cap)
        Z = center(K.group)
        expected = base.order**sp.copies // K.q ** (sp.copies - 1)
        ev = {"order": K.group.order, "expected_order": expected, "center_order": Z.order, "q": K.q}
        ok = K.group.order == expected and Z == K.L and K.L.is_cyclic
        if K.group.order <= MINIMAL_NORMAL_CAP:
            mono = monolith(K.group)
            ev["monolithic"] = mono is not None
            ok = ok and mono is not None
        if not ok:
            ev["witness"] = {"center_minus_L": np.setdiff1d(Z.members, K.L.members).tolist(),
                             "L_minus_center": np.setdiff1d(K.L.members, Z.members).tolist()}
        iso = natural_central_quotient_iso(K)
        return [("S3.central-monolithic", _verdict(ok), ev),
                ("S3.natural-iso", "pass", {"quotient_order": iso.domain.order, "target_order": iso.codomain.order})]
    if isinstance(sp, S.Wreath):
        W = regular_wreath(base, sp.cyclic_order, cfg.order_cap)
        witnesses, failures = wreath_lemma_witnesses(W)
        ev = {"order": W.group.order, "base_order": W.base_order, "checked": len(witnesses) + len(failures),
              "with_witness": len(witnesses)}
        if failures:
            ev["witness"] = {"w_without_b": failures[:20]}
        return [("S4.wreath-lemma", _verdict(not failures), ev)]
    if isinstance(sp, S.WreathCentral):
        J = wreath_central(base, sp.p, sp.n, cfg.order_cap)
        Z = center(J.group)
        qE = center(base).order
        ok = Z == J.L and Z.order == qE
        ev = {"order": J.group.order, "center_order": Z.order, "base_center_order": qE}
        if J.group.order <= MINIMAL_NORMAL_CAP:
            ev["monolithic"] = monolith(J.group) is not None
            ok = ok and ev["monolithic"]
        else:
            ev["monolithic"] = Z.is_cyclic
        if not ok:
            ev["witness"] = {"center": Z.members.tolist()[:50], "L": J.L.members.tolist()}
        return [("S4.wreath-central.center", _verdict(ok), ev)]
    raise ConfigError("verify_construction needs a central_power, wreath or wreath_central spec")


def _tower_args(params, cfg):
    kind = params.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"unknown tower kind {kind!r}")
    seed = params.get("seed")
    if kind != "cyclic" and seed is None:
        raise ConfigError("tower config needs a 'seed' spec")
    return dict(seed=S.from_json(seed) if seed is not None else None, kind=kind, p=int(params.get("p", 2)),
                N=int(params.get("stages", 1)), order_cap=int(params.get("order_cap", cfg.order_cap)))


def tower_audit_json(tower) -> dict:
    return {"schema_version": SCHEMA_VERSION, "kind": tower.kind, "p": tower.p,
            "truncated_at": tower.truncated_at,
            "stages": [_jsonable({"n": a.n, "order": a.order, "center_order": a.center_order, "d": a.d,
                                  "monolithic": a.monolithic, "link_surjective": a.link_surjective,
                                  "iso_to_wreath": a.iso_to_wreath}) for a in tower.audits]}


def _job_tower_audit(params, cfg):
    args = _tower_args(params, cfg)
    tower = build_tower(sample_seed=cfg.seed, **args)
    audit = tower_audit_json(tower)
    linked = [a for a in tower.audits if a.link_surjective is not None]
    if not linked:
        return [("S4.last.d-formula" if tower.kind == "wreath_central" else "S3.tower-links", "skipped(cap)", audit)]
    bad_links = [a.n for a in linked if not (a.link_surjective and a.link_homomorphism)]
    out = []
    links_ev = dict(audit, witness={"bad_links": bad_links}) if bad_links else audit
    if tower.kind == "wreath_central":
        dE = frattini_quotient_dim(tower.E, tower.p)
        bad_d = [a.n for a in tower.audits if a.n >= 1 and a.d != dE + 1]
        out.append(("S4.last.d-formula", _verdict(not bad_d),
                    dict(audit, d_E=dE, **({"witness": {"stages": bad_d}} if bad_d else {}))))
        out.append(("S4.psi-extension", _verdict(not bad_links), links_ev))
        checked = [a for a in tower.audits if a.monolithic is not None]
        bad_m = [a.n for a in checked if not a.monolithic or not a.iso_to_wreath]
        if checked:
            out.append(("S4.wreath-central.monolithic-stages", _verdict(not bad_m),
                        dict(audit, **({"witness": {"stages": bad_m}} if bad_m else {}))))
    else:
        out.append(("S3.tower-links", _verdict(not bad_links), links_ev))
    return out


def _job_cohomology(params, cfg):
    G = build_group(_spec(params), cfg.order_cap)
    p = int(params.get("p", G.p_group_prime() or 2))
    qmax = int(params.get("max_degree", 2))
    res = cohomology_dims(G, p, qmax, cfg.work_cap)
    ev = res.to_json()
    ev["frattini_d"] = res.frattini_d
    out = []
    if res.frattini_d is not None and qmax >= 1:
        ok = res.h1_matches_d
        out.append(("S2.dimensions.H1", _verdict(ok),
                    dict(ev, **({} if ok else {"witness": {"dim_H1": res.dims[1], "d": res.frattini_d}}))))
    ok = res.duality_holds
    bad = [q for q, (a, b) in enumerate(zip(res.dims, res.homology_dims)) if a != b]
    out.append(("S2.uct.duality", _verdict(ok), dict(ev, **({} if ok else {"witness": {"degrees": bad}}))))
    return out


def _job_comparison_trace(params, cfg):
    args = _tower_args(params, cfg)
    q = int(params.get("q", 1))
    tower = build_tower(sample_seed=cfg.seed, audit=False, **args)
    trace = tower_comparison_trace(tower, tower.p, q, cfg.work_cap)
    ev = trace.to_json()
    failed = [c["name"] for c in trace.checks if not c["ok"]]
    if failed:
        ev["witness"] = {"failed_checks": failed}
    tag = "S2.z.inflation-zero" if (q == 2 and tower.kind == "cyclic") else "S2.limits.inflation-trace"
    if not trace.links or all(l["rank"] is None for l in trace.links):
        return [(tag, "skipped(cap)", ev)]
    return [(tag, _verdict(not failed), ev)]


# tag used when a job stops before reaching its own checks
_DEFAULT_TAG = {
    "verify_group": "engine.axioms",
    "verify_construction": "S4.wreath-central.center",
    "tower_audit": "S3.tower-links",
    "cohomology": "S2.dimensions.H1",
    "comparison_trace": "S2.limits.inflation-trace",
}

_HANDLERS = {
    "verify_group": _job_verify_group,
    "verify_construction": _job_verify_construction,
    "tower_audit": _job_tower_audit,
    "cohomology": _job_cohomology,
    "comparison_trace": _job_comparison_trace,
}


def _default_tag(job: dict) -> str:
    sp = job["params"].get("spec")
    kind = sp.get("kind") if isinstance(sp, dict) else None
    if job["type"] == "verify_construction":
        return {"central_power": "S3.central-monolithic", "wreath": "S4.wreath-lemma"}.get(kind, "S4.wreath-central.center")
    if job["type"] == "tower_audit" and job["params"].get("kind") == "wreath_central":
        return "S4.last.d-formula"
    return _DEFAULT_TAG[job["type"]]


def run_job(job: dict, cfg: RunConfig) -> list:
    start = time.perf_counter()
    try:
        results = _HANDLERS[job["type"]](job["params"], cfg)
    except (OrderCapExceeded, WorkCapExceeded) as exc:
        results = [(_default_tag(job), "skipped(cap)", {"reason": str(exc)})]
    except ConfigError:
        raise
    except PGroupError as exc:
        results = [(_default_tag(job), "fail", {"error": type(exc).__name__, "witness": {"message": str(exc)}})]
    elapsed = time.perf_counter() - start
    return [Entry(job["id"], job["type"], tag, verdict, _jsonable(ev), elapsed / len(results))
            for tag, verdict, ev in results]


def _worker_count(cfg: RunConfig) -> int:
    env = os.environ.get("PGTOWER_WORKERS")
    if env is not None:
        if not env.isdigit() or int(env) < 1:
            raise ConfigError(f"PGTOWER_WORKERS must be a positive integer, got {env!r}")
        return int(env)
    return cfg.workers or 1


def run(cfg: RunConfig) -> VerificationReport:
    # config errors surface before any work starts
    for job in cfg.jobs:
        try:
            if job["type"] in ("verify_group", "verify_construction", "cohomology"):
                _spec(job["params"])
            else:
                _tower_args(job["params"], cfg)
        except (MalformedSpec, TypeError, ValueError) as exc:
            raise ConfigError(f"job {job['id']}: {exc}") from exc
    workers = _worker_count(cfg)
    if workers > 1 and len(cfg.jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(run_job, cfg.jobs, [cfg] * len(cfg.jobs)))
    else:
        chunks = [run_job(job, cfg) for job in cfg.jobs]
    return VerificationReport([e for chunk in chunks for e in chunk], cfg.seed)
