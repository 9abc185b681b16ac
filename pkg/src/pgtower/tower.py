"""Connecting maps between stages and finite towers of central quotients.

Stages are built directly in their small form: (E/Z(E))^n for the central
power tower and (E/Z(E)) wr C_{p^n} for the wreath-central tower. Links are
evaluated on representatives in E, so the class-2 hypothesis actually matters.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import spec as S
from .build import build_group
from .constructions import (WreathGroup, _radix_decode, _radix_encode, central_power, natural_central_quotient_iso,
                            regular_wreath, tuple_product, wreath_central)
from .errors import ClassTooHigh, EquivarianceFailure, MalformedSpec, OrderCapExceeded
from .group import (DEFAULT_ORDER_CAP, MINIMAL_NORMAL_CAP, FiniteGroup, GroupHom, _frozen, center, cyclic_group,
                    direct_product_group, frattini_quotient_dim, monolith, nilpotency_class, quotient_by)

log = logging.getLogger(__name__)

KINDS = ("wreath_central", "central_power", "cyclic")
SAMPLED_PAIRS = 100_000
EXHAUSTIVE_LINK_LIMIT = 1024


@dataclass(frozen=True, eq=False)
class TupleMap:
    """A map E^n_in -> E^n_out evaluated on raw tuples of E-codes."""

    E: FiniteGroup
    rule: str
    n_in: int
    n_out: int
    p: Optional[int] = None
    level: Optional[int] = None

    def __call__(self, tuples) -> np.ndarray:
        x = np.asarray(tuples, dtype=np.int64)
        if self.rule == "drop_last":
            return x[..., :-1].copy()
        m = self.n_out
        out = x[..., :m].copy()
        for r in range(m, self.n_in):
            out[..., r % m] = self.E.table[out[..., r % m], x[..., r]]
        return out

    def multiplicativity_witness(self, samples: Optional[int] = None, seed: int = 0):
        """(x, y) with phi(xy) != phi(x)phi(y); exhaustive when samples is None."""
        E = self.E
        if samples is None:
            codes = np.arange(E.order**self.n_in)
            x = _radix_decode(codes, E.order, self.n_in)
            for i in range(codes.size):
                xy = tuple_product(E, x[i][None, :], x)
                bad = np.flatnonzero((self(xy) != tuple_product(E, self(x[i][None, :]), self(x))).any(axis=-1))
                if bad.size:
                    return x[i].tolist(), x[bad[0]].tolist()
            return None
        rng = np.random.default_rng(seed)
        x = rng.integers(0, E.order, (samples, self.n_in))
        y = rng.integers(0, E.order, (samples, self.n_in))
        bad = np.flatnonzero((self(tuple_product(E, x, y)) != tuple_product(E, self(x), self(y))).any(axis=-1))
        return (x[bad[0]].tolist(), y[bad[0]].tolist()) if bad.size else None

    def congruence_witness(self, samples: int = 1000, seed: int = 0):
        """x, z with z central but phi(x)^-1 phi(xz) not central, or None."""
        E = self.E
        Z = center(E)
        rng = np.random.default_rng(seed)
        x = rng.integers(0, E.order, (samples, self.n_in))
        z = Z.members[rng.integers(0, Z.order, (samples, self.n_in))]
        diff = tuple_product(E, E.inv[self(x)], self(tuple_product(E, x, z)))
        bad = np.flatnonzero(~Z.mask[diff].all(axis=-1))
        return (x[bad[0]].tolist(), z[bad[0]].tolist()) if bad.size else None


def phi_drop_last(E: FiniteGroup, n: int) -> TupleMap:
    if n < 2:
        raise MalformedSpec("drop-last needs n >= 2")
    return TupleMap(E, "drop_last", n, n - 1, level=n)


def phi_residue_product(E: FiniteGroup, p: int, n: int) -> TupleMap:
    """i-th output is the product, in increasing index order, of x^(r) over r = i mod p^(n-1)."""
    if n < 1:
        raise MalformedSpec("residue product needs n >= 1")
    return TupleMap(E, "residue_product", p**n, p ** (n - 1), p=p, level=n)


@dataclass(frozen=True, eq=False)
class CentralQuotient:
    """E/Z(E) together with its representatives in E."""

    E: FiniteGroup
    group: FiniteGroup
    proj: GroupHom

    @property
    def reps(self) -> np.ndarray:
        return self.group.representatives


def central_quotient(E: FiniteGroup) -> CentralQuotient:
    Q, proj = quotient_by(E, center(E), f"{E.label}/Z")
    return CentralQuotient(E, Q, proj)


def _power(EZ: FiniteGroup, n: int, order_cap: int) -> FiniteGroup:
    order = EZ.order**n
    if order > order_cap:
        raise OrderCapExceeded(order, order_cap)
    return direct_product_group([EZ] * n, f"({EZ.label})^{n}")


def _psi_images(phi: TupleMap, cq: CentralQuotient, codes: np.ndarray) -> np.ndarray:
    lifted = cq.reps[_radix_decode(codes, cq.group.order, phi.n_in)]
    return _radix_encode(cq.proj.images[phi(lifted)], cq.group.order)


def _check_hom(hom: GroupHom, seed: int = 0):
    n = hom.domain.order
    return hom.multiplicativity_witness(samples=None if n <= EXHAUSTIVE_LINK_LIMIT else SAMPLED_PAIRS, seed=seed,
                                        exhaustive_limit=EXHAUSTIVE_LINK_LIMIT)


def induced_psi(phi: TupleMap, E: FiniteGroup, order_cap: int = DEFAULT_ORDER_CAP, cq: Optional[CentralQuotient] = None,
                seed: int = 0) -> GroupHom:
    """psi on (E/Z)^n_in -> (E/Z)^n_out, computed on representatives and verified."""
    cq = cq or central_quotient(E)
    if phi.rule == "residue_product":
        cls = nilpotency_class(E)
        if cls > 2:
            raise ClassTooHigh(f"{E.label} has class {cls} > 2", witness=_class_counterexample(phi, cq, seed))
    dom = _power(cq.group, phi.n_in, order_cap)
    cod = _power(cq.group, phi.n_out, order_cap)
    hom = GroupHom(dom, cod, _frozen(_psi_images(phi, cq, np.arange(dom.order))), f"psi_{phi.level}")
    bad = _check_hom(hom, seed)
    if bad is not None or hom.images[0] != 0:
        raise AssertionError(f"induced psi is not multiplicative at {bad}")
    if not hom.is_surjective:
        raise AssertionError("induced psi is not surjective")
    return hom


def _class_counterexample(phi: TupleMap, cq: CentralQuotient, seed: int, samples: int = 2000):
    """Stage elements a, b with psi(ab) != psi(a)psi(b) when psi is taken on representatives."""
    EZ = cq.group
    rng = np.random.default_rng(seed)
    a = rng.integers(0, EZ.order, (samples, phi.n_in))
    b = rng.integers(0, EZ.order, (samples, phi.n_in))
    ab = EZ.table[a, b].astype(np.int64)
    w = EZ.order
    f = lambda t: cq.proj.images[phi(cq.reps[t])]
    bad = np.flatnonzero((f(ab) != EZ.table[f(a), f(b)]).any(axis=-1))
    if not bad.size:
        return None
    i = bad[0]
    return {"a": _radix_encode(a[i], w).item(), "b": _radix_encode(b[i], w).item()}


def wreath_stage(cq: CentralQuotient, p: int, n: int, order_cap: int = DEFAULT_ORDER_CAP) -> WreathGroup:
    return regular_wreath(cq.group, p**n, order_cap)


def extend_psi_to_J(psi: GroupHom, p: int, n: int, upper: Optional[WreathGroup] = None,
                    lower: Optional[WreathGroup] = None, seed: int = 0) -> GroupHom:
    """Psi_n on (E/Z) wr C_{p^n} -> (E/Z) wr C_{p^(n-1)}: psi on the base, alpha_n -> alpha_(n-1)."""
    if upper is None or lower is None:
        EZ = _first_factor(psi.domain, p**n)
        upper = upper or regular_wreath(EZ, p**n, 1 << 30)
        lower = lower or regular_wreath(EZ, p ** (n - 1), 1 << 30)
    base = np.arange(upper.base_order)
    lhs = psi.images[upper.sigma(base)]
    rhs = lower.sigma(psi.images[base])
    bad = np.flatnonzero(lhs != rhs)
    if bad.size:
        b = int(base[bad[0]])
        raise EquivarianceFailure(f"psi(sigma(b)) != sigma(psi(b)) at b={b}", witness=b)
    codes = np.arange(upper.group.order)
    b, s = codes % upper.base_order, codes // upper.base_order
    images = psi.images[b] + lower.base_order * (s % lower.c)
    hom = GroupHom(upper.group, lower.group, _frozen(images.astype(np.int64)), f"Psi_{n}")
    bad = _check_hom(hom, seed)
    if bad is not None:
        raise AssertionError(f"Psi_{n} is not multiplicative at {bad}")
    return hom


def _first_factor(power: FiniteGroup, copies: int) -> FiniteGroup:
    """Recover F from F^copies: codes below |F| are the first coordinate."""
    m = round(power.order ** (1 / copies))
    table = power.table[:m, :m]
    return FiniteGroup(table, power.inv[:m], tuple(g for g in power.generators if g < m) or (0,), power.label.split(")^")[0].lstrip("("))


# ------------------------------------------------------------------ towers


@dataclass
class StageAudit:
    n: int
    order: int
    center_order: int
    d: int
    monolithic: Optional[bool] = None
    unquotiented_order: Optional[int] = None
    unquotiented_center_order: Optional[int] = None
    link_surjective: Optional[bool] = None
    link_homomorphism: Optional[bool] = None
    iso_to_wreath: Optional[bool] = None

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


@dataclass(eq=False)
class Tower:
    kind: str
    p: int
    seed: object
    E: Optional[FiniteGroup]
    levels: list = field(default_factory=list)
    stages: list = field(default_factory=list)
    wreaths: list = field(default_factory=list)
    links: list = field(default_factory=list)
    audits: list = field(default_factory=list)
    truncated_at: Optional[int] = None

    @property
    def depth(self) -> int:
        return len(self.stages)

    def alpha(self, i: int) -> int:
        """Code of the shift generator at stage index i (wreath-central towers)."""
        return self.wreaths[i].alpha


def _stage_order(kind: str, E_bar: int, p: int, n: int) -> int:
    if kind == "wreath_central":
        return E_bar ** (p**n) * p**n
    if kind == "central_power":
        return E_bar**n
    return p**n


def build_tower(seed, kind: str, p: int, N: int, order_cap: int = DEFAULT_ORDER_CAP, audit: bool = True,
                sample_seed: int = 0, minimal_normal_cap: int = MINIMAL_NORMAL_CAP) -> Tower:
    """Assemble stages and links; stops early (partial tower) at the first stage above ``order_cap``.

    Levels are 0..N for wreath-central towers and 1..max(N, 1) for the other kinds.
    """
    if kind not in KINDS:
        raise MalformedSpec(f"unknown tower kind {kind!r}")
    if N < 0:
        raise MalformedSpec("tower depth must be >= 0")
    if isinstance(seed, dict):
        seed = S.from_json(seed)
    E = build_group(seed, order_cap) if kind != "cyclic" else None
    cq = central_quotient(E) if E is not None else None
    levels = range(0, N + 1) if kind == "wreath_central" else range(1, max(N, 1) + 1)
    tower = Tower(kind, p, seed, E)

    for n in levels:
        order = _stage_order(kind, cq.group.order if cq else 0, p, n)
        if order > order_cap:
            tower.truncated_at = n
            log.info("tower stops before level %d: stage order %d > cap %d", n, order, order_cap)
            break
        if kind == "wreath_central":
            W = wreath_stage(cq, p, n, order_cap)
            stage = W.group
            tower.wreaths.append(W)
        elif kind == "central_power":
            stage = _power(cq.group, n, order_cap)
        else:
            stage = cyclic_group(p**n)
        link = None
        if tower.stages:
            link = _make_link(tower, cq, n, stage, order_cap, sample_seed)
            tower.links.append(link)
        tower.levels.append(n)
        tower.stages.append(stage)
        if audit:
            tower.audits.append(_audit(tower, cq, n, stage, link, order_cap, minimal_normal_cap))
    return tower


def _make_link(tower: Tower, cq, n: int, stage: FiniteGroup, order_cap: int, seed: int) -> GroupHom:
    prev = tower.stages[-1]
    if tower.kind == "cyclic":
        m = prev.order
        hom = GroupHom(stage, prev, _frozen(np.arange(stage.order) % m), f"red_{n}")
        return hom
    if tower.kind == "central_power":
        return induced_psi(phi_drop_last(tower.E, n), tower.E, order_cap, cq, seed)
    psi = induced_psi(phi_residue_product(tower.E, tower.p, n), tower.E, order_cap, cq, seed)
    return extend_psi_to_J(psi, tower.p, n, tower.wreaths[-1], tower.wreaths[-2], seed)


def _audit(tower: Tower, cq, n, stage, link, order_cap, mn_cap) -> StageAudit:
    p = tower.p
    a = StageAudit(n=n, order=stage.order, center_order=center(stage).order, d=frattini_quotient_dim(stage, p))
    if link is not None:
        a.link_surjective = bool(link.is_surjective)
        a.link_homomorphism = _check_hom(link) is None
    if tower.kind == "cyclic":
        return a
    E = tower.E
    try:
        if tower.kind == "wreath_central":
            J = wreath_central(E, p, n, order_cap)
            big, L = J.group, J.L
            a.iso_to_wreath = _wreath_iso_ok(J, tower.wreaths[-1], cq)
        else:
            K = central_power(E, n, order_cap)
            big, L = K.group, K.L
            a.iso_to_wreath = natural_central_quotient_iso(K).codomain.order == stage.order
    except OrderCapExceeded:
        return a
    a.unquotiented_order = big.order
    Zb = center(big)
    a.unquotiented_center_order = Zb.order
    if big.order <= mn_cap:
        a.monolithic = monolith(big, cap=mn_cap) is not None and Zb == L
    return a


def _wreath_iso_ok(J, W: WreathGroup, cq: CentralQuotient) -> bool:
    """J_n/L_n -> (E/Z) wr C_{p^n}, (k, s) -> (k mod Z(E) coordinatewise, s), is an isomorphism."""
    Q, _ = quotient_by(J.group, J.L)
    k, s = J.decode(Q.representatives)
    tuples = cq.proj.images[J.K.decode(k)]
    images = W.encode(tuples, s)
    hom = GroupHom(Q, W.group, _frozen(images.astype(np.int64)), "JL-iso")
    return bool(np.unique(images).size == Q.order == W.group.order and _check_hom(hom) is None)


def thread_element(tower: Tower, top: int) -> list[int]:
    """(x_N, Psi_N(x_N), ..., x_first): a compatible thread through the stages, top first."""
    thread = [int(top)]
    for link in reversed(tower.links):
        thread.append(int(link.images[thread[-1]]))
    return thread
