"""Mod-p (co)homology of finite groups with trivial F_p coefficients.

Normalized bar complex: a q-cochain is a function on q-tuples of
non-identity elements. A q-tuple (g_1..g_q) has index sum((g_i - 1) m^(q-i))
with m = |G| - 1, first argument most significant.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NotSurjective, WorkCapExceeded
from .fpmatrix import Echelon, FpMatrix, dense_rref, fp_rank, row_echelon, solve_in_span
from .group import FiniteGroup, GroupHom, frattini_quotient_dim, prime_power

DEFAULT_WORK_CAP = 20_000_000
# entries of the dense echelon basis (int64), about 400 MB
DEFAULT_DENSE_CAP = 50_000_000
MAX_DEGREE = 3


def _tuples(m: int, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices((m,) * k, dtype=np.int64).reshape(k, -1).T


def _index(digits: np.ndarray, m: int) -> np.ndarray:
    idx = np.zeros(digits.shape[0], dtype=np.int64)
    for j in range(digits.shape[1]):
        idx = idx * m + digits[:, j]
    return idx


def work_estimate(G: FiniteGroup, q: int) -> int:
    """Nonzeros bound of the degree-q coboundary: (q+2) (|G|-1)^(q+1)."""
    return (q + 2) * (G.order - 1) ** (q + 1)


def check_work(G: FiniteGroup, q: int, work_cap: int = DEFAULT_WORK_CAP, dense_cap: int = DEFAULT_DENSE_CAP):
    work = work_estimate(G, q)
    if work > work_cap:
        raise WorkCapExceeded(work, work_cap)
    dense = (G.order - 1) ** (2 * q)
    if dense > dense_cap:
        raise WorkCapExceeded(dense, dense_cap)


def coboundary_matrix(G: FiniteGroup, p: int, q: int, work_cap: int = DEFAULT_WORK_CAP) -> FpMatrix:
    """d^q : C^q -> C^(q+1) as a ((|G|-1)^(q+1) x (|G|-1)^q) matrix.

    (d f)(g_1..g_{q+1}) = f(g_2..) + sum_i (-1)^i f(..g_i g_{i+1}..) + (-1)^{q+1} f(..g_q),
    terms with an identity argument dropped.
    """
    if q < 0 or q > MAX_DEGREE:
        raise ValueError(f"degree {q} outside 0..{MAX_DEGREE}")
    if work_estimate(G, q) > work_cap:
        raise WorkCapExceeded(work_estimate(G, q), work_cap)
    m = G.order - 1
    T = _tuples(m, q + 1) + 1
    N = T.shape[0]
    rows_all = np.arange(N, dtype=np.int64)
    rows, cols, vals = [rows_all], [_index(T[:, 1:] - 1, m)], [np.ones(N, dtype=np.int64)]
    for i in range(1, q + 1):
        prod = G.table[T[:, i - 1], T[:, i]].astype(np.int64)
        keep = prod != 0
        merged = np.concatenate([T[keep, : i - 1], prod[keep, None], T[keep, i + 1:]], axis=1)
        rows.append(rows_all[keep])
        cols.append(_index(merged - 1, m))
        vals.append(np.full(int(keep.sum()), (-1) ** i, dtype=np.int64))
    rows.append(rows_all)
    cols.append(_index(T[:, :q] - 1, m))
    vals.append(np.full(N, (-1) ** (q + 1), dtype=np.int64))
    return FpMatrix.from_coo(N, m**q, p, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals))


def _faces(G: FiniteGroup, chains: np.ndarray):
    """Yield (sign, face, alive) for the bar faces of each chain [g_1|..|g_q]."""
    q = chains.shape[1]
    alive = np.ones(chains.shape[0], dtype=bool)
    yield 1, chains[:, 1:], alive
    for i in range(1, q):
        prod = G.table[chains[:, i - 1], chains[:, i]].astype(np.int64)
        face = np.concatenate([chains[:, : i - 1], prod[:, None], chains[:, i + 1:]], axis=1)
        yield (-1) ** i, face, prod != 0
    yield (-1) ** q, chains[:, : q - 1], alive


def boundary_matrix(G: FiniteGroup, p: int, q: int, work_cap: int = DEFAULT_WORK_CAP) -> FpMatrix:
    """Normalized bar boundary C_q -> C_(q-1); rows are (q-1)-chains, columns q-chains."""
    if q < 1 or q > MAX_DEGREE + 1:
        raise ValueError(f"boundary degree {q} outside 1..{MAX_DEGREE + 1}")
    if work_estimate(G, q - 1) > work_cap:
        raise WorkCapExceeded(work_estimate(G, q - 1), work_cap)
    m = G.order - 1
    chains = _tuples(m, q) + 1
    col_ids = np.arange(chains.shape[0], dtype=np.int64)
    r, c, v = [], [], []
    for sign, face, alive in _faces(G, chains):
        r.append(_index(face[alive] - 1, m))
        c.append(col_ids[alive])
        v.append(np.full(int(alive.sum()), sign, dtype=np.int64))
    return FpMatrix.from_coo(m ** (q - 1), chains.shape[0], p, np.concatenate(r), np.concatenate(c), np.concatenate(v))


@dataclass
class CohomologyResult:
    group: str
    p: int
    dims: list
    homology_dims: list = field(default_factory=list)
    method: str = "normalized_bar"
    caps: dict = field(default_factory=dict)
    p_group: bool = True
    frattini_d: Optional[int] = None

    @property
    def duality_holds(self) -> bool:
        return self.dims == self.homology_dims

    @property
    def h1_matches_d(self) -> Optional[bool]:
        if self.frattini_d is None or len(self.dims) < 2:
            return None
        return self.dims[1] == self.frattini_d

    def to_json(self) -> dict:
        return {"group": self.group, "p": self.p, "dims": self.dims, "homology_dims": self.homology_dims,
                "method": self.method, "caps": self.caps}


def _is_p_group(G: FiniteGroup, p: int) -> bool:
    pk = prime_power(G.order)
    return G.order == 1 or (pk is not None and pk[0] == p)


def _caps(work_cap, dense_cap):
    return {"work_cap": work_cap, "dense_cap": dense_cap, "max_degree": MAX_DEGREE}


def cohomology_dims(G: FiniteGroup, p: int, qmax: int = 2, work_cap: int = DEFAULT_WORK_CAP,
                    dense_cap: int = DEFAULT_DENSE_CAP, homology: bool = True) -> CohomologyResult:
    """dim H^q = nullity(d^q) - rank(d^(q-1)) for q = 0..qmax, and H_q from the chain side."""
    if qmax > MAX_DEGREE:
        raise ValueError(f"qmax {qmax} > {MAX_DEGREE}")
    check_work(G, qmax, work_cap, dense_cap)
    m = G.order - 1
    ranks = [fp_rank(coboundary_matrix(G, p, q, work_cap)) for q in range(qmax + 1)]
    dims = [m**q - ranks[q] - (ranks[q - 1] if q else 0) for q in range(qmax + 1)]
    res = CohomologyResult(G.label, p, dims, caps=_caps(work_cap, dense_cap), p_group=_is_p_group(G, p))
    if res.p_group:
        res.frattini_d = frattini_quotient_dim(G, p)
    if homology:
        res.homology_dims = homology_dims(G, p, qmax, work_cap, dense_cap)
    return res


def homology_dims(G: FiniteGroup, p: int, qmax: int = 2, work_cap: int = DEFAULT_WORK_CAP,
                  dense_cap: int = DEFAULT_DENSE_CAP) -> list:
    """dim H_q = dim C_q - rank(boundary_q) - rank(boundary_(q+1)), boundary_0 = 0."""
    check_work(G, qmax, work_cap, dense_cap)
    m = G.order - 1
    ranks = {0: 0}
    for q in range(1, qmax + 2):
        ranks[q] = fp_rank(boundary_matrix(G, p, q, work_cap))
    return [m**q - ranks[q] - ranks[q + 1] for q in range(qmax + 1)]


# --------------------------------------------------------------- inflation


@dataclass(frozen=True, eq=False)
class CohomologyBasis:
    """Cocycle representatives of a basis of H^q, plus what is needed to take coordinates."""

    group: FiniteGroup
    p: int
    q: int
    cocycles: np.ndarray
    residues: np.ndarray
    coboundaries: Echelon

    @property
    def dim(self) -> int:
        return int(self.cocycles.shape[0])

    def coordinates(self, cocycles: np.ndarray) -> np.ndarray:
        """Coordinates (one row per input) of cocycle classes in this basis."""
        res = self.coboundaries.reduce(cocycles)
        coords = solve_in_span(self.residues, res, self.p)
        if coords is None:
            raise ValueError("input is not a cocycle")
        return coords


def cohomology_basis(G: FiniteGroup, p: int, q: int, work_cap: int = DEFAULT_WORK_CAP,
                     dense_cap: int = DEFAULT_DENSE_CAP) -> CohomologyBasis:
    """Kernel vectors of d^q (by free column) kept when independent modulo coboundaries."""
    check_work(G, q, work_cap, dense_cap)
    m = G.order - 1
    Z = row_echelon(coboundary_matrix(G, p, q, work_cap)).kernel_basis()
    B = Echelon(m**q, p)
    if q > 0:
        B.add_matrix(coboundary_matrix(G, p, q - 1, work_cap).T)
    residues = B.reduce(Z) if Z.size else np.zeros((0, m**q), dtype=np.int64)
    R = Echelon(m**q, p)
    keep = []
    for i in range(Z.shape[0]):
        if R.add_rows(residues[i]):
            keep.append(i)
            if R.rank == Z.shape[0] - B.rank:
                break
    return CohomologyBasis(G, p, q, Z[keep], residues[keep], B)


def pull_back(proj: GroupHom, cochains: np.ndarray, q: int) -> np.ndarray:
    """Precompose q-cochains on the codomain with ``proj`` in every argument."""
    G, Q = proj.domain, proj.codomain
    m, mq = G.order - 1, Q.order - 1
    cochains = np.atleast_2d(cochains)
    T = proj.images[_tuples(m, q) + 1]
    alive = (T != 0).all(axis=1)
    out = np.zeros((cochains.shape[0], T.shape[0]), dtype=np.int64)
    out[:, alive] = cochains[:, _index(T[alive] - 1, mq)]
    return out


@dataclass
class InflationData:
    source: str
    target: str
    q: int
    p: int
    matrix: np.ndarray
    rank: int
    dim_source: int
    dim_target: int

    @property
    def zero_map(self) -> bool:
        return self.rank == 0

    @property
    def injective(self) -> bool:
        return self.rank == self.dim_source

    def to_json(self) -> dict:
        return {"from": self.source, "to": self.target, "q": self.q, "rank": self.rank,
                "zero_map": self.zero_map, "injective": self.injective}


def inflation_on_cohomology(proj: GroupHom, p: int, q: int, work_cap: int = DEFAULT_WORK_CAP,
                            dense_cap: int = DEFAULT_DENSE_CAP, bases: Optional[tuple] = None) -> InflationData:
    """inf: H^q(Q) -> H^q(G) for a surjection G -> Q; ``matrix`` has one column per basis class of H^q(Q)."""
    if not proj.is_surjective:
        raise NotSurjective(f"{proj.domain.label} -> {proj.codomain.label} is not onto")
    if bases is None:
        bq = cohomology_basis(proj.codomain, p, q, work_cap, dense_cap)
        bg = cohomology_basis(proj.domain, p, q, work_cap, dense_cap)
    else:
        bq, bg = bases
    if bq.dim:
        coords = bg.coordinates(pull_back(proj, bq.cocycles, q))
        matrix = coords.T % p
        rank = len(dense_rref(matrix, p)[1]) if bg.dim else 0
    else:
        matrix = np.zeros((bg.dim, 0), dtype=np.int64)
        rank = 0
    return InflationData(proj.codomain.label, proj.domain.label, q, p, matrix, rank, bq.dim, bg.dim)


# ------------------------------------------------------------------- trace


@dataclass
class TraceReport:
    q: int
    p: int
    stages: list = field(default_factory=list)
    links: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def to_json(self) -> dict:
        return {"q": self.q, "p": self.p, "stages": self.stages, "links": self.links, "checks": self.checks}


def tower_comparison_trace(tower, p: int, q: int, work_cap: int = DEFAULT_WORK_CAP,
                           dense_cap: int = DEFAULT_DENSE_CAP) -> TraceReport:
    """dim H^q per stage and inflation rank along every link (partial when a stage is over the caps)."""
    if q > 2:
        raise ValueError("trace is defined for q <= 2")
    report = TraceReport(q, p)
    bases = []
    for n, stage in zip(tower.levels, tower.stages):
        try:
            b = cohomology_basis(stage, p, q, work_cap, dense_cap)
        except WorkCapExceeded as exc:
            b = None
            report.stages.append({"n": n, "order": stage.order, "dim": None, "skipped": str(exc)})
        else:
            report.stages.append({"n": n, "order": stage.order, "dim": b.dim})
        bases.append(b)
    for i, link in enumerate(tower.links):
        lo, hi = tower.levels[i], tower.levels[i + 1]
        if bases[i] is None or bases[i + 1] is None:
            report.links.append({"from_n": lo, "to_n": hi, "rank": None, "skipped": "cap"})
            continue
        inf = inflation_on_cohomology(link, p, q, bases=(bases[i], bases[i + 1]))
        report.links.append({"from_n": lo, "to_n": hi, "rank": inf.rank, "zero_map": inf.zero_map,
                             "injective": inf.injective})
    if q == 1:
        for link in report.links:
            if link["rank"] is not None:
                report.checks.append({"name": f"H1 inflation injective {link['from_n']}->{link['to_n']}",
                                      "ok": bool(link["injective"])})
        if tower.kind == "wreath_central" and tower.E is not None:
            target = frattini_quotient_dim(tower.E, p) + 1
            for s in report.stages:
                if s["n"] >= 1 and s["dim"] is not None:
                    report.checks.append({"name": f"dim H1 stage {s['n']} = d(E)+1 = {target}",
                                          "ok": s["dim"] == target})
            for link in report.links:
                if link["from_n"] >= 1 and link["rank"] is not None:
                    report.checks.append({"name": f"inflation rank {link['from_n']}->{link['to_n']} = {target}",
                                          "ok": link["rank"] == target})
    if q == 2 and tower.kind == "cyclic":
        for link in report.links:
            if link["rank"] is not None:
                report.checks.append({"name": f"H2 inflation zero {link['from_n']}->{link['to_n']}",
                                      "ok": bool(link["zero_map"])})
    return report
