"""Finite groups as Cayley tables, plus the structural queries used everywhere.

Elements are dense integer codes ``0 .. order-1`` with 0 the identity. All
queries are vectorised over the table with numpy; nothing here mutates a
group after construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import NotAPGroup, NotNilpotent, NotNormal, OrderCapExceeded

DEFAULT_ORDER_CAP = 4096
MINIMAL_NORMAL_CAP = 2048
EXHAUSTIVE_AXIOM_LIMIT = 512
AXIOM_SAMPLES = 100_000

# elements per vectorised chunk; keeps peak memory near 100 MB at order 8192
_CHUNK = 1 << 21


def table_dtype(order: int):
    return np.uint16 if order <= np.iinfo(np.uint16).max else np.int32


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def prime_power(n: int) -> Optional[tuple[int, int]]:
    """Return (p, k) with n == p**k, k >= 1, or None."""
    if n < 2:
        return None
    p = next(d for d in range(2, n + 1) if n % d == 0)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return (p, k) if n == 1 else None


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    table: np.ndarray
    inv: np.ndarray
    generators: tuple
    label: str = ""
    provenance: object = None

    @property
    def order(self) -> int:
        return int(self.table.shape[0])

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inverse(self, a: int) -> int:
        return int(self.inv[a])

    def commutator(self, a: int, b: int) -> int:
        """[a, b] = a^-1 b^-1 a b."""
        t = self.table
        return int(t[t[self.inv[a], self.inv[b]], t[a, b]])

    def word(self, letters: Iterable[int]) -> int:
        """Evaluate a word of signed 1-based generator indices."""
        g = 0
        for k in letters:
            x = self.generators[abs(k) - 1]
            g = self.mul(g, x if k > 0 else self.inverse(x))
        return g

    def power_map(self, k: int) -> np.ndarray:
        """Array whose entry g is g**k, for k >= 0."""
        result = np.zeros(self.order, dtype=np.int64)
        base = np.arange(self.order)
        while k:
            if k & 1:
                result = self.table[result, base].astype(np.int64)
            base = self.table[base, base].astype(np.int64)
            k >>= 1
        return result

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        everything = np.arange(n)
        orders = np.zeros(n, dtype=np.int64)
        orders[0] = 1
        cur = everything.copy()
        k = 1
        while (orders == 0).any():
            cur = self.table[cur, everything].astype(np.int64)
            k += 1
            hit = (cur == 0) & (orders == 0)
            orders[hit] = k
        return _frozen(orders)

    @cached_property
    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    def p_group_prime(self) -> Optional[int]:
        pk = prime_power(self.order)
        return pk[0] if pk else None

    def __repr__(self):
        return f"FiniteGroup({self.label or '?'}, order={self.order})"


def group_from_rule(order: int, rule: Callable, generators: Sequence[int], label="", provenance=None,
                    inverse: Optional[Callable] = None) -> FiniteGroup:
    """Materialise the Cayley table of ``rule(I, J)`` (vectorised over index arrays)."""
    table = np.empty((order, order), dtype=table_dtype(order))
    rows = max(1, _CHUNK // order)
    right = np.arange(order, dtype=np.int64)
    for start in range(0, order, rows):
        left = np.arange(start, min(order, start + rows), dtype=np.int64)
        I = np.repeat(left, order)
        J = np.tile(right, len(left))
        table[start:start + len(left)] = rule(I, J).reshape(len(left), order)
    if inverse is not None:
        inv = np.asarray(inverse(np.arange(order, dtype=np.int64)), dtype=np.int64)
    else:
        inv = _inverse_from_table(table)
    gens = tuple(int(g) for g in generators if g != 0) or (0,)
    return FiniteGroup(_frozen(table), _frozen(inv), gens, label, provenance)


def _inverse_from_table(table: np.ndarray) -> np.ndarray:
    n = table.shape[0]
    rows, cols = np.nonzero(table == 0)
    inv = np.zeros(n, dtype=np.int64)
    inv[rows] = cols
    return inv


def group_from_table(table, generators=None, label="", provenance=None) -> FiniteGroup:
    """Wrap an explicit Cayley table (no axiom checking; see ``verify_axioms``)."""
    table = np.array(table)
    n = table.shape[0]
    table = table.astype(table_dtype(n))
    gens = tuple(generators) if generators is not None else tuple(range(1, n)) or (0,)
    return FiniteGroup(_frozen(table), _frozen(_inverse_from_table(table)), gens, label, provenance)


def cyclic_group(m: int, label=None, provenance=None) -> FiniteGroup:
    return group_from_rule(m, lambda I, J: (I + J) % m, [1 % m], label or f"C{m}", provenance,
                           inverse=lambda g: (-g) % m)


def direct_product_group(parts: Sequence[FiniteGroup], label="", provenance=None) -> FiniteGroup:
    """Mixed-radix product: code = sum(c_k * stride_k), first factor fastest."""
    sizes = [G.order for G in parts]
    strides = np.cumprod([1] + sizes[:-1]).astype(np.int64)
    order = int(np.prod(sizes, dtype=np.int64))

    def rule(I, J):
        out = np.zeros_like(I)
        for G, n, s in zip(parts, sizes, strides):
            out += G.table[(I // s) % n, (J // s) % n].astype(np.int64) * s
        return out

    def inverse(I):
        out = np.zeros_like(I)
        for G, n, s in zip(parts, sizes, strides):
            out += G.inv[(I // s) % n].astype(np.int64) * s
        return out

    gens = [int(g) * int(s) for G, s in zip(parts, strides) for g in G.generators]
    return group_from_rule(order, rule, gens, label, provenance, inverse)


def cyclic_extension(N: FiniteGroup, action: np.ndarray, c: int, label="", provenance=None) -> FiniteGroup:
    """Semidirect product N x| C_c.

    ``action`` is a permutation of N's codes, an automorphism tau with
    tau**c = 1. The pair (n, s) has code n + |N| s and stands for n alpha^s,
    where alpha n alpha^-1 = tau(n).
    """
    m = N.order
    action = np.asarray(action, dtype=np.int64)
    powers = np.empty((c, m), dtype=np.int64)
    powers[0] = np.arange(m)
    for s in range(1, c):
        powers[s] = action[powers[s - 1]]
    if c > 0 and not np.array_equal(action[powers[c - 1]], np.arange(m)):
        raise ValueError("action does not have order dividing c")

    def rule(I, J):
        n1, s1 = I % m, I // m
        n2, s2 = J % m, J // m
        return N.table[n1, powers[s1, n2]].astype(np.int64) + m * ((s1 + s2) % c)

    def inverse(I):
        n, s = I % m, I // m
        s_inv = (-s) % c
        # (n a^s)^-1 = a^-s n^-1 = tau^-s(n^-1) a^-s
        return powers[s_inv, N.inv[n]] + m * s_inv

    gens = list(N.generators) + ([m] if c > 1 else [])
    return group_from_rule(m * c, rule, gens, label, provenance, inverse)


# ---------------------------------------------------------------- subgroups


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: FiniteGroup
    members: np.ndarray

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[self.members] = True
        return _frozen(m)

    @property
    def order(self) -> int:
        return int(self.members.size)

    def __contains__(self, g) -> bool:
        return bool(self.mask[g])

    def __eq__(self, other):
        return (isinstance(other, Subgroup) and other.parent is self.parent
                and np.array_equal(self.members, other.members))

    def __hash__(self):
        return hash(self.members.tobytes())

    def __le__(self, other: "Subgroup") -> bool:
        return bool(other.mask[self.members].all())

    @cached_property
    def is_normal(self) -> bool:
        G = self.parent
        everything = np.arange(G.order)
        rows = max(1, _CHUNK // max(1, self.order))
        for start in range(0, G.order, rows):
            h = everything[start:start + rows]
            conj = G.table[G.table[h][:, self.members], G.inv[h][:, None]]
            if not self.mask[conj].all():
                return False
        return True

    @cached_property
    def is_cyclic(self) -> bool:
        return bool((self.parent.element_orders[self.members] == self.order).any())

    def __repr__(self):
        return f"Subgroup(order={self.order} in {self.parent!r})"


def subgroup_from_mask(G: FiniteGroup, mask: np.ndarray) -> Subgroup:
    return Subgroup(G, _frozen(np.flatnonzero(mask)))


def _span(G: FiniteGroup, gens) -> np.ndarray:
    """Boolean mask of <gens>: orbit of 1 under right multiplication."""
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    gens = np.asarray(gens, dtype=np.int64)
    frontier = np.zeros(1, dtype=np.int64)
    while frontier.size and gens.size:
        nxt = np.unique(G.table[frontier][:, gens])
        nxt = nxt[~mask[nxt]]
        mask[nxt] = True
        frontier = nxt.astype(np.int64)
    return mask


def _generate(G: FiniteGroup, seeds) -> tuple[np.ndarray, list]:
    seeds = np.unique(np.asarray(list(seeds) if not isinstance(seeds, np.ndarray) else seeds, dtype=np.int64))
    seeds = seeds[seeds != 0]
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    gens: list = []
    while True:
        outside = seeds[~mask[seeds]]
        if not outside.size:
            return mask, gens
        gens.append(int(outside[0]))
        mask = _span(G, gens)


def conjugates(G: FiniteGroup, xs) -> np.ndarray:
    """All h x h^-1 for x in xs and h in G, deduplicated."""
    xs = np.unique(np.asarray(xs, dtype=np.int64))
    if not xs.size:
        return xs
    everything = np.arange(G.order)
    out = []
    rows = max(1, _CHUNK // G.order)
    for start in range(0, xs.size, rows):
        x = xs[start:start + rows]
        out.append(np.unique(G.table[G.table[everything[:, None], x[None, :]], G.inv[:, None]]))
    return np.unique(np.concatenate(out))


def closure(G: FiniteGroup, seeds, normal: bool = False) -> Subgroup:
    """Smallest (normal, if asked) subgroup containing ``seeds``."""
    seeds = np.asarray(list(seeds) if not isinstance(seeds, np.ndarray) else seeds, dtype=np.int64)
    if normal and seeds.size:
        # <seeds^G> is already normal
        seeds = conjugates(G, seeds)
    mask, _ = _generate(G, seeds)
    sub = subgroup_from_mask(G, mask)
    if normal:
        sub.__dict__["is_normal"] = True
    return sub


def whole(G: FiniteGroup) -> Subgroup:
    return subgroup_from_mask(G, np.ones(G.order, dtype=bool))


def trivial(G: FiniteGroup) -> Subgroup:
    return closure(G, [])


def center(G: FiniteGroup) -> Subgroup:
    t = G.table
    mask = np.ones(G.order, dtype=bool)
    rows = max(1, _CHUNK // G.order)
    for start in range(0, G.order, rows):
        mask[start:start + rows] = (t[start:start + rows] == t[:, start:start + rows].T).all(axis=1)
    sub = subgroup_from_mask(G, mask)
    sub.__dict__["is_normal"] = True
    return sub


def commutator_elements(G: FiniteGroup, A, B) -> np.ndarray:
    """Distinct commutators [a, b] for a in A, b in B."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    t, inv = G.table, G.inv
    out = []
    rows = max(1, _CHUNK // max(1, B.size))
    for start in range(0, A.size, rows):
        a = A[start:start + rows, None]
        out.append(np.unique(t[t[inv[a], inv[B][None, :]], t[a, B[None, :]]]))
    return np.unique(np.concatenate(out)) if out else np.zeros(0, dtype=np.int64)


def commutator_subgroup(G: FiniteGroup, A: Subgroup, B: Subgroup) -> Subgroup:
    """[A, B]; normal whenever A and B are."""
    return closure(G, commutator_elements(G, A.members, B.members), normal=A.is_normal and B.is_normal)


def lower_central_series(G: FiniteGroup) -> list[Subgroup]:
    """G = g_1 > g_2 > ... ending at the trivial group, or at the stable term."""
    series = [whole(G)]
    top = series[0]
    while series[-1].order > 1:
        nxt = commutator_subgroup(G, series[-1], top)
        if nxt.order == series[-1].order:
            break
        series.append(nxt)
    return series


def nilpotency_class(G: FiniteGroup) -> int:
    series = lower_central_series(G)
    if series[-1].order > 1:
        raise NotNilpotent(f"lower central series of {G.label} stabilises at order {series[-1].order}")
    return len(series) - 1


def frattini_subgroup(G: FiniteGroup, p: int) -> Subgroup:
    """Phi(G) = G^p [G, G] for a p-group G."""
    _require_p_group(G, p)
    everything = np.arange(G.order)
    seeds = np.concatenate([G.power_map(p), commutator_elements(G, everything, everything)])
    return closure(G, seeds)


def frattini_quotient_dim(G: FiniteGroup, p: int) -> int:
    """d(G) = log_p [G : Phi(G)]."""
    phi = frattini_subgroup(G, p)
    index = G.order // phi.order
    d = round(math.log(index, p)) if index > 1 else 0
    assert p**d == index
    return d


def _require_p_group(G: FiniteGroup, p: int):
    if G.order == 1:
        return
    pk = prime_power(G.order)
    if pk is None or pk[0] != p:
        raise NotAPGroup(f"{G.label} has order {G.order}, not a power of {p}")


def conjugacy_class_reps(G: FiniteGroup) -> list[int]:
    seen = np.zeros(G.order, dtype=bool)
    reps = []
    for g in range(G.order):
        if seen[g]:
            continue
        reps.append(g)
        seen[conjugates(G, [g])] = True
    return reps


def minimal_normal_subgroups(G: FiniteGroup, cap: int = MINIMAL_NORMAL_CAP) -> list[Subgroup]:
    """Minimal elements among normal closures of nontrivial elements.

    For p-groups the answer is cross-checked against the subgroups of order p
    in the centre, which must coincide.
    """
    if G.order > cap:
        raise OrderCapExceeded(G.order, cap, "minimal-normal enumeration on group")
    closures: dict[bytes, Subgroup] = {}
    for g in conjugacy_class_reps(G)[1:]:
        N = closure(G, [g], normal=True)
        closures.setdefault(N.mask.tobytes(), N)
    candidates = sorted(closures.values(), key=lambda N: (N.order, N.members.tolist()))
    minimal = [N for N in candidates if not any(M.order < N.order and M <= N for M in candidates)]

    p = G.p_group_prime()
    if p is not None:
        expected = _central_order_p_subgroups(G, p)
        if sorted(m.members.tolist() for m in minimal) != sorted(e.members.tolist() for e in expected):
            raise AssertionError(f"minimal normal subgroups of {G.label} disagree with order-{p} central subgroups")
    return minimal


def _central_order_p_subgroups(G: FiniteGroup, p: int) -> list[Subgroup]:
    Z = center(G)
    found: dict[bytes, Subgroup] = {}
    for z in Z.members[G.element_orders[Z.members] == p]:
        S = closure(G, [int(z)])
        found.setdefault(S.mask.tobytes(), S)
    return list(found.values())


def monolith(G: FiniteGroup, cap: int = MINIMAL_NORMAL_CAP) -> Optional[Subgroup]:
    """The unique minimal normal subgroup, or None."""
    if G.order == 1:
        return None
    minimal = minimal_normal_subgroups(G, cap)
    result = minimal[0] if len(minimal) == 1 else None
    if G.p_group_prime() is not None:
        cyclic_centre = center(G).is_cyclic
        if (result is not None) != cyclic_centre:
            raise AssertionError(f"{G.label}: monolith={result is not None} but cyclic centre={cyclic_centre}")
    return result


# ------------------------------------------------------------ homomorphisms


@dataclass(frozen=True, eq=False)
class GroupHom:
    domain: FiniteGroup
    codomain: FiniteGroup
    images: np.ndarray
    label: str = ""

    def __call__(self, g):
        return self.images[g]

    def multiplicativity_witness(self, samples: Optional[int] = None, seed: int = 0,
                                 exhaustive_limit: int = 1024) -> Optional[tuple[int, int]]:
        """A pair (a, b) with f(ab) != f(a)f(b), or None.

        Exhaustive when the domain order is at most ``exhaustive_limit`` and
        ``samples`` is not given; otherwise random pairs.
        """
        D, C, f = self.domain, self.codomain, self.images
        n = D.order
        if samples is None and n <= exhaustive_limit:
            rows = max(1, _CHUNK // n)
            for start in range(0, n, rows):
                a = np.arange(start, min(n, start + rows))
                lhs = f[D.table[a]]
                rhs = C.table[f[a][:, None], f[None, :]]
                bad = np.argwhere(lhs != rhs)
                if bad.size:
                    return int(a[bad[0, 0]]), int(bad[0, 1])
            return None
        rng = np.random.default_rng(seed)
        k = samples or 100_000
        a = rng.integers(0, n, k)
        b = rng.integers(0, n, k)
        bad = np.flatnonzero(f[D.table[a, b]] != C.table[f[a], f[b]])
        return (int(a[bad[0]]), int(b[bad[0]])) if bad.size else None

    def is_homomorphism(self, **kw) -> bool:
        return self.images[0] == 0 and self.multiplicativity_witness(**kw) is None

    @property
    def is_surjective(self) -> bool:
        return np.unique(self.images).size == self.codomain.order

    @property
    def kernel(self) -> Subgroup:
        sub = subgroup_from_mask(self.domain, self.images == 0)
        sub.__dict__["is_normal"] = True
        return sub

    @property
    def image(self) -> Subgroup:
        mask = np.zeros(self.codomain.order, dtype=bool)
        mask[self.images] = True
        return subgroup_from_mask(self.codomain, mask)

    def __matmul__(self, other: "GroupHom") -> "GroupHom":
        """self after other."""
        return GroupHom(other.domain, self.codomain, _frozen(self.images[other.images]),
                        f"{self.label}*{other.label}")


def identity_hom(G: FiniteGroup) -> GroupHom:
    return GroupHom(G, G, _frozen(np.arange(G.order)), "id")


def quotient_by(G: FiniteGroup, N: Subgroup, label: Optional[str] = None) -> tuple[FiniteGroup, GroupHom]:
    """G/N on least coset representatives, with the projection."""
    if not N.is_normal:
        raise NotNormal(f"subgroup of order {N.order} is not normal in {G.label}")
    reps = np.empty(G.order, dtype=np.int64)
    rows = max(1, _CHUNK // N.order)
    for start in range(0, G.order, rows):
        reps[start:start + rows] = G.table[start:start + rows][:, N.members].min(axis=1)
    uniq = np.unique(reps)
    code = np.full(G.order, -1, dtype=np.int64)
    code[uniq] = np.arange(uniq.size)
    projection = code[reps]
    q = uniq.size

    def rule(I, J):
        return projection[G.table[uniq[I], uniq[J]]]

    Q = group_from_rule(q, rule, [projection[g] for g in G.generators],
                        label if label is not None else f"{G.label}/N{N.order}",
                        None, inverse=lambda I: projection[G.inv[uniq[I]]])
    Q.__dict__["representatives"] = _frozen(uniq)
    return Q, GroupHom(G, Q, _frozen(projection), "proj")


# ------------------------------------------------------------------ axioms


@dataclass(frozen=True)
class Violation:
    law: str
    witness: tuple
    count: int = 1


def verify_axioms(G: FiniteGroup, exhaustive_limit: int = EXHAUSTIVE_AXIOM_LIMIT,
                  samples: int = AXIOM_SAMPLES, seed: int = 0) -> list[Violation]:
    """Check closure, identity, inverses, associativity and generation.

    Associativity is exhaustive up to ``exhaustive_limit`` and checked on
    ``samples`` random triples above it. Each violated law is reported once,
    citing its lexicographically first witness together with a count.
    """
    t = G.table.astype(np.int64)
    n = G.order
    out = []
    bad = np.argwhere((t < 0) | (t >= n))
    if bad.size:
        return [Violation("closure", tuple(int(x) for x in bad[0]), len(bad))]
    everything = np.arange(n)
    bad = np.flatnonzero((t[0] != everything) | (t[:, 0] != everything))
    if bad.size:
        out.append(Violation("identity", (int(bad[0]),), int(bad.size)))
    inv = G.inv.astype(np.int64)
    bad = np.flatnonzero((t[everything, inv] != 0) | (t[inv, everything] != 0))
    if bad.size:
        out.append(Violation("inverse", (int(bad[0]),), int(bad.size)))

    first, count = None, 0
    if n <= exhaustive_limit:
        for a in range(n):
            # (ab)c vs a(bc), all b, c
            diff = np.argwhere(t[t[a]] != t[a][t])
            if diff.size:
                count += len(diff)
                if first is None:
                    first = (a, int(diff[0, 0]), int(diff[0, 1]))
    else:
        rng = np.random.default_rng(seed)
        a, b, c = (rng.integers(0, n, samples) for _ in range(3))
        diff = np.flatnonzero(t[t[a, b], c] != t[a, t[b, c]])
        if diff.size:
            count = int(diff.size)
            i = diff[np.lexsort((c[diff], b[diff], a[diff]))[0]]
            first = (int(a[i]), int(b[i]), int(c[i]))
    if first is not None:
        out.append(Violation("associativity", first, count))

    if _span(G, list(G.generators)).sum() != n:
        out.append(Violation("generation", tuple(G.generators), 1))
    return out
