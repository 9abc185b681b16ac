"""Central powers K_n, regular wreath products and wreath-central products J_n.

Tuples of E-elements are handled as integer arrays of shape (..., n) holding
E-codes, coordinate 0 first. The central power keeps coordinates 2..n on a
fixed transversal of Z(E) and lets coordinate 1 absorb the central parts,
which picks one canonical tuple per F_n-coset.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import spec as S
from .errors import AbelianBase, CenterNotCyclic, MalformedSpec, OrderCapExceeded, SearchExhausted
from .group import (DEFAULT_ORDER_CAP, FiniteGroup, GroupHom, Subgroup, _frozen, center,
                    cyclic_extension, direct_product_group, group_from_rule, nilpotency_class, prime_power,
                    quotient_by, subgroup_from_mask)


def _radix_encode(tuples: np.ndarray, base: int) -> np.ndarray:
    weights = base ** np.arange(tuples.shape[-1], dtype=np.int64)
    return tuples @ weights


def _radix_decode(codes: np.ndarray, base: int, width: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    return (codes[..., None] // base ** np.arange(width, dtype=np.int64)) % base


def tuple_product(E: FiniteGroup, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Componentwise product in the direct power of E."""
    return E.table[np.asarray(x), np.asarray(y)].astype(np.int64)


def tuple_inverse(E: FiniteGroup, x: np.ndarray) -> np.ndarray:
    return E.inv[np.asarray(x)].astype(np.int64)


@dataclass(frozen=True, eq=False)
class Transversal:
    """Least-code representatives r(e) of the cosets eZ(E), with zeta(e) = r(e)^-1 e."""

    E: FiniteGroup
    Z: Subgroup

    @cached_property
    def rep(self) -> np.ndarray:
        E = self.E
        return _frozen(E.table[:, self.Z.members].min(axis=1).astype(np.int64))

    @cached_property
    def zeta(self) -> np.ndarray:
        E = self.E
        return _frozen(E.table[E.inv[self.rep], np.arange(E.order)].astype(np.int64))

    @cached_property
    def reps(self) -> np.ndarray:
        return _frozen(np.unique(self.rep))

    @cached_property
    def rep_index(self) -> np.ndarray:
        """Position of r(e) in ``reps``, for every e."""
        return _frozen(np.searchsorted(self.reps, self.rep))


@dataclass(frozen=True, eq=False)
class CentralPowerGroup:
    E: FiniteGroup
    n: int
    Z: Subgroup
    transversal: Transversal
    group: FiniteGroup

    @property
    def q(self) -> int:
        return self.Z.order

    @property
    def ambient_order(self) -> int:
        return self.E.order**self.n

    @property
    def F_order(self) -> int:
        return self.q ** (self.n - 1)

    def canonical(self, tuples) -> np.ndarray:
        """Canonical representative of the F_n-coset of each tuple."""
        x = np.array(tuples, dtype=np.int64)
        if self.n == 1:
            return x
        T = self.transversal
        central = T.zeta[x[..., 1:]]
        x[..., 1:] = T.rep[x[..., 1:]]
        head = x[..., 0]
        for i in range(central.shape[-1]):
            head = self.E.table[head, central[..., i]].astype(np.int64)
        x[..., 0] = head
        return x

    def encode(self, tuples) -> np.ndarray:
        """Codes of (not necessarily canonical) tuples."""
        x = self.canonical(tuples)
        if self.n == 1:
            return x[..., 0]
        T = self.transversal
        tail = _radix_encode(T.rep_index[x[..., 1:]], T.reps.size)
        return x[..., 0] + self.E.order * tail

    def decode(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        out = np.empty(codes.shape + (self.n,), dtype=np.int64)
        out[..., 0] = codes % self.E.order
        if self.n > 1:
            T = self.transversal
            out[..., 1:] = T.reps[_radix_decode(codes // self.E.order, T.reps.size, self.n - 1)]
        return out

    @cached_property
    def L(self) -> Subgroup:
        """Image of Z(E)^n: canonical tuples (z, 1, ..., 1)."""
        mask = np.zeros(self.group.order, dtype=bool)
        mask[self.Z.members] = True
        sub = subgroup_from_mask(self.group, mask)
        sub.__dict__["is_normal"] = True
        return sub

    def random_F_element(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """``size`` random tuples of Z(E)^n with product 1."""
        z = self.Z.members[rng.integers(0, self.q, (size, self.n))].astype(np.int64)
        prod = z[:, 1]
        for i in range(2, self.n):
            prod = self.E.table[prod, z[:, i]].astype(np.int64)
        if self.n > 1:
            z[:, 0] = self.E.inv[prod]
        else:
            z[:, 0] = 0
        return z


def central_power(E: FiniteGroup, n: int, order_cap: int = DEFAULT_ORDER_CAP, provenance=None) -> CentralPowerGroup:
    """K_n = E^n / F_n, the natural central product of n copies of E."""
    if n < 1:
        raise MalformedSpec("central_power needs at least one copy")
    Z = center(E)
    if not Z.is_cyclic:
        raise CenterNotCyclic(f"centre of {E.label} (order {Z.order}) is not cyclic")
    order = E.order**n // Z.order ** (n - 1)
    if order > order_cap:
        raise OrderCapExceeded(order, order_cap)
    T = Transversal(E, Z)
    label = S.describe(provenance) if provenance is not None else f"cp({E.label},{n})"
    shell = CentralPowerGroup(E, n, Z, T, None)

    def rule(I, J):
        return shell.encode(tuple_product(E, shell.decode(I), shell.decode(J)))

    def inverse(I):
        return shell.encode(tuple_inverse(E, shell.decode(I)))

    gens = []
    for i in range(n):
        for g in E.generators:
            t = np.zeros(n, dtype=np.int64)
            t[i] = g
            gens.append(int(shell.encode(t)))
    G = group_from_rule(order, rule, gens, label, provenance, inverse)
    return CentralPowerGroup(E, n, Z, T, G)


@dataclass(frozen=True, eq=False)
class WreathGroup:
    """H wr C_c on pairs (tuple, s) coded as tuple_code + |H|^c s.

    x^alpha = alpha^-1 x alpha moves coordinate i to i+1.
    """

    H: FiniteGroup
    c: int
    group: FiniteGroup

    @property
    def base_order(self) -> int:
        return self.H.order**self.c

    @property
    def alpha(self) -> int:
        return self.base_order if self.c > 1 else 0

    def encode(self, tuples, shift=0) -> np.ndarray:
        return _radix_encode(np.asarray(tuples, dtype=np.int64), self.H.order) + self.base_order * (np.asarray(shift) % self.c)

    def decode(self, codes) -> tuple[np.ndarray, np.ndarray]:
        codes = np.asarray(codes, dtype=np.int64)
        return _radix_decode(codes % self.base_order, self.H.order, self.c), codes // self.base_order

    def sigma(self, base_codes, k: int = 1) -> np.ndarray:
        """Shift of base elements: (sigma^k x)^(i) = x^(i-k)."""
        x, _ = self.decode(base_codes)
        return self.encode(np.roll(x, k, axis=-1))

    @cached_property
    def B(self) -> Subgroup:
        mask = np.zeros(self.group.order, dtype=bool)
        mask[: self.base_order] = True
        return subgroup_from_mask(self.group, mask)

    @cached_property
    def Z(self) -> Subgroup:
        ZH = center(self.H)
        x, s = self.decode(np.arange(self.group.order))
        mask = (s == 0) & ZH.mask[x].all(axis=-1)
        return subgroup_from_mask(self.group, mask)


def regular_wreath(H: FiniteGroup, c: int, order_cap: int = DEFAULT_ORDER_CAP, provenance=None) -> WreathGroup:
    if c < 1:
        raise MalformedSpec("wreath needs a positive cyclic order")
    order = H.order**c * c
    if order > order_cap:
        raise OrderCapExceeded(order, order_cap)
    label = S.describe(provenance) if provenance is not None else f"({H.label})wrC{c}"
    base = direct_product_group([H] * c, f"{H.label}^{c}")
    shell = WreathGroup(H, c, None)
    # alpha x alpha^-1 = sigma^-1(x)
    action = shell.sigma(np.arange(base.order), -1)
    return WreathGroup(H, c, cyclic_extension(base, action, c, label, provenance))


def wreath_lemma_witnesses(W: WreathGroup) -> tuple[dict, list]:
    """For each w outside the base B, some b in B with [b, w] outside Z.

    Returns (witnesses, failures); failures lists every w without a witness.
    """
    G = W.group
    B = W.B.members
    Zmask = W.Z.mask
    witnesses, failures = {}, []
    for w in range(W.base_order, G.order):
        comm = G.table[G.table[G.inv[B], G.inv[w]], G.table[B, w]]
        hit = np.flatnonzero(~Zmask[comm])
        if hit.size:
            witnesses[w] = int(B[hit[0]])
        else:
            failures.append(w)
    return witnesses, failures


@dataclass(frozen=True, eq=False)
class WreathCentralGroup:
    """J_n = K_n x| <alpha_n> with K_n the central power of p^n copies of E."""

    E: FiniteGroup
    p: int
    n: int
    K: CentralPowerGroup
    group: FiniteGroup

    @property
    def copies(self) -> int:
        return self.p**self.n

    @property
    def alpha(self) -> int:
        return self.K.group.order if self.copies > 1 else 0

    @cached_property
    def L(self) -> Subgroup:
        mask = np.zeros(self.group.order, dtype=bool)
        mask[self.K.L.members] = True
        sub = subgroup_from_mask(self.group, mask)
        sub.__dict__["is_normal"] = True
        return sub

    def sigma(self, k_codes, k: int = 1) -> np.ndarray:
        """x^(alpha^k) on K-codes: coordinate i moves to i+k."""
        return self.K.encode(np.roll(self.K.decode(k_codes), k, axis=-1))

    def decode(self, codes) -> tuple[np.ndarray, np.ndarray]:
        codes = np.asarray(codes, dtype=np.int64)
        m = self.K.group.order
        return codes % m, codes // m


def shift_preserves_F(K: CentralPowerGroup, limit: int = 100_000) -> bool:
    """Check the cyclic coordinate shift maps F_n into (hence onto) F_n."""
    E, n, Zm = K.E, K.n, K.Z.members
    if K.F_order <= limit:
        grids = np.meshgrid(*[np.arange(K.q)] * (n - 1), indexing="ij")
        tail = np.stack([g.ravel() for g in grids], axis=-1) if n > 1 else np.zeros((1, 0), dtype=np.int64)
        F = np.empty((tail.shape[0], n), dtype=np.int64)
        F[:, 1:] = Zm[tail]
        prod = np.zeros(tail.shape[0], dtype=np.int64)
        for i in range(1, n):
            prod = E.table[prod, F[:, i]].astype(np.int64)
        F[:, 0] = E.inv[prod]
    else:
        # F_n is generated by (.., z, z^-1, ..) at cyclically adjacent positions
        z = int(Zm[E.element_orders[Zm] == K.q][0])
        F = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            F[i, i] = z
            F[i, (i + 1) % n] = E.inv[z]
    shifted = np.roll(F, 1, axis=-1)
    prod = np.zeros(F.shape[0], dtype=np.int64)
    for i in range(n):
        prod = E.table[prod, shifted[:, i]].astype(np.int64)
    return bool(K.Z.mask[shifted].all() and (prod == 0).all())


def wreath_central(E: FiniteGroup, p: int, n: int, order_cap: int = DEFAULT_ORDER_CAP, provenance=None) -> WreathCentralGroup:
    if n < 0:
        raise MalformedSpec("wreath_central needs n >= 0")
    if E.is_abelian:
        raise AbelianBase(f"{E.label} is abelian")
    Z = center(E)
    if not Z.is_cyclic:
        raise CenterNotCyclic(f"centre of {E.label} (order {Z.order}) is not cyclic")
    c = p**n
    order = E.order**c // Z.order ** (c - 1) * c
    if order > order_cap:
        raise OrderCapExceeded(order, order_cap)
    K = central_power(E, c, order_cap)
    if not shift_preserves_F(K):
        raise AssertionError("coordinate shift does not preserve F_n")
    label = S.describe(provenance) if provenance is not None else f"wc({E.label},{p},{n})"
    shell = WreathCentralGroup(E, p, n, K, None)
    action = shell.sigma(np.arange(K.group.order), -1)
    J = cyclic_extension(K.group, action, c, label, provenance)
    return WreathCentralGroup(E, p, n, K, J)


def natural_central_quotient_iso(K: CentralPowerGroup) -> GroupHom:
    """K_n/L_n -> (E/Z(E))^n by reducing each coordinate modulo Z(E); verified."""
    Q, _ = quotient_by(K.group, K.L, f"{K.group.label}/L")
    EZ, proj = quotient_by(K.E, K.Z, f"{K.E.label}/Z")
    target = direct_product_group([EZ] * K.n, f"({EZ.label})^{K.n}")
    reps = K.decode(Q.representatives)
    images = _radix_encode(proj.images[reps], EZ.order)
    hom = GroupHom(Q, target, _frozen(images), "natural-iso")
    if np.unique(images).size != Q.order or Q.order != target.order or not hom.is_homomorphism(exhaustive_limit=1 << 14):
        raise AssertionError("natural map K_n/L_n -> (E/Z)^n is not an isomorphism")
    return hom


def _units_of_order_dividing(m: int, c: int) -> list[int]:
    return [t for t in range(2, m) if math.gcd(t, m) == 1 and pow(t, c, m) == 1]


def seed_search(p: int, q: int, class_cap: int = 2, max_a: int = 5, max_b: int = 3,
                order_cap: int = DEFAULT_ORDER_CAP) -> S.UnitSemidirect:
    """Smallest non-abelian C_{p^a} x| C_{p^b} with cyclic centre of order q and class <= class_cap.

    Candidates are tried by increasing order, then a, then t.
    """
    from .build import unit_semidirect

    pk = prime_power(q)
    if pk is None or pk[0] != p:
        raise MalformedSpec(f"q={q} is not a positive power of p={p}")
    candidates = sorted((a + b, a, b) for a in range(1, max_a + 1) for b in range(1, max_b + 1))
    for _, a, b in candidates:
        if p ** (a + b) > order_cap:
            continue
        for t in _units_of_order_dividing(p**a, p**b):
            G = unit_semidirect(p, a, b, t)
            Z = center(G)
            if Z.order != q or not Z.is_cyclic or G.is_abelian:
                continue
            if nilpotency_class(G) <= class_cap:
                return S.UnitSemidirect(p, a, b, t)
    raise SearchExhausted(f"no seed with |Z|={q}, class <= {class_cap} for a <= {max_a}, b <= {max_b}")
