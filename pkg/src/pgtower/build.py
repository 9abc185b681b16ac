"""Turn a GroupSpec into a FiniteGroup."""
from __future__ import annotations

import math

import numpy as np

from . import spec as S
from .errors import InvalidUnit, MalformedSpec, OrderCapExceeded
from .group import (DEFAULT_ORDER_CAP, FiniteGroup, closure, cyclic_extension, cyclic_group,
                    direct_product_group, quotient_by)


def build_group(spec, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    if isinstance(spec, dict):
        spec = S.from_json(spec)
    label = S.describe(spec)

    if isinstance(spec, S.Cyclic):
        _check_cap(spec.m, order_cap)
        return cyclic_group(spec.m, label, spec)

    if isinstance(spec, S.UnitSemidirect):
        return unit_semidirect(spec.p, spec.a, spec.b, spec.t, order_cap, spec)

    if isinstance(spec, S.DirectProduct):
        parts = [build_group(x, order_cap) for x in spec.parts]
        order = math.prod(G.order for G in parts)
        _check_cap(order, order_cap)
        return direct_product_group(parts, label, spec)

    if isinstance(spec, S.CentralPower):
        from .constructions import central_power
        return central_power(build_group(spec.base, order_cap), spec.copies, order_cap, spec).group

    if isinstance(spec, S.Wreath):
        from .constructions import regular_wreath
        return regular_wreath(build_group(spec.base, order_cap), spec.cyclic_order, order_cap, spec).group

    if isinstance(spec, S.WreathCentral):
        from .constructions import wreath_central
        return wreath_central(build_group(spec.base, order_cap), spec.p, spec.n, order_cap, spec).group

    if isinstance(spec, S.Quotient):
        base = build_group(spec.base, order_cap)
        for word in spec.normal_generators:
            if any(abs(k) > len(base.generators) for k in word):
                raise MalformedSpec(f"word {list(word)} refers to a generator beyond {len(base.generators)}")
        N = closure(base, [base.word(w) for w in spec.normal_generators], normal=True)
        Q, _ = quotient_by(base, N, label)
        return FiniteGroup(Q.table, Q.inv, Q.generators, label, spec)

    raise MalformedSpec(f"not a GroupSpec: {spec!r}")


def _check_cap(order: int, cap: int):
    if order > cap:
        raise OrderCapExceeded(order, cap)


def unit_semidirect(p: int, a: int, b: int, t: int, order_cap: int = DEFAULT_ORDER_CAP, provenance=None) -> FiniteGroup:
    """C_{p^a} x| C_{p^b} with the top generator acting as x -> t x."""
    m, c = p**a, p**b
    if math.gcd(t, m) != 1:
        raise InvalidUnit(f"t={t} is not a unit modulo {m}")
    if pow(t, c, m) != 1 % m:
        raise InvalidUnit(f"t={t} does not have order dividing {c} modulo {m}")
    _check_cap(m * c, order_cap)
    N = cyclic_group(m)
    action = (t * np.arange(m)) % m
    spec = provenance or S.UnitSemidirect(p, a, b, t)
    return cyclic_extension(N, action, c, S.describe(spec), spec)
