"""Named seed groups and the small test corpus."""
from __future__ import annotations

from . import spec as S
from .build import build_group, unit_semidirect
from .errors import SearchExhausted

D8 = S.UnitSemidirect(2, 2, 1, 3)
M16 = S.UnitSemidirect(2, 3, 1, 5)
M27 = S.UnitSemidirect(3, 2, 1, 4)


def cyclic(m: int) -> S.Cyclic:
    return S.Cyclic(m)


def elementary_abelian(p: int, rank: int) -> S.DirectProduct:
    return S.DirectProduct(tuple(S.Cyclic(p) for _ in range(rank)))


def quaternion_spec() -> S.Quotient:
    """Q8 as (C4 x| C4)/<x^2 y^2>, searching for the unit t that inverts x.

    x = generator 1, y = generator 2; killing x^2 y^2 forces y^2 = x^2.
    """
    for t in range(2, 4):
        try:
            unit_semidirect(2, 2, 2, t)
        except Exception:
            continue
        candidate = S.Quotient(S.UnitSemidirect(2, 2, 2, t), ((1, 1, 2, 2),))
        G = build_group(candidate)
        if G.order == 8 and int((G.element_orders == 2).sum()) == 1:
            return candidate
    raise SearchExhausted("no unit t gives the quaternion group")


def two_group_corpus() -> dict:
    """Small 2-groups used by the (co)homology checks, keyed by name."""
    return {
        "C2": cyclic(2),
        "C4": cyclic(4),
        "C8": cyclic(8),
        "C2xC2": elementary_abelian(2, 2),
        "C2xC4": S.DirectProduct((S.Cyclic(2), S.Cyclic(4))),
        "D8": D8,
        "M16": M16,
        "K2(D8)": S.CentralPower(D8, 2),
        # generator 1 of J_1 is D8's x in the first coordinate; x^2 generates L_1
        "J1/L1(D8)": S.Quotient(S.WreathCentral(D8, 2, 1), ((1, 1),)),
    }
