"""GroupSpec: the constructor language for groups, with its JSON form.

A spec is a small immutable tree. ``from_json`` accepts the plain-dict form
used in config files, ``to_json`` emits it back unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

from .errors import MalformedSpec


@dataclass(frozen=True)
class Cyclic:
    m: int


@dataclass(frozen=True)
class UnitSemidirect:
    """C_{p^a} x| C_{p^b}, the top generator acting as multiplication by t."""

    p: int
    a: int
    b: int
    t: int


@dataclass(frozen=True)
class DirectProduct:
    parts: tuple


@dataclass(frozen=True)
class CentralPower:
    base: "GroupSpec"
    copies: int


@dataclass(frozen=True)
class Wreath:
    base: "GroupSpec"
    cyclic_order: int


@dataclass(frozen=True)
class WreathCentral:
    base: "GroupSpec"
    p: int
    n: int


@dataclass(frozen=True)
class Quotient:
    """Quotient of ``base`` by the normal closure of generator words.

    A word is a tuple of nonzero integers; ``k`` means the k-th generator of
    the base (1-based) and ``-k`` its inverse.
    """

    base: "GroupSpec"
    normal_generators: tuple


GroupSpec = Union[Cyclic, UnitSemidirect, DirectProduct, CentralPower, Wreath, WreathCentral, Quotient]

_KINDS = {
    "cyclic": Cyclic,
    "unit_semidirect": UnitSemidirect,
    "direct_product": DirectProduct,
    "central_power": CentralPower,
    "wreath": Wreath,
    "wreath_central": WreathCentral,
    "quotient": Quotient,
}
_KIND_OF = {cls: kind for kind, cls in _KINDS.items()}


def _int(obj: dict, key: str, minimum: int) -> int:
    if key not in obj:
        raise MalformedSpec(f"{obj.get('kind')!r} spec is missing field {key!r}")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedSpec(f"field {key!r} must be an integer, got {value!r}")
    if value < minimum:
        raise MalformedSpec(f"field {key!r} must be >= {minimum}, got {value}")
    return value


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


def from_json(obj: Any) -> GroupSpec:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise MalformedSpec(f"spec must be an object with a 'kind' field, got {obj!r}")
    kind = obj["kind"]
    if kind not in _KINDS:
        raise MalformedSpec(f"unknown spec kind {kind!r}")
    if kind == "cyclic":
        return Cyclic(_int(obj, "m", 1))
    if kind == "unit_semidirect":
        p = _int(obj, "p", 2)
        if not _is_prime(p):
            raise MalformedSpec(f"p={p} is not prime")
        return UnitSemidirect(p, _int(obj, "a", 1), _int(obj, "b", 1), _int(obj, "t", 0))
    if kind == "direct_product":
        parts = obj.get("parts")
        if not isinstance(parts, list) or not parts:
            raise MalformedSpec("direct_product needs a nonempty 'parts' list")
        return DirectProduct(tuple(from_json(x) for x in parts))
    if kind == "central_power":
        return CentralPower(from_json(obj.get("base")), _int(obj, "copies", 1))
    if kind == "wreath":
        return Wreath(from_json(obj.get("base")), _int(obj, "cyclic_order", 1))
    if kind == "wreath_central":
        p = _int(obj, "p", 2)
        if not _is_prime(p):
            raise MalformedSpec(f"p={p} is not prime")
        return WreathCentral(from_json(obj.get("base")), p, _int(obj, "n", 0))
    words = obj.get("normal_generators")
    if not isinstance(words, list):
        raise MalformedSpec("quotient needs a 'normal_generators' list of words")
    parsed = []
    for w in words:
        if not isinstance(w, list) or any(isinstance(k, bool) or not isinstance(k, int) or k == 0 for k in w):
            raise MalformedSpec(f"bad generator word {w!r}: use nonzero signed 1-based indices")
        parsed.append(tuple(w))
    return Quotient(from_json(obj.get("base")), tuple(parsed))


def to_json(spec: GroupSpec) -> dict:
    kind = _KIND_OF[type(spec)]
    if isinstance(spec, Cyclic):
        return {"kind": kind, "m": spec.m}
    if isinstance(spec, UnitSemidirect):
        return {"kind": kind, "p": spec.p, "a": spec.a, "b": spec.b, "t": spec.t}
    if isinstance(spec, DirectProduct):
        return {"kind": kind, "parts": [to_json(x) for x in spec.parts]}
    if isinstance(spec, CentralPower):
        return {"kind": kind, "base": to_json(spec.base), "copies": spec.copies}
    if isinstance(spec, Wreath):
        return {"kind": kind, "base": to_json(spec.base), "cyclic_order": spec.cyclic_order}
    if isinstance(spec, WreathCentral):
        return {"kind": kind, "base": to_json(spec.base), "p": spec.p, "n": spec.n}
    return {
        "kind": kind,
        "base": to_json(spec.base),
        "normal_generators": [list(w) for w in spec.normal_generators],
    }


def describe(spec: GroupSpec) -> str:
    """Short human-readable label, e.g. ``C4:C2[t=3]`` or ``wc(C4:C2[t=3],2,1)``."""
    if isinstance(spec, Cyclic):
        return f"C{spec.m}"
    if isinstance(spec, UnitSemidirect):
        return f"C{spec.p ** spec.a}:C{spec.p ** spec.b}[t={spec.t}]"
    if isinstance(spec, DirectProduct):
        return "x".join(describe(x) for x in spec.parts)
    if isinstance(spec, CentralPower):
        return f"cp({describe(spec.base)},{spec.copies})"
    if isinstance(spec, Wreath):
        return f"({describe(spec.base)})wrC{spec.cyclic_order}"
    if isinstance(spec, WreathCentral):
        return f"wc({describe(spec.base)},{spec.p},{spec.n})"
    return f"({describe(spec.base)})/<<{len(spec.normal_generators)}>>"
