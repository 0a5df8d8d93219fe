"""Logic registry: each name maps to a condition set (the model side) and
a calculus (the proof side).

Names:

    BCL                      minimal connexive base
    BCL+cun                  closed under single negation
    BCL+gcun:k,l,m,n         closed under iterated negation (k,l even)
    MBCL                     modal base (Dual, Ksup, necessitation)
    MBCL+X1,...,Xn           modal law packages, X in D1 D2 K T D B 4 5
    MBCL+gcun:k,l,m,n        modal, closed under iterated negation
    MBCL+CUDR|CUDL|CUDE      modal, closed under demodalization
"""

from __future__ import annotations

from dataclasses import dataclass

from .conditions import ConditionError, ConditionSet
from .proofs import (
    CORE_SCHEMAS, CUDL, CUDR, CUN_SCHEMAS, MODAL_CORE_SCHEMAS,
    MODAL_LAW_SCHEMAS, Calculus, gcun_schemas,
)

__all__ = ["Logic", "logic", "registry_names", "registry_logics"]


_BASE_FLAGS = ("a1", "a2", "b0", "b1", "b2")

_LAW_FLAGS = {
    "D1": ("d1",), "D2": ("d2",), "K": ("k1", "k2"), "T": ("t",),
    "D": ("d",), "B": ("b",), "4": ("iv",), "5": ("v",),
}

_DEM_FLAGS = {"CUDR": "demr", "CUDL": "deml", "CUDE": "deme"}


@dataclass(frozen=True)
class Logic:
    name: str
    conditions: ConditionSet
    calculus: Calculus


def _split_addons(rest: str):
    tokens = [t.strip() for t in rest.split(",") if t.strip()]
    addons = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.lower().startswith("gcun:"):
            params = [tok[5:]] + tokens[i + 1:i + 4]
            if len(params) != 4:
                raise ConditionError(f"gcun addon near {tok!r} needs four numbers")
            addons.append(("gcun", tuple(int(p) for p in params)))
            i += 4
        else:
            addons.append(("name", tok))
            i += 1
    return addons


def logic(name: str) -> Logic:
    """Resolve a logic name to its condition set and calculus."""
    text = name.strip()
    head, _, rest = text.partition("+")
    base = head.strip().upper()
    if base not in ("BCL", "MBCL"):
        raise ConditionError(f"unknown logic {name!r} (expected BCL or MBCL base)")
    modal = base == "MBCL"

    flags = list(_BASE_FLAGS)
    gcun = []
    schemas = list(CORE_SCHEMAS)
    if modal:
        schemas += list(MODAL_CORE_SCHEMAS)
    canonical = [base]

    for kind, value in _split_addons(rest):
        if kind == "gcun":
            k, l, m, n = value
            flags.append("cun")
            gcun.append(value)
            for s in CUN_SCHEMAS + gcun_schemas(k, l, m, n):
                if s not in schemas:
                    schemas.append(s)
            canonical.append(f"gcun:{k},{l},{m},{n}")
            continue
        token = value
        if token.lower() == "cun":
            flags.append("cun")
            for s in CUN_SCHEMAS:
                if s not in schemas:
                    schemas.append(s)
            canonical.append("cun")
        elif token.upper() in _DEM_FLAGS:
            if not modal:
                raise ConditionError(f"{token} requires the MBCL base")
            flags.append(_DEM_FLAGS[token.upper()])
            # the equivalence closure is axiomatized by both directional
            # schemata; see the README notes on CUDE
            wanted = {"CUDR": (CUDR,), "CUDL": (CUDL,),
                      "CUDE": (CUDR, CUDL)}[token.upper()]
            for s in wanted:
                if s not in schemas:
                    schemas.append(s)
            canonical.append(token.upper())
        elif token.upper() in _LAW_FLAGS:
            if not modal:
                raise ConditionError(f"modal law {token} requires the MBCL base")
            flags.extend(_LAW_FLAGS[token.upper()])
            schema = MODAL_LAW_SCHEMAS[token.upper()]
            if schema not in schemas:
                schemas.append(schema)
            canonical.append(token.upper())
        else:
            raise ConditionError(f"unknown addon {token!r} in logic {name!r}")

    conds = ConditionSet(dict.fromkeys(flags), gcun=gcun)
    cal_name = canonical[0] + ("+" + ",".join(canonical[1:]) if canonical[1:] else "")
    return Logic(cal_name, conds, Calculus(cal_name, tuple(schemas), modal=modal))


def registry_names(gcun=(0, 0, 2, 2)):
    """Representative instantiation of every registry family."""
    g = f"gcun:{gcun[0]},{gcun[1]},{gcun[2]},{gcun[3]}"
    return (
        "BCL", "BCL+cun", f"BCL+{g}",
        "MBCL",
        "MBCL+D1", "MBCL+D2", "MBCL+K", "MBCL+T", "MBCL+D", "MBCL+B",
        "MBCL+4", "MBCL+5",
        f"MBCL+{g}",
        "MBCL+CUDR", "MBCL+CUDL", "MBCL+CUDE",
    )


def registry_logics(gcun=(0, 0, 2, 2)):
    return tuple(logic(n) for n in registry_names(gcun))
