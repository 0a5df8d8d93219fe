"""Relating models and truth evaluation.

A model is a Kripke frame whose worlds each carry a finite relating
relation over a declared carrier of formulas.  Boolean connectives and
the modal operators are interpreted classically; an arrow ``b -> c`` is
true at a world exactly when its material reading holds there *and* the
pair ``(b, c)`` is related at that world.  A non-modal model is the
one-world case with empty access.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .syntax import (
    And, Arrow, Box, ClosureSet, Diamond, Formula, Neg, Or, Var,
    parse, to_text,
)

__all__ = [
    "ModelError", "RelatingModel", "evaluate", "holds_in_model",
    "truth_table", "successors_map",
    "Valid", "Countermodel", "BoundedValid",
    "model_to_json", "model_from_json",
]


class ModelError(ValueError):
    pass


def _as_pair(item) -> tuple:
    a, b = item
    if not isinstance(a, Formula) or not isinstance(b, Formula):
        raise ModelError("relating entries must be formula pairs")
    return (a, b)


class RelatingModel:
    """Worlds, accessibility, valuation, and one relating relation per world.

    The relating relations are stored extensionally: a pair absent from
    ``relating[w]`` simply does not hold at ``w``.  Every formula occurring
    in a relating pair must belong to the model's carrier closure set;
    when no carrier is given, the least closure covering the relating
    pairs is used.
    """

    __slots__ = ("worlds", "access", "valuation", "relating", "carrier")

    def __init__(self, worlds: Iterable[str], access=(), valuation=None,
                 relating=None, carrier: Optional[ClosureSet] = None):
        worlds = tuple(sorted(dict.fromkeys(str(w) for w in worlds)))
        if not worlds:
            raise ModelError("a model needs at least one world")
        wset = set(worlds)

        acc = frozenset((str(a), str(b)) for a, b in access)
        for a, b in acc:
            if a not in wset or b not in wset:
                raise ModelError(f"access edge ({a!r}, {b!r}) leaves the world set")

        valuation = dict(valuation or {})
        for w in valuation:
            if w not in wset:
                raise ModelError(f"valuation names unknown world {w!r}")
        val = {w: frozenset(valuation.get(w, ())) for w in worlds}

        relating = dict(relating or {})
        for w in relating:
            if w not in wset:
                raise ModelError(f"relating relation names unknown world {w!r}")
        rel = {w: frozenset(_as_pair(p) for p in relating.get(w, ()))
               for w in worlds}

        mentioned = [f for pairs in rel.values() for p in pairs for f in p]
        if carrier is None:
            carrier = ClosureSet(mentioned)
        else:
            for f in mentioned:
                if f not in carrier:
                    raise ModelError(
                        f"relating pair formula {to_text(f)!r} is outside the carrier")

        self.worlds = worlds
        self.access = acc
        self.valuation = val
        self.relating = rel
        self.carrier = carrier

    def replace(self, access=None, valuation=None, relating=None, carrier=None):
        """Copy of the model with some components swapped out."""
        return RelatingModel(
            self.worlds,
            self.access if access is None else access,
            self.valuation if valuation is None else valuation,
            self.relating if relating is None else relating,
            self.carrier if carrier is None else carrier,
        )

    def __repr__(self):
        return (f"RelatingModel(worlds={len(self.worlds)}, "
                f"access={len(self.access)}, carrier={len(self.carrier)})")


def successors_map(model: RelatingModel) -> dict:
    succ = {w: [] for w in model.worlds}
    for a, b in sorted(model.access):
        succ[a].append(b)
    return succ


def evaluate(model: RelatingModel, world: str, formula: Formula) -> bool:
    """Truth of a formula at a world of a model."""
    if world not in model.valuation:
        raise ModelError(f"unknown world {world!r}")
    succ = successors_map(model)
    memo: dict = {}

    def rec(w: str, f: Formula) -> bool:
        key = (w, f)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(f, Var):
            out = f.name in model.valuation[w]
        elif isinstance(f, Neg):
            out = not rec(w, f.child)
        elif isinstance(f, And):
            out = rec(w, f.left) and rec(w, f.right)
        elif isinstance(f, Or):
            out = rec(w, f.left) or rec(w, f.right)
        elif isinstance(f, Arrow):
            out = ((not rec(w, f.left)) or rec(w, f.right)) \
                and (f.left, f.right) in model.relating[w]
        elif isinstance(f, Box):
            out = all(rec(u, f.child) for u in succ[w])
        elif isinstance(f, Diamond):
            out = any(rec(u, f.child) for u in succ[w])
        else:
            raise TypeError(f"not a formula node: {f!r}")
        memo[key] = out
        return out

    return rec(world, formula)


def holds_in_model(model: RelatingModel, formula: Formula) -> bool:
    """True when the formula is true at every world of the model."""
    return all(evaluate(model, w, formula) for w in model.worlds)


def truth_table(model: RelatingModel, closure: Optional[ClosureSet] = None) -> dict:
    """Truth of every closure formula at every world, computed bottom-up.

    Returns a dict keyed by (world, formula).  Defaults to the model's
    carrier.  The closure ordering (smaller formulas first) makes a single
    pass sufficient.
    """
    closure = closure if closure is not None else model.carrier
    succ = successors_map(model)
    tt: dict = {}
    for f in closure:
        for w in model.worlds:
            if isinstance(f, Var):
                v = f.name in model.valuation[w]
            elif isinstance(f, Neg):
                v = not tt[(w, f.child)]
            elif isinstance(f, And):
                v = tt[(w, f.left)] and tt[(w, f.right)]
            elif isinstance(f, Or):
                v = tt[(w, f.left)] or tt[(w, f.right)]
            elif isinstance(f, Arrow):
                v = ((not tt[(w, f.left)]) or tt[(w, f.right)]) \
                    and (f.left, f.right) in model.relating[w]
            elif isinstance(f, Box):
                v = all(tt[(u, f.child)] for u in succ[w])
            else:
                v = any(tt[(u, f.child)] for u in succ[w])
            tt[(w, f)] = v
    return tt


# ---------------------------------------------------------------------------
# verdicts

@dataclass(frozen=True)
class Valid:
    """No admissible model within the completeness bound refutes the query."""
    searched_worlds: int
    bound: int


@dataclass(frozen=True)
class Countermodel:
    """An admissible model refuting the query at `world`; re-validated
    against the evaluator before being returned."""
    model: RelatingModel
    world: str


@dataclass(frozen=True)
class BoundedValid:
    """No countermodel up to the searched size; the searched bound is
    below the completeness bound (or none is known for the condition set)."""
    searched_worlds: int
    bound: Optional[int]


# ---------------------------------------------------------------------------
# JSON document form

def model_to_json(model: RelatingModel) -> dict:
    """Serialize to the model document shape (formulas as grammar text)."""
    return {
        "worlds": list(model.worlds),
        "access": sorted([a, b] for a, b in model.access),
        "valuation": {w: sorted(vs) for w, vs in sorted(model.valuation.items()) if vs},
        "relating": {
            w: sorted([to_text(a), to_text(b)] for a, b in pairs)
            for w, pairs in sorted(model.relating.items()) if pairs
        },
    }


def model_from_json(doc: Mapping) -> RelatingModel:
    """Parse a model document; raises ModelError on malformed input."""
    if not isinstance(doc, Mapping):
        raise ModelError("model document must be a JSON object")
    try:
        worlds = list(doc["worlds"])
    except KeyError:
        raise ModelError("model document lacks a 'worlds' list") from None
    access = [tuple(e) for e in doc.get("access", ())]
    for e in access:
        if len(e) != 2:
            raise ModelError(f"access edge {e!r} is not a pair")
    valuation = {w: list(vs) for w, vs in dict(doc.get("valuation", {})).items()}
    relating = {}
    for w, pairs in dict(doc.get("relating", {})).items():
        parsed = []
        for p in pairs:
            if len(p) != 2:
                raise ModelError(f"relating entry {p!r} is not a pair")
            parsed.append((parse(str(p[0])), parse(str(p[1]))))
        relating[w] = parsed
    return RelatingModel(worlds, access, valuation, relating)
