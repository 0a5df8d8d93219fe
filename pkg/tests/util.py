"""Shared test helpers: formula generators, model samplers, and slow
independent oracles that the fast implementation paths are checked against."""

from __future__ import annotations

import random

import hypothesis.strategies as st

from bclkit.conditions import (
    ConditionSet, admissible, check_all, close, forced_pairs, frame_closure,
)
from bclkit.semantics import RelatingModel, evaluate, successors_map
from bclkit.syntax import (
    And, Arrow, Box, ClosureSet, Diamond, Neg, Or, Var, vars_of,
)

# ---------------------------------------------------------------------------
# hypothesis strategies

_LEAVES = st.sampled_from([Var("p"), Var("q"), Var("r")])


def formulas(modal: bool = True, max_leaves: int = 12):
    unary = [Neg, Box, Diamond] if modal else [Neg]

    def extend(children):
        un = st.builds(lambda op, c: op(c), st.sampled_from(unary), children)
        bi = st.builds(lambda op, l, r: op(l, r),
                       st.sampled_from([And, Or, Arrow]), children, children)
        return un | bi

    return st.recursive(_LEAVES, extend, max_leaves=max_leaves)


# ---------------------------------------------------------------------------
# plain-RNG generators (for seeded, reproducible corpora)

def random_formula(rng: random.Random, depth: int = 2, modal: bool = True,
                   variables=("p", "q", "r")):
    if depth <= 0 or rng.random() < 0.3:
        return Var(rng.choice(variables))
    ops = ["neg", "and", "or", "arrow"] + (["box", "dia"] if modal else [])
    op = rng.choice(ops)
    if op == "neg":
        return Neg(random_formula(rng, depth - 1, modal, variables))
    if op == "box":
        return Box(random_formula(rng, depth - 1, modal, variables))
    if op == "dia":
        return Diamond(random_formula(rng, depth - 1, modal, variables))
    left = random_formula(rng, depth - 1, modal, variables)
    right = random_formula(rng, depth - 1, modal, variables)
    return {"and": And, "or": Or, "arrow": Arrow}[op](left, right)


def random_model(rng: random.Random, carrier: ClosureSet, max_worlds: int = 4,
                 edge_p: float = 0.4, pair_p: float = 0.3) -> RelatingModel:
    """An arbitrary (not necessarily admissible) model over the carrier."""
    k = rng.randint(1, max_worlds)
    worlds = [f"w{i}" for i in range(k)]
    access = [(a, b) for a in worlds for b in worlds if rng.random() < edge_p]
    variables = sorted({x for f in carrier for x in vars_of(f)})
    valuation = {w: frozenset(x for x in variables if rng.random() < 0.5)
                 for w in worlds}
    pairs = [(a, b) for a in carrier for b in carrier]
    relating = {w: frozenset(p for p in pairs if rng.random() < pair_p)
                for w in worlds}
    return RelatingModel(worlds, access, valuation, relating, carrier)


def random_admissible_model(carrier: ClosureSet, conds: ConditionSet,
                            rng: random.Random, max_worlds: int = 2,
                            extra_pairs: int = 6) -> RelatingModel:
    """Sample an admissible model: forced base plus random pairs that
    survive closure and checking, frame-closed access, k2 repaired."""
    base = close(forced_pairs(carrier, conds), carrier, conds)
    if check_all(base, carrier, conds):
        raise RuntimeError("condition set admits no relation over this carrier")
    members = carrier.members
    for _attempt in range(25):
        k = rng.randint(1, max_worlds)
        worlds = [f"w{i}" for i in range(k)]
        edges = {(a, b) for a in worlds for b in worlds if rng.random() < 0.5}
        if "k2" in conds.flags:
            # keep every world with a successor: successor-free worlds make
            # the k2 premise vacuous and force the whole boxed square
            edges |= {(w, w) for w in worlds
                      if not any(a == w for a, _ in edges)}
        access = frame_closure(edges, worlds, conds.frames)
        variables = sorted({x for f in carrier for x in vars_of(f)})
        valuation = {w: frozenset(x for x in variables if rng.random() < 0.5)
                     for w in worlds}

        relating = {}
        for w in worlds:
            batch = [(rng.choice(members), rng.choice(members))
                     for _ in range(extra_pairs)]
            rel = base
            while batch:
                candidate = close(set(rel) | set(batch), carrier, conds)
                if not check_all(candidate, carrier, conds):
                    rel = candidate
                    break
                batch = batch[:len(batch) // 2]
            relating[w] = rel

        model = RelatingModel(worlds, access, valuation, relating, carrier)
        if "k2" in conds.flags:
            model = _repair_k2(model, conds)
            if model is None:
                continue
        report = admissible(model, conds)
        if report.ok:
            return model
    raise RuntimeError("could not sample an admissible model")


def _repair_k2(model: RelatingModel, conds: ConditionSet):
    carrier = model.carrier
    arg_set = {f.child for f in carrier if isinstance(f, Box)}
    succ = successors_map(model)
    relating = {w: set(model.relating[w]) for w in model.worlds}
    changed = True
    while changed:
        changed = False
        for w in model.worlds:
            us = succ[w]
            if not us:
                continue
            common = set(relating[us[0]])
            for u in us[1:]:
                common &= relating[u]
            for (a, b) in common:
                if a in arg_set and b in arg_set:
                    conc = (Box(a), Box(b))
                    if conc not in relating[w]:
                        new = close(relating[w] | {conc}, carrier, conds)
                        relating[w] = set(new)
                        changed = True
    rel = {w: frozenset(v) for w, v in relating.items()}
    for w in model.worlds:
        if check_all(rel[w], carrier, conds):
            return None
    return model.replace(relating=rel)


# ---------------------------------------------------------------------------
# independent decision oracle

def brute_refute_one_world(formula, conds: ConditionSet, carrier=None):
    """Spec-literal one-world search: every relation subset over the
    carrier square, every valuation.  Returns a refuting admissible model
    or None.  Exponential; keep the carrier tiny."""
    carrier = carrier if carrier is not None else ClosureSet([formula])
    members = carrier.members
    pairs = [(a, b) for a in members for b in members]
    assert len(pairs) <= 16, "oracle carrier too large"
    variables = sorted(vars_of(formula))
    forced = forced_pairs(carrier, conds)
    access = [("w0", "w0")] if conds.frames else []
    for rbits in range(1 << len(pairs)):
        rel = frozenset(p for i, p in enumerate(pairs) if (rbits >> i) & 1)
        if not forced <= rel:
            continue
        if check_all(rel, carrier, conds):
            continue
        for vbits in range(1 << len(variables)):
            val = frozenset(x for i, x in enumerate(variables)
                            if (vbits >> i) & 1)
            model = RelatingModel(["w0"], access, {"w0": val}, {"w0": rel},
                                  carrier)
            if not evaluate(model, "w0", formula):
                return model
    return None
