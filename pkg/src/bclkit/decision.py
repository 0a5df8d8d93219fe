"""Bounded validity decisions by exhaustive model enumeration, exact
admissible-relation counting, filtration, and demodalization-completion.

The search enumerates models world-count by world-count: access relations
satisfying the required frame properties, valuations over the query's
variables, and per-world relations over the query's carrier.  Two
strategies produce the per-world relations:

* ``factored`` (default): relations are grouped by which arrow subformulas
  of the query they relate.  For each such pattern the least Horn-closed
  relation over the forced base decides realizability; negative conditions
  are stable under supersets, so a pattern admits some admissible relation
  exactly when its least closure is admissible, and the query's truth
  value only depends on the pattern.  Not available with r5 or k2, whose
  instances are not per-world Horn clauses.

* ``dense``: literal enumeration of every admissible relation bitmask over
  the forced-pair-completed base.  Exponential in free carrier pairs, but
  exact for every flag; it doubles as a cross-check oracle for the
  factored strategy.

A ``Valid`` verdict is only produced when the searched world count reaches
a completeness bound for the query: one world for modality-free queries,
``2**|vars|`` for queries whose modal subformulas wrap plain Booleans of
variables (a refuting world plus one representative successor per variable
pattern suffices), and ``2**|carrier|`` otherwise when the frame
requirements survive quotienting.  Condition sets with gcun entries only
ever yield ``BoundedValid``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .conditions import (
    CompiledRules, ConditionError, ConditionSet, admissible, check_all,
    close, close_mask, compile_rules, forced_pairs, frame_check,
)
from .kernels import as_guard_arrays, as_horn_arrays
from .semantics import (
    BoundedValid, Countermodel, RelatingModel, Valid, evaluate, truth_table,
)
from .syntax import (
    And, Arrow, Box, ClosureSet, Diamond, Formula, Neg, Or, Var,
    apply_negations, arrow_subformulas, demodalize, flat_modal,
    modality_free, strip_negations, vars_of,
)

__all__ = [
    "SearchConfig", "BudgetError", "decide", "count_admissible",
    "pad_carrier", "completeness_bound", "filtrate", "filtration_classes",
    "demodal_complete", "DEFAULT_BUDGET", "BUDGET_ENV",
]

DEFAULT_BUDGET = 1 << 22
BUDGET_ENV = "BCLKIT_BUDGET"


class BudgetError(RuntimeError):
    """Raised when a raw enumeration space exceeds the configured budget;
    shrink the query, the carrier, or raise BCLKIT_BUDGET."""


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the bounded decision search.

    ``max_worlds`` caps the searched world count (the completeness bound
    for the query may cut it further, never raise it).  ``variables``
    defaults to the variables of the query.  ``strategy`` is ``auto``,
    ``factored`` or ``dense``.
    """
    max_worlds: int = 2
    pad: bool = True
    variables: Optional[Sequence[str]] = None
    budget: Optional[int] = None
    strategy: str = "auto"
    deterministic: bool = True
    jobs: int = 1


def _resolve_budget(cfg: Optional[SearchConfig]) -> int:
    if cfg is not None and cfg.budget is not None:
        return int(cfg.budget)
    env = os.environ.get(BUDGET_ENV)
    if env:
        return int(env)
    return DEFAULT_BUDGET


# ---------------------------------------------------------------------------
# carrier padding for gcun condition sets

def pad_carrier(carrier: ClosureSet, gcun_entries) -> ClosureSet:
    """Extend the carrier with negation towers over each stripped core.

    Towers reach the largest exponent a gcun entry can mention, namely
    max(m, n, 2m-k, 2n-l); this keeps two-step negation-closure arguments
    inside the carrier.
    """
    depth = 0
    for (k, l, m, n) in gcun_entries:
        depth = max(depth, m, n, 2 * m - k, 2 * n - l)
    cores = {strip_negations(f).core for f in carrier}
    extra = [apply_negations(j, core)
             for core in cores for j in range(depth + 1)]
    return carrier.extended(extra)


# ---------------------------------------------------------------------------
# mask helpers

def _mask_passes(mask: int, guards) -> bool:
    for (p, w, _label) in guards:
        if (mask & p) == p and (mask & w) == 0:
            return False
    return True


def _sigma_closures(rules: CompiledRules, arrow_idx, budget: int):
    """Least admissible closures per arrow-pair pattern.

    Returns the list of relation masks (ascending pattern order) whose
    least Horn closure over the forced base passes every guard and whose
    arrow bits match the pattern exactly.
    """
    a = len(arrow_idx)
    if (1 << a) > budget:
        raise BudgetError(f"2^{a} arrow patterns exceed the budget")
    arrow_mask = 0
    for i in arrow_idx:
        arrow_mask |= 1 << i
    seeds = []
    for s in range(1 << a):
        seed = rules.base_mask
        for b, i in enumerate(arrow_idx):
            if (s >> b) & 1:
                seed |= 1 << i
        seeds.append(seed)

    if rules.n * rules.n <= 64:
        arr = np.array(seeds, dtype=np.uint64)
        closed = kernels.close_masks(arr, *as_horn_arrays(rules.horn))
        ok = kernels.check_masks(closed, *as_guard_arrays(rules.guards))
        closed = [int(x) for x in closed]
        ok = [bool(x) for x in ok]
    else:
        closed = [close_mask(seed, rules.horn) for seed in seeds]
        ok = [_mask_passes(m, rules.guards) for m in closed]

    out = []
    for s in range(1 << a):
        if not ok[s]:
            continue
        want = 0
        for b, i in enumerate(arrow_idx):
            if (s >> b) & 1:
                want |= 1 << i
        if closed[s] & arrow_mask == want:
            out.append(closed[s])
    return out


def _admissible_mask_list(rules: CompiledRules, budget: int):
    """Every admissible relation mask over the carrier, ascending."""
    n_pairs = rules.n * rules.n
    free = [i for i in range(n_pairs) if not (rules.base_mask >> i) & 1]
    if (1 << len(free)) > budget:
        raise BudgetError(
            f"2^{len(free)} relation candidates exceed the budget")
    if n_pairs <= 64:
        masks = kernels.passing_masks(
            len(free), np.array(free, dtype=np.int64),
            np.uint64(rules.base_mask), *as_guard_arrays(rules.guards))
        return [int(m) for m in masks]
    out = []
    for s in range(1 << len(free)):
        m = rules.base_mask
        for b, i in enumerate(free):
            if (s >> b) & 1:
                m |= 1 << i
        if _mask_passes(m, rules.guards):
            out.append(m)
    return out


# ---------------------------------------------------------------------------
# completeness bound

def completeness_bound(formula: Formula, conds: ConditionSet,
                       carrier: ClosureSet, rules: CompiledRules):
    """World count at which the search becomes exhaustive for this query,
    or None when no bound is known for the condition set."""
    if rules.k2:
        return None
    if modality_free(formula):
        return 1
    if flat_modal(formula):
        return 2 ** max(1, len(vars_of(formula)))
    if conds.frames <= {"reflexive", "serial", "symmetric"}:
        return 2 ** len(carrier)
    return None


# ---------------------------------------------------------------------------
# the search

def _access_candidates(worlds, frames, s_matters):
    if not s_matters:
        if frames:
            return [frozenset((w, w) for w in worlds)]
        return [frozenset()]
    edges = [(a, b) for a in worlds for b in worlds]
    out = []
    for bits in range(1 << len(edges)):
        acc = frozenset(e for i, e in enumerate(edges) if (bits >> i) & 1)
        if all(frame_check(acc, worlds, p) for p in sorted(frames)):
            out.append(acc)
    return out


def _valuations(worlds, variables):
    cells = [(w, x) for w in worlds for x in variables]
    out = []
    for bits in range(1 << len(cells)):
        val = {w: set() for w in worlds}
        for i, (w, x) in enumerate(cells):
            if (bits >> i) & 1:
                val[w].add(x)
        out.append({w: frozenset(v) for w, v in val.items()})
    return out


def _eval_worlds(formula, worlds, succ, val, rel_vec, rules):
    widx = {w: i for i, w in enumerate(worlds)}
    memo = {}

    def rec(w, f):
        key = (w, f)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(f, Var):
            out = f.name in val[w]
        elif isinstance(f, Neg):
            out = not rec(w, f.child)
        elif isinstance(f, And):
            out = rec(w, f.left) and rec(w, f.right)
        elif isinstance(f, Or):
            out = rec(w, f.left) or rec(w, f.right)
        elif isinstance(f, Arrow):
            out = ((not rec(w, f.left)) or rec(w, f.right)) and bool(
                (rel_vec[widx[w]] >> rules.pair_index(f.left, f.right)) & 1)
        elif isinstance(f, Box):
            out = all(rec(u, f.child) for u in succ[w])
        else:
            out = any(rec(u, f.child) for u in succ[w])
        memo[key] = out
        return out

    return [rec(w, formula) for w in worlds]


def _k2_consistent(rel_vec, worlds, succ, rules):
    widx = {w: i for i, w in enumerate(worlds)}
    for i, w in enumerate(worlds):
        for prem, conc in rules.k2:
            if (rel_vec[i] >> conc) & 1:
                continue
            if all((rel_vec[widx[u]] >> prem) & 1 for u in succ[w]):
                return False
    return True


def _scan_combo(args):
    (formula, worlds, access, val, rel_options, rules, need_k2) = args
    succ = {w: [u for u in worlds if (w, u) in access] for w in worlds}
    for rel_vec in product(rel_options, repeat=len(worlds)):
        if need_k2 and not _k2_consistent(rel_vec, worlds, succ, rules):
            continue
        truths = _eval_worlds(formula, worlds, succ, val, rel_vec, rules)
        for i, w in enumerate(worlds):
            if not truths[i]:
                return (access, val, rel_vec, w)
    return None


def decide(formula: Formula, conds: ConditionSet,
           cfg: Optional[SearchConfig] = None):
    """Exhaustively search for an admissible countermodel of the formula.

    Returns Countermodel (re-validated against the evaluator before being
    returned), Valid when the searched bound is exhaustive for the query,
    or BoundedValid otherwise.
    """
    cfg = cfg or SearchConfig()
    budget = _resolve_budget(cfg)

    carrier = ClosureSet([formula])
    if conds.gcun and cfg.pad:
        carrier = pad_carrier(carrier, conds.gcun)
    rules = compile_rules(carrier, conds)

    if not _mask_passes(rules.base_mask, rules.guards):
        # No admissible relation exists over this carrier at all, so the
        # class of admissible models is empty and everything is valid.
        return Valid(searched_worlds=0, bound=0)

    variables = tuple(cfg.variables) if cfg.variables else tuple(sorted(vars_of(formula)))
    arrows = arrow_subformulas(formula)
    arrow_idx = [rules.pair_index(a.left, a.right) for a in arrows]

    strategy = cfg.strategy
    if strategy == "auto":
        strategy = "dense" if ("r5" in conds.flags or rules.k2) else "factored"
    if strategy == "factored" and ("r5" in conds.flags or rules.k2):
        raise ConditionError(
            "r5/k2 instances are not per-world Horn clauses; use the dense strategy")
    if strategy == "dense":
        rel_options = _admissible_mask_list(rules, budget)
    else:
        rel_options = _sigma_closures(rules, arrow_idx, budget)

    bound = completeness_bound(formula, conds, carrier, rules)
    k_cap = max(1, min(cfg.max_worlds, bound) if bound is not None else cfg.max_worlds)

    s_matters = (not modality_free(formula)) or bool(rules.k2)
    need_k2 = bool(rules.k2)

    for k in range(1, k_cap + 1):
        worlds = tuple(f"w{i}" for i in range(k))
        access_list = _access_candidates(worlds, conds.frames, s_matters)
        val_list = _valuations(worlds, variables)
        combos = len(access_list) * len(val_list) * (len(rel_options) ** k)
        if combos > budget:
            raise BudgetError(
                f"{combos} model candidates at {k} worlds exceed the budget")
        tasks = [(formula, worlds, acc, val, rel_options, rules, need_k2)
                 for acc in access_list for val in val_list]
        if cfg.jobs > 1:
            with ThreadPoolExecutor(max_workers=cfg.jobs) as ex:
                results = list(ex.map(_scan_combo, tasks))
        else:
            results = map(_scan_combo, tasks)
        for hit in results:
            if hit is None:
                continue
            access, val, rel_vec, world = hit
            relating = {w: rules.pairs_of_mask(rel_vec[i])
                        for i, w in enumerate(worlds)}
            model = RelatingModel(worlds, access, val, relating, carrier)
            report = admissible(model, conds)
            if not report.ok or evaluate(model, world, formula):
                raise AssertionError(
                    "internal error: candidate countermodel failed re-validation")
            return Countermodel(model=model, world=world)

    if bound is not None and k_cap >= bound and not conds.gcun:
        return Valid(searched_worlds=k_cap, bound=bound)
    return BoundedValid(searched_worlds=k_cap, bound=bound)


# ---------------------------------------------------------------------------
# counting

def count_admissible(carrier: ClosureSet, conds: ConditionSet,
                     pad: bool = True, budget: Optional[int] = None) -> int:
    """Exact number of relations over the carrier passing every
    relation-level condition (single relation, no frame or k2 part).

    The forced-pair base and its Horn closure are computed first: when the
    closure already violates a negative condition, no admissible relation
    exists and the count is 0 without enumeration (supersets of a negative
    violation still violate it).
    """
    if budget is None:
        budget = _resolve_budget(None)
    if pad and conds.gcun:
        carrier = pad_carrier(carrier, conds.gcun)

    base_rel = close(forced_pairs(carrier, conds), carrier, conds)
    negative = ConditionSet(
        conds.flags & {"a1", "a2", "b0", "b0p"}, frames=())
    if check_all(base_rel, carrier, negative):
        return 0

    n = len(carrier)
    if n * n > 64:
        raise BudgetError(
            f"carrier of {n} formulas has {n * n} pairs; exact counting "
            "supports at most 64")
    rules = compile_rules(carrier, conds)
    free = [i for i in range(n * n) if not (rules.base_mask >> i) & 1]
    if (1 << len(free)) > budget:
        raise BudgetError(f"2^{len(free)} relation candidates exceed the budget")
    return kernels.count_passing(
        len(free), np.array(free, dtype=np.int64), np.uint64(rules.base_mask),
        *as_guard_arrays(rules.guards))


# ---------------------------------------------------------------------------
# filtration

def filtration_classes(model: RelatingModel, gamma: ClosureSet) -> dict:
    """Partition of the worlds by indistinguishability over gamma: equal
    truth of every gamma formula and equal relating restriction to gamma
    pairs.  Maps each world to its class representative (least member)."""
    tt = truth_table(model, gamma)
    sig = {}
    for w in model.worlds:
        truths = tuple(tt[(w, f)] for f in gamma)
        rel = frozenset(p for p in model.relating[w]
                        if p[0] in gamma and p[1] in gamma)
        sig[w] = (truths, rel)
    groups: dict = {}
    for w in model.worlds:  # worlds are sorted; first member is least
        groups.setdefault(sig[w], []).append(w)
    out = {}
    for members in groups.values():
        rep = members[0]
        for w in members:
            out[w] = rep
    return out


def filtrate(model: RelatingModel, gamma) -> RelatingModel:
    """Quotient of the model by indistinguishability over gamma.

    Worlds become class representatives, access is the existential image,
    each class keeps its representative's relating pairs restricted to
    gamma, and the valuation is inherited for the variables in gamma
    (variables outside gamma are not class-invariant and are dropped).
    Truth of every gamma formula is preserved world-by-world.
    """
    if not isinstance(gamma, ClosureSet):
        gamma = ClosureSet(gamma)
    cls = filtration_classes(model, gamma)
    reps = sorted(set(cls.values()))
    gamma_vars = {f.name for f in gamma if isinstance(f, Var)}
    access = {(cls[a], cls[b]) for (a, b) in model.access}
    valuation = {rep: model.valuation[rep] & frozenset(gamma_vars)
                 for rep in reps}
    relating = {rep: frozenset(p for p in model.relating[rep]
                               if p[0] in gamma and p[1] in gamma)
                for rep in reps}
    return RelatingModel(reps, access, valuation, relating, gamma)


# ---------------------------------------------------------------------------
# demodalization completion

def demodal_complete(model: RelatingModel) -> RelatingModel:
    """Augment each world's relation with every pair whose demodalized
    images are related there.

    The carrier is extended with the demodalized images first, so the
    result satisfies the left-demodalization closure over the extended
    carrier.  Idempotent, and pairs over the original carrier are never
    added when the model already satisfies the relativized closure.
    """
    gamma = model.carrier
    extended = gamma.extended([demodalize(f) for f in gamma])
    relating = {}
    for w in model.worlds:
        rel = set(model.relating[w])
        for a in extended:
            da = demodalize(a)
            for b in extended:
                if (da, demodalize(b)) in model.relating[w]:
                    rel.add((a, b))
        relating[w] = frozenset(rel)
    return model.replace(relating=relating, carrier=extended)
