"""Hilbert-style proof verification.

Axiom schemata with metavariables, deterministic schema matching, the
Boolean-tautology instance check, and the step-by-step proof verifier.
Schemata are stored desugared, and step formulas may use the material
sugar; both sides meet on primitive connectives.

Metavariables are uppercase identifiers (never parseable as object
variables).  The demodalized-image marker ``Dem`` may wrap a metavariable
inside a template; it is checked after the plain occurrences have bound
the metavariable, so matching stays deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .decision import BudgetError
from .syntax import (
    And, Arrow, Box, Diamond, Formula, Neg, Or, Var,
    apply_negations, demodalize, parse, to_text, vars_of,
)

__all__ = [
    "Dem", "AxiomSchema", "match_schema", "brute_force_match",
    "boolean_skeleton", "is_cpl_instance",
    "AxiomStep", "CplStep", "DsStep", "NecStep",
    "Calculus", "Proof", "VerifyResult", "verify", "calculus",
    "ProofError", "proof_from_json", "proof_to_json",
    "CORE_SCHEMAS", "CUN_SCHEMAS", "MODAL_CORE_SCHEMAS", "MODAL_LAW_SCHEMAS",
    "CUDR", "CUDL", "gcun_schemas",
]


class ProofError(ValueError):
    pass


class Dem(Formula):
    """Template-only node: the demodalized image of a metavariable."""

    __slots__ = ("child",)

    def __init__(self, child: Var):
        self.child = child
        self.size = child.size + 1
        self._text = f"d({to_text(child)})"
        self._hash = hash(("dem", child._hash))

    def _parts(self):
        return self.child


@dataclass(frozen=True)
class AxiomSchema:
    name: str
    template: Formula


def _is_meta(f: Formula) -> bool:
    return isinstance(f, Var) and f.name[:1].isupper()


def match_schema(formula: Formula, schema: AxiomSchema) -> Optional[dict]:
    """Metavariable bindings instantiating the template to exactly the
    formula, or None.  Leftmost-outermost and deterministic; demodalized
    occurrences are verified against the bindings collected from the plain
    ones."""
    bindings: dict = {}
    demod_checks = []

    def walk(t: Formula, g: Formula) -> bool:
        if isinstance(t, Dem):
            demod_checks.append((t.child.name, g))
            return True
        if isinstance(t, Var):
            if _is_meta(t):
                bound = bindings.get(t.name)
                if bound is None:
                    bindings[t.name] = g
                    return True
                return bound == g
            return isinstance(g, Var) and g.name == t.name
        if t.__class__ is not g.__class__:
            return False
        if isinstance(t, (Neg, Box, Diamond)):
            return walk(t.child, g.child)
        return walk(t.left, g.left) and walk(t.right, g.right)

    if not walk(schema.template, formula):
        return None
    for name, target in demod_checks:
        bound = bindings.get(name)
        if bound is None or demodalize(bound) != target:
            return None
    return dict(bindings)


def brute_force_match(formula: Formula, schema: AxiomSchema) -> Optional[dict]:
    """Matching oracle: try every assignment of subformulas of the goal to
    the template metavariables and test by instantiation.  Exponential;
    for cross-checking the recursive matcher on small formulas."""
    from itertools import product as iproduct

    metas = sorted({g.name for g in _template_nodes(schema.template)
                    if isinstance(g, Var) and _is_meta(g)})
    candidates = sorted({g for g in _formula_nodes(formula)}, key=lambda f: (f.size, to_text(f)))
    for combo in iproduct(candidates, repeat=len(metas)):
        binding = dict(zip(metas, combo))
        if _instantiate(schema.template, binding) == formula:
            return binding
    return None


def _template_nodes(t: Formula):
    yield t
    if isinstance(t, Dem):
        yield t.child
    elif isinstance(t, (Neg, Box, Diamond)):
        yield from _template_nodes(t.child)
    elif isinstance(t, (And, Or, Arrow)):
        yield from _template_nodes(t.left)
        yield from _template_nodes(t.right)


def _formula_nodes(f: Formula):
    yield f
    if isinstance(f, (Neg, Box, Diamond)):
        yield from _formula_nodes(f.child)
    elif isinstance(f, (And, Or, Arrow)):
        yield from _formula_nodes(f.left)
        yield from _formula_nodes(f.right)


def _instantiate(t: Formula, binding: dict) -> Formula:
    if isinstance(t, Dem):
        return demodalize(binding[t.child.name])
    if isinstance(t, Var):
        return binding[t.name] if _is_meta(t) else t
    if isinstance(t, (Neg, Box, Diamond)):
        return type(t)(_instantiate(t.child, binding))
    return type(t)(_instantiate(t.left, binding), _instantiate(t.right, binding))


def instantiate_schema(schema: AxiomSchema, binding: dict) -> Formula:
    """Template instance under a metavariable binding (demodalized markers
    are applied to the bound formulas)."""
    return _instantiate(schema.template, binding)


# ---------------------------------------------------------------------------
# Boolean-tautology instances

def boolean_skeleton(f: Formula):
    """Abstract each maximal arrow- or modal-headed subformula into a fresh
    shared atom.  Returns the skeleton and the subformula-to-atom table."""
    table: dict = {}

    def rec(g: Formula) -> Formula:
        if isinstance(g, Var):
            return g
        if isinstance(g, Neg):
            return Neg(rec(g.child))
        if isinstance(g, (And, Or)):
            return type(g)(rec(g.left), rec(g.right))
        atom = table.get(g)
        if atom is None:
            atom = Var(f"_{len(table)}")  # underscore head: not object syntax
            table[g] = atom
        return atom

    return rec(f), dict(table)


def is_cpl_instance(f: Formula, max_atoms: int = 20) -> bool:
    """True when f is a substitution instance of a Boolean tautology:
    the skeleton with shared fresh atoms is checked by truth table."""
    skeleton, _ = boolean_skeleton(f)
    atoms = sorted(vars_of(skeleton))
    if len(atoms) > max_atoms:
        raise BudgetError(
            f"tautology skeleton has {len(atoms)} atoms (limit {max_atoms})")
    rows = 1 << len(atoms)
    full = (1 << rows) - 1
    cols = {a: (full // ((1 << (1 << i)) + 1)) << (1 << i)
            for i, a in enumerate(atoms)}

    def rec(g: Formula) -> int:
        if isinstance(g, Var):
            return cols[g.name]
        if isinstance(g, Neg):
            return full ^ rec(g.child)
        if isinstance(g, And):
            return rec(g.left) & rec(g.right)
        return rec(g.left) | rec(g.right)

    return rec(skeleton) == full


# ---------------------------------------------------------------------------
# schema library

_A = Var("A")
_B = Var("B")


def _material(x: Formula, y: Formula) -> Formula:
    return Or(Neg(x), y)


def _equivalent(x: Formula, y: Formula) -> Formula:
    return And(_material(x, y), _material(y, x))


CORE_SCHEMAS = (
    AxiomSchema("A1", Neg(Arrow(_A, Neg(_A)))),
    AxiomSchema("A2", Neg(Arrow(Neg(_A), _A))),
    AxiomSchema("B1", Arrow(Arrow(_A, _B), Neg(Arrow(_A, Neg(_B))))),
    AxiomSchema("B2", Arrow(Arrow(_A, Neg(_B)), Neg(Arrow(_A, _B)))),
    AxiomSchema("Imp", _material(Arrow(_A, _B), _material(_A, _B))),
)

CUN_SCHEMAS = (
    AxiomSchema("CUN1", _material(
        Arrow(_A, _B), Or(Arrow(Neg(_A), Neg(_B)), And(Neg(_A), _B)))),
    AxiomSchema("CUN2", _material(
        Arrow(_A, _B), Arrow(Neg(Neg(_A)), Neg(Neg(_B))))),
)

MODAL_CORE_SCHEMAS = (
    AxiomSchema("Dual", _equivalent(Diamond(_A), Neg(Box(Neg(_A))))),
    AxiomSchema("Ksup", _material(
        Box(_material(_A, _B)), _material(Box(_A), Box(_B)))),
)

MODAL_LAW_SCHEMAS = {
    "D1": AxiomSchema("D1", Arrow(Diamond(_A), Neg(Box(Neg(_A))))),
    "D2": AxiomSchema("D2", Arrow(Neg(Box(Neg(_A))), Diamond(_A))),
    "K": AxiomSchema("K", Arrow(Box(Arrow(_A, _B)), Arrow(Box(_A), Box(_B)))),
    "T": AxiomSchema("T", Arrow(Box(_A), _A)),
    "D": AxiomSchema("D", Arrow(Box(_A), Diamond(_A))),
    "B": AxiomSchema("B", Arrow(_A, Box(Diamond(_A)))),
    "4": AxiomSchema("4", Arrow(Box(_A), Box(Box(_A)))),
    "5": AxiomSchema("5", Arrow(Diamond(_A), Box(Diamond(_A)))),
}

CUDR = AxiomSchema("CUDR", _material(
    Arrow(_A, _B), Or(Arrow(Dem(_A), Dem(_B)), And(Dem(_A), Neg(Dem(_B))))))
CUDL = AxiomSchema("CUDL", _material(
    Arrow(Dem(_A), Dem(_B)), Or(Arrow(_A, _B), And(_A, Neg(_B)))))


def gcun_schemas(k: int, l: int, m: int, n: int):
    """The two closure-under-iterated-negation schemata for one exponent
    quadruple.  Requires k <= m, l <= n with k and l even (an odd prefix
    would flip the truth value carried across the double application)."""
    if min(k, l, m, n) < 0 or k > m or l > n:
        raise ProofError("gcun calculus needs naturals with k <= m and l <= n")
    if k % 2 or l % 2:
        raise ProofError("gcun calculus needs k and l even")
    gcun = AxiomSchema("GCUN", _material(
        Arrow(apply_negations(k, _A), apply_negations(l, _B)),
        Or(Arrow(apply_negations(m, _A), apply_negations(n, _B)),
           And(apply_negations(m, _A), apply_negations(n + 1, _B)))))
    gcun2 = AxiomSchema("GCUN2", _material(
        Arrow(apply_negations(k, _A), apply_negations(l, _B)),
        Arrow(apply_negations(2 * m - k, _A), apply_negations(2 * n - l, _B))))
    return (gcun, gcun2)


# ---------------------------------------------------------------------------
# calculi and proofs

@dataclass(frozen=True)
class Calculus:
    """A named Hilbert system: axiom schemata plus CPL instances and the
    disjunctive syllogism; modal calculi additionally admit necessitation."""
    name: str
    schemas: tuple
    modal: bool = False

    def schema(self, name: str) -> Optional[AxiomSchema]:
        for s in self.schemas:
            if s.name == name:
                return s
        return None

    def schema_names(self):
        return tuple(s.name for s in self.schemas)


@dataclass(frozen=True)
class AxiomStep:
    name: str


@dataclass(frozen=True)
class CplStep:
    pass


@dataclass(frozen=True)
class DsStep:
    i: int
    j: int


@dataclass(frozen=True)
class NecStep:
    i: int


@dataclass(frozen=True)
class Proof:
    calculus: Calculus
    steps: tuple  # of (Formula, justification)


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    step: Optional[int] = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def verify(proof: Proof) -> VerifyResult:
    """Check every step: an axiom-schema instance of the calculus, a CPL
    instance, or obtained by DS/Nec from strictly earlier steps.  Rejection
    pinpoints the first failing step (1-based)."""
    cal = proof.calculus
    done = []

    def reject(num, reason):
        return VerifyResult(False, num, reason)

    for num, (formula, just) in enumerate(proof.steps, start=1):
        if isinstance(just, AxiomStep):
            schema = cal.schema(just.name)
            if schema is None:
                return reject(num, f"calculus {cal.name} has no schema {just.name!r}")
            if match_schema(formula, schema) is None:
                return reject(num, f"no {just.name} bindings for this formula")
        elif isinstance(just, CplStep):
            if not is_cpl_instance(formula):
                return reject(num, "not a substitution instance of a Boolean tautology")
        elif isinstance(just, DsStep):
            if not (1 <= just.i < num and 1 <= just.j < num):
                return reject(num, "ds premises must reference earlier steps")
            minor = done[just.i - 1]
            major = done[just.j - 1]
            if major != Or(Neg(minor), formula):
                return reject(
                    num, f"step {just.j} is not (step {just.i} => this formula)")
        elif isinstance(just, NecStep):
            if not cal.modal:
                return reject(num, f"necessitation is not a rule of {cal.name}")
            if not 1 <= just.i < num:
                return reject(num, "nec premise must reference an earlier step")
            if formula != Box(done[just.i - 1]):
                return reject(num, f"this formula is not box of step {just.i}")
        else:
            return reject(num, f"unknown justification {just!r}")
        done.append(formula)
    return VerifyResult(True)


def calculus(name: str) -> Calculus:
    """Calculus of a registered logic name (see the registry module)."""
    from .registry import logic
    return logic(name).calculus


# ---------------------------------------------------------------------------
# JSON proof documents

def _rule_from_json(rule) -> object:
    if isinstance(rule, str):
        if rule.strip().upper() == "CPL":
            return CplStep()
        return AxiomStep(rule.strip())
    if isinstance(rule, dict):
        if "ds" in rule:
            i, j = rule["ds"]
            return DsStep(int(i), int(j))
        if "nec" in rule:
            return NecStep(int(rule["nec"]))
    raise ProofError(f"unrecognized rule {rule!r}")


def proof_from_json(doc: dict) -> Proof:
    """Parse a proof document: 1-based step indices, formulas in grammar
    text (sugar allowed), rules as a schema name, "CPL", {"ds":[i,j]} or
    {"nec":i}."""
    from .registry import logic
    if not isinstance(doc, dict) or "calculus" not in doc or "steps" not in doc:
        raise ProofError("proof document needs 'calculus' and 'steps'")
    cal = logic(str(doc["calculus"])).calculus
    steps = []
    for k, step in enumerate(doc["steps"], start=1):
        try:
            formula = parse(str(step["formula"]))
        except KeyError:
            raise ProofError(f"step {k} lacks a formula") from None
        if "rule" not in step:
            raise ProofError(f"step {k} lacks a rule")
        steps.append((formula, _rule_from_json(step["rule"])))
    return Proof(cal, tuple(steps))


def proof_to_json(proof: Proof) -> dict:
    steps = []
    for formula, just in proof.steps:
        if isinstance(just, AxiomStep):
            rule = just.name
        elif isinstance(just, CplStep):
            rule = "CPL"
        elif isinstance(just, DsStep):
            rule = {"ds": [just.i, just.j]}
        else:
            rule = {"nec": just.i}
        steps.append({"formula": to_text(formula), "rule": rule})
    return {"calculus": proof.calculus.name, "steps": steps}
