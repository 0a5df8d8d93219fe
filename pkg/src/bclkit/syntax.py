"""Formula language of the toolkit.

AST with seven primitive node types, an ASCII grammar with parse-time
sugar for material implication and equivalence, a minimal-parenthesization
printer, subformula closure sets, negation-prefix arithmetic, and the
modality-erasing map ``demodalize``.

Grammar, loosest to tightest:

    iff    :=  imp ("<=>" iff)?          sugar: a <=> b  ==  (~a | b) & (~b | a)
    imp    :=  arrow ("=>" imp)?         sugar: a => b   ==  ~a | b
    arrow  :=  or ("->" arrow)?          right-associative, primitive
    or     :=  and ("|" and)*
    and    :=  unary ("&" unary)*
    unary  :=  ("~" | "[]" | "<>") unary | atom
    atom   :=  name | "(" iff ")"        name: [a-z][a-z0-9_]*

Parsed trees never contain a node for ``=>`` or ``<=>``.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, NamedTuple

__all__ = [
    "Formula", "Var", "Neg", "And", "Or", "Arrow", "Box", "Diamond",
    "ParseError", "parse", "to_text",
    "subformulas", "vars_of", "modality_free", "boolean_over_vars",
    "arrow_subformulas", "modal_subformulas", "flat_modal",
    "ClosureSet", "subformula_closure", "order_key",
    "NegPrefix", "strip_negations", "apply_negations", "peel_negations",
    "demodalize",
]


class Formula:
    """A formula of the modal connexive language.

    Instances are immutable and compare structurally; structural equality
    is the identity used for set and relation membership everywhere in the
    package.  The hash is computed once at construction time.
    """

    __slots__ = ("_hash", "_text", "size")

    def _parts(self):
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if self.__class__ is not other.__class__ or self._hash != other._hash:
            return False
        return self._parts() == other._parts()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return to_text(self)


class Var(Formula):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self.size = 1
        self._text = name
        self._hash = hash(("var", name))

    def _parts(self):
        return self.name


class _Unary(Formula):
    __slots__ = ("child",)
    op = ""

    def __init__(self, child: Formula):
        self.child = child
        self.size = child.size + 1
        self._text = None
        self._hash = hash((self.op, child._hash))

    def _parts(self):
        return self.child


class Neg(_Unary):
    __slots__ = ()
    op = "~"


class Box(_Unary):
    __slots__ = ()
    op = "[]"


class Diamond(_Unary):
    __slots__ = ()
    op = "<>"


class _Binary(Formula):
    __slots__ = ("left", "right")
    op = ""

    def __init__(self, left: Formula, right: Formula):
        self.left = left
        self.right = right
        self.size = left.size + right.size + 1
        self._text = None
        self._hash = hash((self.op, left._hash, right._hash))

    def _parts(self):
        return (self.left, self.right)


class And(_Binary):
    __slots__ = ()
    op = "&"


class Or(_Binary):
    __slots__ = ()
    op = "|"


class Arrow(_Binary):
    __slots__ = ()
    op = "->"


# ---------------------------------------------------------------------------
# printing

_PREC = {"->": 1, "|": 2, "&": 3}


def to_text(f: Formula) -> str:
    """Minimal-parenthesization rendering; ``parse(to_text(f)) == f``."""
    if f._text is None:
        f._text = _render(f)
    return f._text


def _render(f: Formula) -> str:
    if isinstance(f, _Unary):
        inner = to_text(f.child)
        if isinstance(f.child, _Binary):
            inner = "(" + inner + ")"
        return f.op + inner
    prec = _PREC[f.op]
    left = to_text(f.left)
    right = to_text(f.right)
    if isinstance(f.left, _Binary):
        lp = _PREC[f.left.op]
        # "->" is right-associative, "&"/"|" associate to the left
        if lp < prec or (lp == prec and f.op == "->"):
            left = "(" + left + ")"
    if isinstance(f.right, _Binary):
        rp = _PREC[f.right.op]
        if rp < prec or (rp == prec and f.op != "->"):
            right = "(" + right + ")"
    return f"{left} {f.op} {right}"


# ---------------------------------------------------------------------------
# parsing

class ParseError(ValueError):
    """Malformed formula text; carries the byte offset and expected tokens."""

    def __init__(self, message: str, offset: int, expected: tuple = ()):
        detail = f"{message} at byte {offset}"
        if expected:
            detail += " (expected: " + ", ".join(expected) + ")"
        super().__init__(detail)
        self.offset = offset
        self.expected = tuple(expected)


_NAME_RE = re.compile(r"[a-z][a-z0-9_]*")
_PUNCT = ("<=>", "=>", "->", "[]", "<>", "~", "&", "|", "(", ")")


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _tokenize(text: str):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        for punct in _PUNCT:
            if text.startswith(punct, i):
                toks.append((punct, None, i))
                i += len(punct)
                break
        else:
            m = _NAME_RE.match(text, i)
            if m is None:
                raise ParseError(
                    f"unexpected character {c!r}", _byte_offset(text, i),
                    ("identifier", "(", "~", "[]", "<>"))
            toks.append(("name", m.group(), i))
            i = m.end()
    toks.append(("end", None, n))
    return toks


_ATOM_EXPECTED = ("identifier", "(", "~", "[]", "<>")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self) -> str:
        return self.toks[self.pos][0]

    def take(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def error(self, message, expected=()):
        offset = _byte_offset(self.text, self.toks[self.pos][2])
        raise ParseError(message, offset, expected)

    def expect(self, kind: str):
        if self.peek() != kind:
            self.error(f"unexpected token {self.peek()!r}", (kind,))
        return self.take()

    def parse_iff(self) -> Formula:
        left = self.parse_imp()
        if self.peek() == "<=>":
            self.take()
            right = self.parse_iff()
            return And(Or(Neg(left), right), Or(Neg(right), left))
        return left

    def parse_imp(self) -> Formula:
        left = self.parse_arrow()
        if self.peek() == "=>":
            self.take()
            right = self.parse_imp()
            return Or(Neg(left), right)
        return left

    def parse_arrow(self) -> Formula:
        left = self.parse_or()
        if self.peek() == "->":
            self.take()
            return Arrow(left, self.parse_arrow())
        return left

    def parse_or(self) -> Formula:
        left = self.parse_and()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> Formula:
        left = self.parse_unary()
        while self.peek() == "&":
            self.take()
            left = And(left, self.parse_unary())
        return left

    def parse_unary(self) -> Formula:
        kind = self.peek()
        if kind == "~":
            self.take()
            return Neg(self.parse_unary())
        if kind == "[]":
            self.take()
            return Box(self.parse_unary())
        if kind == "<>":
            self.take()
            return Diamond(self.parse_unary())
        return self.parse_atom()

    def parse_atom(self) -> Formula:
        kind = self.peek()
        if kind == "name":
            return Var(self.take()[1])
        if kind == "(":
            self.take()
            inner = self.parse_iff()
            self.expect(")")
            return inner
        self.error(f"unexpected token {kind!r}", _ATOM_EXPECTED)


def parse(text: str) -> Formula:
    """Parse grammar text into a Formula; sugar is expanded away."""
    p = _Parser(text)
    f = p.parse_iff()
    if p.peek() != "end":
        p.error(f"trailing input {p.peek()!r}", ("end of input",))
    return f


# ---------------------------------------------------------------------------
# structure walkers

def subformulas(f: Formula) -> Iterator[Formula]:
    """All subformulas of f, including f itself (each node once per shape)."""
    seen = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        yield g
        if isinstance(g, _Unary):
            stack.append(g.child)
        elif isinstance(g, _Binary):
            stack.append(g.left)
            stack.append(g.right)


def vars_of(f: Formula) -> frozenset:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Var))


def modality_free(f: Formula) -> bool:
    return not any(isinstance(g, (Box, Diamond)) for g in subformulas(f))


def boolean_over_vars(f: Formula) -> bool:
    """True when f uses only variables, ~, & and | (no arrows, no modals)."""
    return not any(isinstance(g, (Box, Diamond, Arrow)) for g in subformulas(f))


def arrow_subformulas(f: Formula):
    """Arrow subformulas of f in deterministic order."""
    arrows = {g for g in subformulas(f) if isinstance(g, Arrow)}
    return tuple(sorted(arrows, key=order_key))


def modal_subformulas(f: Formula):
    return tuple(sorted((g for g in subformulas(f)
                         if isinstance(g, (Box, Diamond))), key=order_key))


def flat_modal(f: Formula) -> bool:
    """True when every modal subformula wraps a plain Boolean of variables.

    Queries of this shape admit a small completeness bound for model
    search: a refuting world plus one representative successor per
    variable pattern suffices.
    """
    mods = modal_subformulas(f)
    return bool(mods) and all(boolean_over_vars(m.child) for m in mods)


# ---------------------------------------------------------------------------
# closure sets

def order_key(f: Formula):
    return (f.size, to_text(f))


class ClosureSet:
    """Finite, subformula-closed formula set with a fixed deterministic order.

    Members are sorted by node count, ties broken by printed form, so
    enumerations over the set (and anything serialized from them) are
    reproducible.
    """

    __slots__ = ("members", "index")

    def __init__(self, roots: Iterable[Formula]):
        seen = {}
        for root in roots:
            for g in subformulas(root):
                seen[g] = None
        members = sorted(seen, key=order_key)
        self.members = tuple(members)
        self.index = {g: i for i, g in enumerate(members)}

    def __contains__(self, f) -> bool:
        return f in self.index

    def __iter__(self) -> Iterator[Formula]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __getitem__(self, i: int) -> Formula:
        return self.members[i]

    def __eq__(self, other):
        return isinstance(other, ClosureSet) and self.members == other.members

    def __hash__(self):
        return hash(self.members)

    def __repr__(self):
        return "ClosureSet({" + ", ".join(to_text(g) for g in self.members) + "})"

    def position(self, f: Formula) -> int:
        return self.index[f]

    def extended(self, extra: Iterable[Formula]) -> "ClosureSet":
        """Least closure containing this set and the extra roots."""
        return ClosureSet(list(self.members) + list(extra))


def subformula_closure(roots: Iterable[Formula]) -> ClosureSet:
    """Least subformula-closed superset of the given formulas."""
    return ClosureSet(roots)


# ---------------------------------------------------------------------------
# negation prefixes

class NegPrefix(NamedTuple):
    depth: int
    core: Formula


def strip_negations(f: Formula) -> NegPrefix:
    """Split f into its maximal leading-negation count and the bare core."""
    depth = 0
    while isinstance(f, Neg):
        depth += 1
        f = f.child
    return NegPrefix(depth, f)


def apply_negations(k: int, core: Formula) -> Formula:
    if k < 0:
        raise ValueError("negation count must be non-negative")
    for _ in range(k):
        core = Neg(core)
    return core


def peel_negations(f: Formula, k: int):
    """Remove exactly k outer negations, or None if f has fewer."""
    for _ in range(k):
        if not isinstance(f, Neg):
            return None
        f = f.child
    return f


# ---------------------------------------------------------------------------
# demodalization

_demod_cache: dict = {}


def demodalize(f: Formula) -> Formula:
    """Erase every modal operator from f.

    Variables are fixed, the map is homomorphic over ~, &, | and ->, and
    box/diamond nodes are erased recursively, so the result never contains
    a modal operator and the map is idempotent.
    """
    hit = _demod_cache.get(f)
    if hit is not None:
        return hit
    if isinstance(f, Var):
        out = f
    elif isinstance(f, (Box, Diamond)):
        out = demodalize(f.child)
    elif isinstance(f, Neg):
        child = demodalize(f.child)
        out = f if child is f.child else Neg(child)
    elif isinstance(f, _Binary):
        left = demodalize(f.left)
        right = demodalize(f.right)
        out = f if (left is f.left and right is f.right) else type(f)(left, right)
    else:
        raise TypeError(f"not a formula node: {f!r}")
    _demod_cache[f] = out
    return out
