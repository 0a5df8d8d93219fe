"""Conditions on relating relations and modal frames.

Checking, violation reporting, forced-pair generation, Horn closure, frame
properties, and whole-model admissibility.

Everything is relativized to a finite carrier: a condition instance is
enforced exactly when every formula it mentions lies in the carrier.
Forced pairs whose formulas fall outside the carrier are silently not
required.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .semantics import RelatingModel, successors_map
from .syntax import (
    And, Arrow, Box, ClosureSet, Diamond, Formula, Neg, Or, Var,
    apply_negations, demodalize, peel_negations, order_key, to_text,
)

__all__ = [
    "ConditionError", "ConditionSet", "parse_conditions",
    "ViolationReport", "AdmissibilityReport",
    "forced_pairs", "check", "check_all", "close",
    "frame_check", "frame_closure", "admissible",
    "CompiledRules", "compile_rules", "close_mask",
    "FRAME_PROPERTIES", "RELATION_FLAGS",
]


FRAME_PROPERTIES = ("reflexive", "serial", "symmetric", "transitive", "euclidean")

# Conditions on a single relating relation.  The *_d flags are the
# demodalized variants of the modal-law conditions: they force the
# demodalized image of the corresponding pair instead of the pair itself.
RELATION_FLAGS = frozenset({
    "a1", "a2", "b0", "b1", "b2", "b0p", "b1p", "b2p",
    "cun",
    "r1", "r2", "r3", "r4", "r5",
    "demr", "deml", "deme",
    "d1", "d2", "k1", "k2", "t", "d", "b", "iv", "v",
    "d1_d", "d2_d", "k1_d", "t_d", "d_d", "b_d", "iv_d", "v_d",
})

_FLAG_FRAME = {
    "t": "reflexive", "d": "serial", "b": "symmetric",
    "iv": "transitive", "v": "euclidean",
    "t_d": "reflexive", "d_d": "serial", "b_d": "symmetric",
    "iv_d": "transitive", "v_d": "euclidean",
}

_ALIASES = {"b0'": "b0p", "b1'": "b1p", "b2'": "b2p", "4": "iv", "5": "v"}


class ConditionError(ValueError):
    pass


def _canon_flag(name: str) -> str:
    flag = _ALIASES.get(name, name.lower())
    flag = _ALIASES.get(flag, flag)
    if flag in RELATION_FLAGS or flag in FRAME_PROPERTIES:
        return flag
    raise ConditionError(f"unknown condition flag {name!r}")


def _canon_gcun(entry) -> tuple:
    try:
        k, l, m, n = (int(x) for x in entry)
    except (TypeError, ValueError):
        raise ConditionError(f"gcun entry {entry!r} must be four naturals") from None
    if min(k, l, m, n) < 0:
        raise ConditionError("gcun exponents must be non-negative")
    if k > m or l > n:
        raise ConditionError(f"gcun entry {entry!r} needs k <= m and l <= n")
    return (k, l, m, n)


class ConditionSet:
    """Named condition flags, closure-under-negation entries, and the frame
    properties they require.

    ``frames=None`` derives the frame requirements from the flags (t brings
    reflexivity, d seriality, and so on); pass an explicit iterable (possibly
    empty) to override the derivation.
    """

    __slots__ = ("flags", "gcun", "frames")

    def __init__(self, flags: Iterable[str] = (), gcun=(), frames=None):
        plain = set()
        frame_extras = set()
        for name in flags:
            flag = _canon_flag(str(name))
            if flag in FRAME_PROPERTIES:
                frame_extras.add(flag)
            else:
                plain.add(flag)
        self.flags = frozenset(plain)
        self.gcun = tuple(sorted(_canon_gcun(e) for e in gcun))
        if frames is None:
            derived = {_FLAG_FRAME[f] for f in self.flags if f in _FLAG_FRAME}
            self.frames = frozenset(derived | frame_extras)
        else:
            self.frames = frozenset(_canon_flag(str(p)) for p in frames)
            if not self.frames <= set(FRAME_PROPERTIES):
                raise ConditionError("frames must be frame property names")

    def has(self, flag: str) -> bool:
        return flag in self.flags

    def __eq__(self, other):
        return (isinstance(other, ConditionSet)
                and self.flags == other.flags
                and self.gcun == other.gcun
                and self.frames == other.frames)

    def __hash__(self):
        return hash((self.flags, self.gcun, self.frames))

    def to_text(self) -> str:
        parts = sorted(self.flags)
        parts += [f"gcun:{k},{l},{m},{n}" for (k, l, m, n) in self.gcun]
        derived = {_FLAG_FRAME[f] for f in self.flags if f in _FLAG_FRAME}
        parts += sorted(self.frames - derived)
        return ",".join(parts)

    def __repr__(self):
        return f"ConditionSet({self.to_text()!r})"


def parse_conditions(text: str) -> ConditionSet:
    """Parse a comma-separated flag list, e.g. ``a1,b0,gcun:0,1,0,2,t``.

    A ``gcun:`` token consumes the following three numbers as the rest of
    its exponent quadruple.
    """
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    flags, gcun = [], []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.lower().startswith("gcun:"):
            rest = tokens[i + 1:i + 4]
            if len(rest) != 3:
                raise ConditionError(f"gcun entry near {tok!r} needs four numbers")
            gcun.append((tok[5:], *rest))
            i += 4
        else:
            flags.append(tok)
            i += 1
    return ConditionSet(flags, gcun)


# ---------------------------------------------------------------------------
# violation reports

@dataclass(frozen=True)
class ViolationReport:
    """A single re-checkable condition failure.

    ``pair`` is the membership-query target (a formula pair, or a world
    pair for frame properties) and ``requires`` says whether the condition
    demands its presence or absence.
    """
    condition: str
    pair: tuple
    requires: str            # "present" | "absent"
    world: Optional[str] = None
    reason: str = ""

    def render(self) -> str:
        a, b = self.pair
        a = to_text(a) if isinstance(a, Formula) else str(a)
        b = to_text(b) if isinstance(b, Formula) else str(b)
        where = f" at {self.world}" if self.world else ""
        return f"{self.condition}{where}: ({a}, {b}) must be {self.requires}" \
            + (f" [{self.reason}]" if self.reason else "")


@dataclass(frozen=True)
class AdmissibilityReport:
    ok: bool
    violations: tuple

    def __bool__(self):
        return self.ok


# ---------------------------------------------------------------------------
# carrier-derived lookup tables

class _CarrierMaps:
    __slots__ = ("conjunctions", "demod_class")

    def __init__(self, carrier: ClosureSet):
        self.conjunctions = {}
        self.demod_class = {}
        for f in carrier:
            if isinstance(f, And):
                self.conjunctions.setdefault(f.left, []).append(f)
                if f.right != f.left:
                    self.conjunctions.setdefault(f.right, []).append(f)
            img = demodalize(f)
            if img in carrier:
                self.demod_class.setdefault(img, []).append(f)


_maps_cache: dict = {}


def _maps(carrier: ClosureSet) -> _CarrierMaps:
    maps = _maps_cache.get(id(carrier))
    if maps is None or maps[0] is not carrier:
        maps = (carrier, _CarrierMaps(carrier))
        _maps_cache[id(carrier)] = maps
        if len(_maps_cache) > 256:
            _maps_cache.clear()
            _maps_cache[id(carrier)] = maps
    return maps[1]


# ---------------------------------------------------------------------------
# forced pairs (positive conditions)

def _forced_instances(carrier: ClosureSet, conds: ConditionSet) -> Iterator[tuple]:
    """Yield (flag, pair) for every positive-condition instance whose
    formulas all lie in the carrier."""
    flags = conds.flags
    want_demod = [f for f in flags if f.endswith("_d")]
    for x in carrier:
        if "r4" in flags:
            yield ("r4", (x, x))
        if isinstance(x, Arrow):
            a, c = x.left, x.right
            if "b1" in flags:
                partner = Neg(Arrow(a, Neg(c)))
                if partner in carrier:
                    yield ("b1", (x, partner))
            if "b1p" in flags:
                partner = Neg(Arrow(Neg(a), c))
                if partner in carrier:
                    yield ("b1p", (x, partner))
            if "b2" in flags and isinstance(c, Neg):
                partner = Neg(Arrow(a, c.child))
                if partner in carrier:
                    yield ("b2", (x, partner))
            if "b2p" in flags and isinstance(a, Neg):
                partner = Neg(Arrow(a.child, c))
                if partner in carrier:
                    yield ("b2p", (x, partner))
        if isinstance(x, Box):
            a = x.child
            if "t" in flags:
                yield ("t", (x, a))
            if "d" in flags:
                partner = Diamond(a)
                if partner in carrier:
                    yield ("d", (x, partner))
            if "iv" in flags:
                partner = Box(x)
                if partner in carrier:
                    yield ("iv", (x, partner))
            if "k1" in flags and isinstance(a, Arrow):
                partner = Arrow(Box(a.left), Box(a.right))
                if partner in carrier:
                    yield ("k1", (x, partner))
        if isinstance(x, Diamond):
            a = x.child
            dual = Neg(Box(Neg(a)))
            if "d1" in flags and dual in carrier:
                yield ("d1", (x, dual))
            if "d2" in flags and dual in carrier:
                yield ("d2", (dual, x))
            if "v" in flags:
                partner = Box(x)
                if partner in carrier:
                    yield ("v", (x, partner))
        if "b" in flags:
            partner = Box(Diamond(x))
            if partner in carrier:
                yield ("b", (x, partner))
        if want_demod:
            yield from _forced_demod_instances(x, carrier, want_demod)


def _forced_demod_instances(x: Formula, carrier: ClosureSet, want) -> Iterator[tuple]:
    """Demodalized variants: the image of the modal-law pair under the
    modality-erasing map, anchored on the same carrier instance."""
    def emit(flag, left, right):
        dl, dr = demodalize(left), demodalize(right)
        if dl in carrier and dr in carrier:
            return (flag, (dl, dr))
        return None

    out = []
    if isinstance(x, Box):
        a = x.child
        if "t_d" in want:
            out.append(emit("t_d", x, a))
        if "d_d" in want and Diamond(a) in carrier:
            out.append(emit("d_d", x, Diamond(a)))
        if "iv_d" in want and Box(x) in carrier:
            out.append(emit("iv_d", x, Box(x)))
        if "k1_d" in want and isinstance(a, Arrow):
            partner = Arrow(Box(a.left), Box(a.right))
            if partner in carrier:
                out.append(emit("k1_d", x, partner))
    if isinstance(x, Diamond):
        dual = Neg(Box(Neg(x.child)))
        if "d1_d" in want and dual in carrier:
            out.append(emit("d1_d", x, dual))
        if "d2_d" in want and dual in carrier:
            out.append(emit("d2_d", dual, x))
        if "v_d" in want and Box(x) in carrier:
            out.append(emit("v_d", x, Box(x)))
    if "b_d" in want and Box(Diamond(x)) in carrier:
        out.append(emit("b_d", x, Box(Diamond(x))))
    for item in out:
        if item is not None:
            yield item


def forced_pairs(carrier: ClosureSet, conds: ConditionSet) -> frozenset:
    """Every pair that any admissible relation over the carrier must contain."""
    return frozenset(pair for _, pair in _forced_instances(carrier, conds))


# ---------------------------------------------------------------------------
# Horn rules (implicational conditions), relation-driven

def _implied_pairs(pair: tuple, carrier: ClosureSet, conds: ConditionSet,
                   maps: _CarrierMaps) -> Iterator[tuple]:
    """Pairs forced to be present once `pair` is, per the closure-shaped
    flags, restricted to the carrier."""
    x, y = pair
    flags = conds.flags
    if "cun" in flags:
        nx, ny = Neg(x), Neg(y)
        if nx in carrier and ny in carrier:
            yield ("cun", (nx, ny))
    for (k, l, m, n) in conds.gcun:
        a = peel_negations(x, k)
        c = peel_negations(y, l)
        if a is not None and c is not None:
            tx = apply_negations(m, a)
            ty = apply_negations(n, c)
            if tx in carrier and ty in carrier:
                yield (f"gcun:{k},{l},{m},{n}", (tx, ty))
    if "r1" in flags:
        ny = Neg(y)
        if ny in carrier:
            yield ("r1", (x, ny))
        if isinstance(y, Neg):
            yield ("r1", (x, y.child))
    if "r2" in flags:
        if isinstance(y, And):
            partner = Arrow(y.left, y.right)
            if partner in carrier:
                yield ("r2", (x, partner))
        if isinstance(y, Arrow):
            partner = And(y.left, y.right)
            if partner in carrier:
                yield ("r2", (x, partner))
    if "r3" in flags:
        yield ("r3", (y, x))
    if "r5" in flags:
        for conj in maps.conjunctions.get(y, ()):
            yield ("r5", (x, conj))
    demr = "demr" in flags or "deme" in flags
    deml = "deml" in flags or "deme" in flags
    if demr:
        dx, dy = demodalize(x), demodalize(y)
        if dx in carrier and dy in carrier and (dx, dy) != (x, y):
            yield ("demr" if "demr" in flags else "deme", (dx, dy))
    if deml:
        tag = "deml" if "deml" in flags else "deme"
        for a in maps.demod_class.get(x, ()):
            for c in maps.demod_class.get(y, ()):
                if (a, c) != (x, y):
                    yield (tag, (a, c))


def close(relation: Iterable[tuple], carrier: ClosureSet,
          conds: ConditionSet) -> frozenset:
    """Least superset of the relation, within carrier pairs, closed under
    the implicational flags (cun, gcun, r1, r2, r3, the building half of
    r5, demr/deml/deme).  Idempotent and monotone; non-implicational flags
    are ignored here."""
    maps = _maps(carrier)
    out = set()
    queue = [p for p in relation]
    for p in queue:
        if p[0] not in carrier or p[1] not in carrier:
            raise ConditionError(
                f"relation pair ({to_text(p[0])}, {to_text(p[1])}) is outside the carrier")
    while queue:
        pair = queue.pop()
        if pair in out:
            continue
        out.add(pair)
        for _, implied in _implied_pairs(pair, carrier, conds, maps):
            if implied not in out:
                queue.append(implied)
    return frozenset(out)


# ---------------------------------------------------------------------------
# checking

def _check_one(relation: frozenset, carrier: ClosureSet, flag: str,
               conds: ConditionSet, maps: _CarrierMaps, world=None):
    """Violations of a single flag against one relation."""
    out = []

    def report(pair, requires, reason=""):
        out.append(ViolationReport(flag, pair, requires, world, reason))

    if flag == "a1":
        for (x, y) in relation:
            if isinstance(y, Neg) and y.child == x:
                report((x, y), "absent", "a formula relates to its own negation")
    elif flag == "a2":
        for (x, y) in relation:
            if isinstance(x, Neg) and x.child == y:
                report((x, y), "absent", "a negation relates back to its core")
    elif flag == "b0":
        for (x, y) in relation:
            ny = Neg(y)
            if (x, ny) in relation:
                report((x, ny), "absent", f"({to_text(x)}, {to_text(y)}) is present")
    elif flag == "b0p":
        for (x, y) in relation:
            nx = Neg(x)
            if (nx, y) in relation:
                report((nx, y), "absent", f"({to_text(x)}, {to_text(y)}) is present")
    elif flag in ("b1", "b2", "b1p", "b2p", "r4", "d1", "d2", "k1",
                  "t", "d", "b", "iv", "v",
                  "d1_d", "d2_d", "k1_d", "t_d", "d_d", "b_d", "iv_d", "v_d"):
        probe = ConditionSet((flag,), frames=())
        for tag, pair in _forced_instances(carrier, probe):
            if pair not in relation:
                report(pair, "present", "required by the condition")
    elif flag == "r5":
        sub = ConditionSet(("r5",), frames=())
        for (x, y) in relation:
            if isinstance(y, And):
                if (x, y.left) not in relation and (x, y.right) not in relation:
                    report((x, y.left), "present",
                           f"or ({to_text(x)}, {to_text(y.right)}); a conjunction "
                           "relates only via a conjunct")
            for _, implied in _implied_pairs((x, y), carrier, sub, maps):
                if implied not in relation:
                    report(implied, "present", "conjunct pair is present")
    elif flag in ("cun", "r1", "r2", "r3", "demr", "deml", "deme"):
        sub = ConditionSet((flag,), frames=())
        for pair in relation:
            for _, implied in _implied_pairs(pair, carrier, sub, maps):
                if implied not in relation:
                    report(implied, "present",
                           f"implied by ({to_text(pair[0])}, {to_text(pair[1])})")
    elif flag == "k2":
        pass  # quantifies over successor worlds; handled in admissible()
    else:
        raise ConditionError(f"unknown condition flag {flag!r}")
    return out


def _gcun_violations(relation, carrier, entry, conds_entry, maps, world=None):
    flag = f"gcun:{entry[0]},{entry[1]},{entry[2]},{entry[3]}"
    sub = ConditionSet((), gcun=(entry,), frames=())
    out = []
    for pair in relation:
        for _, implied in _implied_pairs(pair, carrier, sub, maps):
            if implied not in relation:
                out.append(ViolationReport(
                    flag, implied, "present", world,
                    f"implied by ({to_text(pair[0])}, {to_text(pair[1])})"))
    return out


def check(relation: Iterable[tuple], carrier: ClosureSet, cond: str):
    """Violations of one condition flag (or ``gcun:k,l,m,n``) against a
    relation over the carrier.  Empty list means the relativized condition
    holds."""
    relation = frozenset(tuple(p) for p in relation)
    maps = _maps(carrier)
    if cond.lower().startswith("gcun:"):
        entry = _canon_gcun(cond[5:].split(","))
        return _gcun_violations(relation, carrier, entry, None, maps)
    flag = _canon_flag(cond)
    if flag in FRAME_PROPERTIES:
        raise ConditionError(f"{flag} is a frame property; use frame_check")
    return _check_one(relation, carrier, flag, None, maps)


def check_all(relation: Iterable[tuple], carrier: ClosureSet,
              conds: ConditionSet, world=None):
    """Violations of every relation-level flag of the condition set."""
    relation = frozenset(tuple(p) for p in relation)
    maps = _maps(carrier)
    out = []
    for flag in sorted(conds.flags):
        out.extend(_check_one(relation, carrier, flag, conds, maps, world))
    for entry in conds.gcun:
        out.extend(_gcun_violations(relation, carrier, entry, conds, maps, world))
    return out


# ---------------------------------------------------------------------------
# frames

def frame_check(access, worlds, prop: str) -> bool:
    """Standard first-order frame property on a finite world set."""
    access = frozenset(tuple(e) for e in access)
    worlds = tuple(worlds)
    if prop == "reflexive":
        return all((w, w) in access for w in worlds)
    if prop == "serial":
        sources = {a for a, _ in access}
        return all(w in sources for w in worlds)
    if prop == "symmetric":
        return all((b, a) in access for a, b in access)
    if prop == "transitive":
        return all((a, d) in access
                   for a, b in access for c, d in access if b == c)
    if prop == "euclidean":
        return all((b, d) in access
                   for a, b in access for c, d in access if a == c)
    raise ConditionError(f"unknown frame property {prop!r}")


def frame_closure(access, worlds, props) -> frozenset:
    """Smallest superset of the access relation with the given properties.

    Seriality is satisfied by adding self-loops to successor-free worlds.
    """
    edges = set(tuple(e) for e in access)
    worlds = tuple(worlds)
    props = set(props)
    changed = True
    while changed:
        changed = False
        if "reflexive" in props:
            for w in worlds:
                if (w, w) not in edges:
                    edges.add((w, w))
                    changed = True
        if "serial" in props:
            sources = {a for a, _ in edges}
            for w in worlds:
                if w not in sources:
                    edges.add((w, w))
                    changed = True
        if "symmetric" in props:
            for a, b in list(edges):
                if (b, a) not in edges:
                    edges.add((b, a))
                    changed = True
        if "transitive" in props:
            for a, b in list(edges):
                for c, d in list(edges):
                    if b == c and (a, d) not in edges:
                        edges.add((a, d))
                        changed = True
        if "euclidean" in props:
            for a, b in list(edges):
                for c, d in list(edges):
                    if a == c and (b, d) not in edges:
                        edges.add((b, d))
                        changed = True
    return frozenset(edges)


# ---------------------------------------------------------------------------
# whole-model admissibility

def _k2_instances(carrier: ClosureSet):
    boxes = [f for f in carrier if isinstance(f, Box)]
    out = []
    for ba in boxes:
        for bb in boxes:
            out.append(((ba.child, bb.child), (ba, bb)))
    return out


def admissible(model: RelatingModel, conds: ConditionSet) -> AdmissibilityReport:
    """True iff every per-world relation passes every flag (relativized to
    the model carrier), contains all forced pairs, the access relation has
    every required frame property, and the k2 transfer holds."""
    carrier = model.carrier
    violations = []

    for prop in sorted(conds.frames):
        if not frame_check(model.access, model.worlds, prop):
            witness = _frame_witness(model, prop)
            violations.append(ViolationReport(
                prop, witness, "present", None, "required frame property fails"))

    forced = forced_pairs(carrier, conds)
    for w in model.worlds:
        rel = model.relating[w]
        for pair in sorted(forced - rel, key=lambda p: (order_key(p[0]), order_key(p[1]))):
            violations.append(ViolationReport(
                "forced", pair, "present", w, "forced pair is missing"))
        violations.extend(check_all(rel, carrier, conds, world=w))

    if "k2" in conds.flags:
        succ = successors_map(model)
        box_args = [f.child for f in carrier if isinstance(f, Box)]
        arg_set = set(box_args)
        for w in model.worlds:
            us = succ[w]
            if us:
                # premise pairs live in every successor's relation
                common = set(model.relating[us[0]])
                for u in us[1:]:
                    common &= model.relating[u]
                candidates = [(a, b) for (a, b) in common
                              if a in arg_set and b in arg_set]
            else:
                # no successors: the premise holds vacuously for every pair
                candidates = [(a, b) for a in box_args for b in box_args]
            for (a, b) in candidates:
                conc = (Box(a), Box(b))
                if conc not in model.relating[w]:
                    violations.append(ViolationReport(
                        "k2", conc, "present", w,
                        "all successors relate the unboxed pair"))

    return AdmissibilityReport(not violations, tuple(violations))


def _frame_witness(model: RelatingModel, prop: str):
    if prop == "reflexive":
        for w in model.worlds:
            if (w, w) not in model.access:
                return (w, w)
    if prop == "serial":
        sources = {a for a, _ in model.access}
        for w in model.worlds:
            if w not in sources:
                return (w, w)
    if prop == "symmetric":
        for a, b in sorted(model.access):
            if (b, a) not in model.access:
                return (b, a)
    if prop == "transitive":
        for a, b in sorted(model.access):
            for c, d in sorted(model.access):
                if b == c and (a, d) not in model.access:
                    return (a, d)
    if prop == "euclidean":
        for a, b in sorted(model.access):
            for c, d in sorted(model.access):
                if a == c and (b, d) not in model.access:
                    return (b, d)
    return (model.worlds[0], model.worlds[0])


# ---------------------------------------------------------------------------
# dense compilation (bitmask search and counting)

@dataclass(frozen=True)
class CompiledRules:
    """Carrier-pair-indexed form of a condition set.

    Pair (a, b) gets index ``position(a) * n + position(b)``.  A guard
    (P, W, label) flags a violation on relation mask R exactly when
    ``R & P == P`` and ``R & W == 0``; Horn rules are (premise, conclusion)
    index pairs, and k2 entries are cross-world (premise, conclusion)
    index pairs.
    """
    carrier: ClosureSet
    n: int
    forced: tuple
    horn: tuple
    guards: tuple
    k2: tuple
    base_mask: int

    def pair_index(self, a: Formula, b: Formula) -> int:
        return self.carrier.position(a) * self.n + self.carrier.position(b)

    def pairs_of_mask(self, mask: int):
        n = self.n
        out = []
        while mask:
            bit = mask & -mask
            idx = bit.bit_length() - 1
            out.append((self.carrier[idx // n], self.carrier[idx % n]))
            mask ^= bit
        return tuple(out)


def close_mask(mask: int, horn) -> int:
    """Horn closure of a relation bitmask."""
    changed = True
    while changed:
        changed = False
        for prem, conc in horn:
            if (mask >> prem) & 1 and not (mask >> conc) & 1:
                mask |= 1 << conc
                changed = True
    return mask


def compile_rules(carrier: ClosureSet, conds: ConditionSet) -> CompiledRules:
    """Materialize every condition instance over the carrier.

    Quadratic in the carrier size; intended for the small carriers of the
    search and counting paths.
    """
    n = len(carrier)
    pos = carrier.position
    idx = lambda a, b: pos(a) * n + pos(b)
    maps = _maps(carrier)
    flags = conds.flags

    forced = sorted({idx(a, b) for _, (a, b) in _forced_instances(carrier, conds)})

    horn = set()
    closure_flags = ({"cun", "r1", "r2", "r3", "r5", "demr", "deml", "deme"}
                     & flags)
    sub = ConditionSet(closure_flags, gcun=conds.gcun, frames=())
    if closure_flags or conds.gcun:
        for a in carrier:
            for b in carrier:
                for _, (ta, tb) in _implied_pairs((a, b), carrier, sub, maps):
                    if (ta, tb) != (a, b):
                        horn.add((idx(a, b), idx(ta, tb)))

    guards = set()
    for i in forced:
        guards.add((0, 1 << i, "forced"))
    for prem, conc in horn:
        guards.add((1 << prem, 1 << conc, "horn"))
    if "a1" in flags:
        for a in carrier:
            na = Neg(a)
            if na in carrier:
                guards.add((1 << idx(a, na), 0, "a1"))
    if "a2" in flags:
        for a in carrier:
            na = Neg(a)
            if na in carrier:
                guards.add((1 << idx(na, a), 0, "a2"))
    if "b0" in flags:
        for a in carrier:
            for b in carrier:
                nb = Neg(b)
                if nb in carrier:
                    guards.add(((1 << idx(a, b)) | (1 << idx(a, nb)), 0, "b0"))
    if "b0p" in flags:
        for a in carrier:
            na = Neg(a)
            if na in carrier:
                for b in carrier:
                    guards.add(((1 << idx(a, b)) | (1 << idx(na, b)), 0, "b0p"))
    if "r5" in flags:
        for a in carrier:
            for f in carrier:
                if isinstance(f, And):
                    witness = (1 << idx(a, f.left)) | (1 << idx(a, f.right))
                    guards.add((1 << idx(a, f), witness, "r5"))

    k2 = []
    if "k2" in flags:
        for (prem, conc) in _k2_instances(carrier):
            k2.append((idx(*prem), idx(*conc)))

    horn = tuple(sorted(horn))
    base = 0
    for i in forced:
        base |= 1 << i
    base = close_mask(base, horn)

    return CompiledRules(
        carrier=carrier, n=n, forced=tuple(forced), horn=horn,
        guards=tuple(sorted(guards)), k2=tuple(sorted(k2)), base_mask=base)
