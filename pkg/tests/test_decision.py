import random

import pytest

from bclkit.conditions import ConditionSet, admissible, check, parse_conditions
from bclkit.decision import (
    BudgetError, SearchConfig, completeness_bound, count_admissible, decide,
    demodal_complete, filtrate, filtration_classes, pad_carrier,
)
from bclkit.semantics import (
    BoundedValid, Countermodel, RelatingModel, Valid, evaluate,
)
from bclkit.syntax import ClosureSet, Var, parse, subformula_closure, to_text

from util import brute_refute_one_world, random_admissible_model, random_formula, random_model

BASE = parse_conditions("a1,a2,b0,b1,b2")
p, q = Var("p"), Var("q")


def closure_of(*texts):
    return subformula_closure([parse(t) for t in texts])


# ---------------------------------------------------------------------------
# decide

def test_connexive_theses_valid():
    for text in ("~(p -> ~p)", "~(~p -> p)",
                 "(p -> q) -> ~(p -> ~q)", "(p -> ~q) -> ~(p -> q)"):
        verdict = decide(parse(text), BASE)
        assert isinstance(verdict, Valid), text


def test_reflexivity_fails_with_empty_relation():
    verdict = decide(parse("p -> p"), BASE)
    assert isinstance(verdict, Countermodel)
    assert verdict.model.relating[verdict.world] == frozenset()


def test_decide_agrees_with_brute_force_oracle():
    # one-world spec-literal enumeration as the independent oracle
    for text in ("p -> p", "~(p -> ~p)", "~(~p -> p)", "p -> q"):
        f = parse(text)
        oracle = brute_refute_one_world(f, BASE)
        verdict = decide(f, BASE)
        if oracle is None:
            assert not isinstance(verdict, Countermodel), text
        else:
            assert isinstance(verdict, Countermodel), text


def test_strategies_agree():
    rng = random.Random(13)
    checked = 0
    while checked < 12:
        f = random_formula(rng, depth=2, modal=False)
        if len(ClosureSet([f])) > 4:
            continue  # the dense path enumerates 2^(pairs) relations
        checked += 1
        a = decide(f, BASE, SearchConfig(max_worlds=1, strategy="factored"))
        b = decide(f, BASE, SearchConfig(max_worlds=1, strategy="dense"))
        assert type(a) is type(b), to_text(f)


def test_countermodels_revalidate():
    for text in ("(p -> q) => (q -> p)", "p -> p",
                 "((p -> q) & (q -> r)) => (p -> r)"):
        verdict = decide(parse(text), BASE)
        assert isinstance(verdict, Countermodel)
        assert admissible(verdict.model, BASE).ok
        assert not evaluate(verdict.model, verdict.world, parse(text))


def test_decide_monotone_in_conditions():
    weaker = parse_conditions("a1,a2,b0,b1,b2")
    stronger = parse_conditions("a1,a2,b0,b1,b2,cun")
    for text in ("~(p -> ~p)", "(p -> q) -> ~(p -> ~q)"):
        assert isinstance(decide(parse(text), weaker), Valid)
        assert not isinstance(decide(parse(text), stronger), Countermodel)


def test_modal_law_reduction_t():
    f = parse("[]p -> p")
    assert isinstance(decide(f, parse_conditions("t")), Valid)
    assert isinstance(decide(f, parse_conditions("reflexive")), Countermodel)
    assert isinstance(decide(f, ConditionSet(["t"], frames=())), Countermodel)


def test_modal_law_reduction_other_laws():
    # flat queries (modal operators over plain Booleans) reach their bound
    for text, flag in {"[]p -> <>p": "d", "<>p -> ~[]~p": "d1"}.items():
        verdict = decide(parse(text), parse_conditions(flag))
        assert isinstance(verdict, Valid), text
    # nested modalities fall back to the carrier-exponential bound
    verdict = decide(parse("p -> []<>p"), parse_conditions("b"))
    assert isinstance(verdict, BoundedValid)
    assert verdict.bound == 2 ** 4  # closure of the query has four members


def test_gcun_conditions_cap_at_bounded_valid():
    conds = parse_conditions("a1,a2,b0,b1,b2,cun,gcun:0,0,2,2")
    verdict = decide(parse("~(p -> ~p)"), conds)
    assert isinstance(verdict, BoundedValid)
    assert verdict.bound == 1


def test_empty_class_is_trivially_valid():
    # the condition set admits no relation at all over this carrier
    conds = parse_conditions("b0,b1,gcun:0,1,0,2")
    verdict = decide(parse("(p -> q) -> ~~(p -> ~q)"), conds)
    assert isinstance(verdict, Valid)
    assert verdict.bound == 0


def test_completeness_bounds():
    f = parse("p -> p")
    carrier = ClosureSet([f])
    from bclkit.conditions import compile_rules
    assert completeness_bound(f, BASE, carrier, compile_rules(carrier, BASE)) == 1
    g = parse("[]p -> p")
    cg = ClosureSet([g])
    conds = parse_conditions("t")
    assert completeness_bound(g, conds, cg, compile_rules(cg, conds)) == 2
    h = parse("[](p -> q) -> ([]p -> []q)")   # arrow under a box: not flat
    ch = ClosureSet([h])
    assert completeness_bound(h, BASE, ch, compile_rules(ch, BASE)) \
        == 2 ** len(ch)
    conds_k = parse_conditions("k1,k2")
    assert completeness_bound(g, conds_k, cg, compile_rules(cg, conds_k)) is None


def test_budget_guard():
    with pytest.raises(BudgetError):
        decide(parse("p -> p"), BASE, SearchConfig(budget=1))


def test_jobs_match_sequential():
    f = parse("(p -> q) => (q -> p)")
    seq = decide(f, BASE, SearchConfig(jobs=1))
    par = decide(f, BASE, SearchConfig(jobs=3))
    assert isinstance(seq, Countermodel) and isinstance(par, Countermodel)
    assert seq.world == par.world
    assert seq.model.relating == par.model.relating
    assert seq.model.valuation == par.model.valuation


# ---------------------------------------------------------------------------
# counting

def test_count_a1_over_p():
    carrier = closure_of("~p")
    assert count_admissible(carrier, parse_conditions("a1")) == 8


def test_count_matches_direct_enumeration():
    # independent oracle: loop the subsets and check each directly
    rng = random.Random(2)
    for _ in range(8):
        carrier = subformula_closure([random_formula(rng, 2, modal=False)])
        if len(carrier) > 3:
            continue
        conds = ConditionSet(rng.sample(["a1", "a2", "b0", "cun", "r3"], k=2),
                             frames=())
        members = carrier.members
        pairs = [(a, b) for a in members for b in members]
        expected = 0
        from bclkit.conditions import check_all, forced_pairs
        forced = forced_pairs(carrier, conds)
        for bits in range(1 << len(pairs)):
            rel = frozenset(x for i, x in enumerate(pairs) if (bits >> i) & 1)
            if forced <= rel and not check_all(rel, carrier, conds):
                expected += 1
        assert count_admissible(carrier, conds) == expected


def test_count_zero_for_inconsistent_sets():
    gcun_carrier = closure_of("(p -> q) -> ~~(p -> ~q)")
    assert count_admissible(gcun_carrier, parse_conditions("b0,b1,gcun:0,1,0,2")) == 0
    small = closure_of("~p")
    assert count_admissible(small, parse_conditions("a1,r1,r4")) == 0
    assert count_admissible(small, parse_conditions("a2,r1,r3,r4")) == 0
    assert count_admissible(closure_of("~(p -> ~q)", "p -> q"),
                            parse_conditions("b0,b1,r1")) == 0
    assert count_admissible(closure_of("~(p -> q)", "p -> ~q"),
                            parse_conditions("b0,b2,r1")) == 0


def test_count_gcun_diagonal_is_free():
    carrier = closure_of("~p")
    free = count_admissible(carrier, ConditionSet())
    assert free == 16
    for k in (0, 1, 2):
        conds = ConditionSet(gcun=[(k, k, k, k)])
        assert count_admissible(carrier, conds, pad=False) == free


def test_count_budget_guard():
    big = closure_of("(p -> q) & (q -> r) & (r -> p)")
    with pytest.raises(BudgetError):
        count_admissible(big, ConditionSet(), budget=4)


def test_pad_carrier():
    carrier = closure_of("p -> q")
    padded = pad_carrier(carrier, [(0, 1, 0, 2)])
    texts = {to_text(f) for f in padded}
    assert {"p", "~p", "~~p", "~~~p", "q", "~q", "~~q", "~~~q"} <= texts


# ---------------------------------------------------------------------------
# filtration

def test_filtrate_collapses_indistinguishable_worlds():
    m = RelatingModel(
        ["a", "b"], [], {"a": {"p"}, "b": {"p"}},
        {"a": {(p, p)}, "b": {(p, p)}}, ClosureSet([p]))
    filt = filtrate(m, ClosureSet([p]))
    assert len(filt.worlds) == 1


def test_filtration_truth_lemma_randomized():
    rng = random.Random(42)
    for _ in range(60):
        roots = [random_formula(rng, depth=2) for _ in range(2)]
        gamma = subformula_closure(roots)
        if len(gamma) > 6:
            continue
        m = random_model(rng, gamma, max_worlds=4)
        filt = filtrate(m, gamma)
        cls = filtration_classes(m, gamma)
        assert len(filt.worlds) <= 2 ** len(gamma)
        for w in m.worlds:
            for f in gamma:
                assert evaluate(filt, cls[w], f) == evaluate(m, w, f)


def test_filtrate_drops_out_of_gamma_variables():
    m = RelatingModel(["a"], [], {"a": {"p", "q"}}, {}, ClosureSet([p, q]))
    filt = filtrate(m, ClosureSet([p]))
    assert filt.valuation["a"] == frozenset({"p"})


# ---------------------------------------------------------------------------
# demodalization completion

def test_demodal_complete_spec_example():
    carrier = closure_of("[]p", "[]q")
    m = RelatingModel(["w0"], [], {"w0": {"p"}}, {"w0": {(p, q)}}, carrier)
    plus = demodal_complete(m)
    got = {(to_text(a), to_text(b)) for a, b in plus.relating["w0"]}
    assert {("[]p", "q"), ("p", "[]q"), ("[]p", "[]q"), ("p", "q")} <= got
    assert check(plus.relating["w0"], plus.carrier, "deml") == []


def test_demodal_complete_fixes_modality_free_models():
    carrier = closure_of("p -> q")
    m = RelatingModel(["w0"], [], {}, {"w0": {(p, q)}}, carrier)
    plus = demodal_complete(m)
    assert plus.relating == m.relating


def test_demodal_complete_idempotent_and_preserving():
    rng = random.Random(8)
    conds = parse_conditions("a1,a2,b0,b1,b2,deml")
    for _ in range(20):
        roots = [random_formula(rng, depth=2) for _ in range(2)]
        gamma = subformula_closure(roots)
        if len(gamma) > 7:
            continue
        try:
            m = random_admissible_model(gamma, conds, rng)
        except RuntimeError:
            continue
        filt = filtrate(m, gamma)
        plus = demodal_complete(filt)
        again = demodal_complete(plus)
        assert again.relating == plus.relating
        for w in filt.worlds:
            for f in gamma:
                assert evaluate(plus, w, f) == evaluate(filt, w, f)


# ---------------------------------------------------------------------------
# soundness sampling (axioms against their paired condition sets)

def test_soundness_spot_check():
    from bclkit.proofs import instantiate_schema
    from bclkit.registry import logic
    rng = random.Random(77)
    for name in ("BCL", "BCL+cun", "MBCL+T", "MBCL+CUDL"):
        lg = logic(name)
        instances = []
        for _ in range(12):
            schema = rng.choice(lg.calculus.schemas)
            binding = {"A": random_formula(rng, 1, modal=lg.calculus.modal),
                       "B": random_formula(rng, 1, modal=lg.calculus.modal)}
            instances.append(instantiate_schema(schema, binding))
        carrier = subformula_closure(instances)
        for _ in range(5):
            model = random_admissible_model(carrier, lg.conditions, rng)
            for inst in instances:
                for w in model.worlds:
                    assert evaluate(model, w, inst), \
                        f"{name}: {to_text(inst)} fails at {w}"
