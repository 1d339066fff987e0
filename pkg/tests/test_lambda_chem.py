import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from protolife.errors import ConfigError
from protolife.lambda_chem import (
    App, CollisionLaw, Lam, LambdaSyntaxError, RandomTermParams, ReductionBudget, Var,
    alpha_equal, collide, contract, free_vars, fresh_name, normal_form, parse, random_term,
    rewrite_step,
)


# -- parsing and printing ----------------------------------------------------


def test_parse_identity():
    assert parse("λx.x") == Lam("x", Var("x"))


def test_parse_application():
    assert parse("(λx.x)y") == App(Lam("x", Var("x")), Var("y"))


def test_parse_missing_dot_reports_offset():
    with pytest.raises(LambdaSyntaxError) as info:
        parse("λx")
    assert info.value.offset == 2


@pytest.mark.parametrize("bad", ["", "(x", "λ.x", "(x)", "x y", "λx.", ")x"])
def test_parse_rejects(bad):
    with pytest.raises(SyntaxError):
        parse(bad)


def test_backslash_and_whitespace():
    assert parse(r" \x . ( x ) y ") == parse("λx.(x)y")


def test_deep_term_does_not_recurse():
    text = "λx." * 5000 + "x"
    t = parse(text)
    assert t.size == 5001
    assert parse(str(t)) == t


# -- free variables ----------------------------------------------------------


@pytest.mark.parametrize("text, expected", [
    ("λx.x", set()),
    ("(x)λx.x", {"x"}),
    ("λx.(x)y", {"y"}),
])
def test_free_vars(text, expected):
    assert free_vars(parse(text)) == expected


def test_fresh_name_avoids_every_name():
    t = parse("λv0.(v1)v2")
    assert fresh_name(t) == "v3"


# -- individual rules --------------------------------------------------------


def step(text):
    return rewrite_step(parse(text))


def test_identity_rule():
    assert step("(λx.x)y") == parse("y")


def test_discard_rule():
    assert step("(λx.y)z") == parse("y")


def test_descend_rule():
    assert step("(λx.λy.x)q") == parse("λy.(λx.x)q")


def test_distribute_rule():
    assert step("(λx.(x)x)q") == parse("((λx.x)q)(λx.x)q")


def test_rename_fires_when_descend_blocked():
    # the bound y would capture the argument's free y
    out = step("(λx.λy.(x)y)y")
    assert out == parse("(λx.λv0.(λy.(x)y)v0)y")
    # the renaming is itself a one-step, meaning-preserving eta-expansion
    assert normal_form(out).term.key == "λx0.(y)x0"


def test_contract_on_bare_redex():
    redex = parse("(λx.λy.x)q")
    assert contract(redex, redex) == parse("λy.(λx.x)q")


def test_normal_form_is_fixed_point():
    assert rewrite_step(parse("λx.(x)y")) is None


# -- normal forms ------------------------------------------------------------


def test_constant_combinator_two_steps():
    res = normal_form(parse("(λx.λy.x)q"), ReductionBudget(100))
    assert (res.term, res.steps_used, res.exhausted) == (parse("λy.q"), 2, False)


def test_omega_exhausts_budget_exactly():
    res = normal_form(parse("(λx.(x)x)λx.(x)x"), ReductionBudget(100))
    assert res.exhausted and res.steps_used == 100


def test_already_normal_uses_no_steps():
    res = normal_form(parse("λx.x"), ReductionBudget(1))
    assert (res.term, res.steps_used, res.exhausted) == (parse("λx.x"), 0, False)


def test_node_limit_counts_as_exhaustion():
    # (λx.((x)x)x)λx.((x)x)x grows without bound
    w3 = "λx.((x)x)x"
    res = normal_form(parse(f"({w3}){w3}"), ReductionBudget(10_000, 200))
    assert res.exhausted and res.term.size > 200


def test_nested_redex_under_binder():
    assert normal_form(parse("(λz.z)λx.(λy.y)x")).term == parse("λx.x")


# -- collisions --------------------------------------------------------------


def test_default_law_applies_operator():
    law = CollisionLaw()
    assert collide(parse("λu.u"), parse("λv.v"), law) == parse("λv.v")


def test_copier_law_returns_operator():
    law = CollisionLaw(parse("λx.λy.x"))
    a = parse("λu.u")
    for b in ("λv.v", "λp.λq.(q)p", "λs.(s)s"):
        assert alpha_equal(collide(a, parse(b), law), a)


def test_bare_variable_operator_is_elastic():
    assert collide(parse("x"), parse("λv.v"), CollisionLaw()) is None


def test_variable_product_is_filtered():
    # (λu.z)λv.v reduces to the bare variable z
    assert collide(parse("λu.z"), parse("λv.v"), CollisionLaw()) is None
    assert collide(parse("λu.u"), parse("λv.v"), CollisionLaw(parse("λx.λy.y"))) == parse("λv.v")


def test_divergent_collision_is_elastic():
    w = parse("λx.(x)x")
    assert collide(w, w, CollisionLaw(budget=ReductionBudget(200, 10_000))) is None


def test_phi_must_be_abstraction():
    with pytest.raises(ConfigError):
        CollisionLaw(parse("x"))


# -- random terms ------------------------------------------------------------


def test_depth_zero_is_variable():
    t = random_term(np.random.default_rng(0), RandomTermParams(max_depth=0))
    assert isinstance(t, Var)


def test_random_terms_deterministic():
    p = RandomTermParams()
    a = [str(random_term(np.random.default_rng(5), p)) for _ in range(3)]
    b = [str(random_term(np.random.default_rng(5), p)) for _ in range(3)]
    assert a == b


def test_probabilities_must_sum_to_one():
    with pytest.raises(ConfigError):
        RandomTermParams(p_var=0.5, p_abs=0.5, p_app=0.5)


# -- properties --------------------------------------------------------------

seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=200, deadline=None)
@given(seeds, st.integers(0, 7))
def test_closed_terms_have_no_free_vars(seed, depth):
    t = random_term(np.random.default_rng(seed), RandomTermParams(max_depth=depth, closed=True))
    assert free_vars(t) == frozenset()


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_print_parse_round_trip(seed):
    t = random_term(np.random.default_rng(seed), RandomTermParams(max_depth=8))
    assert parse(str(t)) == t
    assert parse(t.key).key == t.key


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_key_is_invariant_under_renaming_binders(seed):
    t = random_term(np.random.default_rng(seed), RandomTermParams(max_depth=6, closed=True))
    renamed = parse(t.key)  # binders x0, x1, ...
    assert alpha_equal(t, renamed)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_rewriting_never_adds_free_variables(seed):
    t = random_term(np.random.default_rng(seed), RandomTermParams(max_depth=6))
    fv = free_vars(t)
    for _ in range(50):
        nxt = rewrite_step(t)
        if nxt is None:
            break
        assert free_vars(nxt) <= fv
        t = nxt


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_normal_forms_have_no_redex(seed):
    t = random_term(np.random.default_rng(seed), RandomTermParams(max_depth=6, closed=True))
    res = normal_form(t, ReductionBudget(500, 5000))
    if not res.exhausted:
        assert rewrite_step(res.term) is None
        assert res.steps_used <= 500
