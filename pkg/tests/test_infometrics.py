import math

import pytest
from hypothesis import given, settings, strategies as st

from oracles import h2
from protolife.errors import ArityError, EmptyPopulation, InvalidDistribution
from protolife.infometrics import (
    algorithmic_info_proxy, distribution_from_counts, entropy, joint_entropy, marginal,
    mutual_information, population_entropy,
)
from protolife.reactor import Population


def test_entropy_examples():
    assert abs(entropy({i: 0.25 for i in range(4)}) - 2.0) <= 1e-12
    assert entropy({"a": 1.0}) == 0.0
    assert abs(entropy({"a": 0.5, "b": 0.25, "c": 0.25}) - 1.5) <= 1e-12


def test_zero_probability_contributes_nothing():
    assert entropy({"a": 0.5, "b": 0.5, "c": 0.0}) == 1.0


@pytest.mark.parametrize("bad", [{"a": 0.5}, {"a": -0.5, "b": 1.5}, {"a": float("nan")}])
def test_invalid_distributions(bad):
    with pytest.raises(InvalidDistribution):
        entropy(bad)


def test_joint_entropy_examples():
    indep = {(x, y): 0.25 for x in (0, 1) for y in (0, 1)}
    assert abs(joint_entropy(indep) - 2.0) <= 1e-12
    assert abs(joint_entropy({(0, 0): 0.5, (1, 1): 0.5}) - 1.0) <= 1e-12
    assert joint_entropy({(0, 0): 1.0}) == 0.0


def test_mutual_information_examples():
    indep = {(x, y): 0.25 for x in (0, 1) for y in (0, 1)}
    assert abs(mutual_information(indep)) <= 1e-12
    copy = {(0, 0): 0.5, (1, 1): 0.5}
    assert abs(mutual_information(copy) - entropy(marginal(copy, 0))) <= 1e-12
    eps = 0.25
    bsc = {(x, y): 0.5 * (eps if x != y else 1 - eps) for x in (0, 1) for y in (0, 1)}
    assert abs(mutual_information(bsc) - (1 - h2(0.25))) <= 1e-9
    assert abs(mutual_information(bsc) - 0.18872187554086717) <= 1e-9


def test_mutual_information_needs_pairs():
    with pytest.raises(ArityError):
        mutual_information({(0, 0, 0): 1.0})


def test_population_entropy():
    assert population_entropy({"a": 5}) == 0.0
    assert population_entropy({"a": 3, "b": 3}) == 1.0
    assert abs(population_entropy({"a": 2, "b": 1, "c": 1}) - 1.5) <= 1e-12
    pop = Population()
    for k in "aabc":
        pop.add(k, k)
    assert abs(population_entropy(pop) - 1.5) <= 1e-12


def test_empty_population():
    with pytest.raises(EmptyPopulation):
        distribution_from_counts({})


def test_proxy_examples():
    assert algorithmic_info_proxy(b"") == 32
    assert algorithmic_info_proxy(b"z" * 1024) < 1024


# -- properties --------------------------------------------------------------

weights = st.lists(st.integers(1, 50), min_size=1, max_size=8)


def normalize(ws):
    total = sum(ws)
    return [w / total for w in ws]


@settings(max_examples=300, deadline=None)
@given(weights)
def test_entropy_bounds(ws):
    h = entropy(dict(enumerate(normalize(ws))))
    assert -1e-12 <= h <= math.log2(len(ws)) + 1e-12


@settings(max_examples=300, deadline=None)
@given(weights, weights)
def test_independent_joint_has_zero_mi(wx, wy):
    px, py = normalize(wx), normalize(wy)
    joint = {(i, j): a * b for i, a in enumerate(px) for j, b in enumerate(py)}
    assert abs(mutual_information(joint)) <= 1e-12
    assert abs(joint_entropy(joint) - entropy(dict(enumerate(px))) - entropy(dict(enumerate(py)))) <= 1e-12


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(0, 20), min_size=4, max_size=4).filter(lambda v: sum(v) > 0))
def test_mi_bounded_by_marginals(cells):
    total = sum(cells)
    joint = {(i // 2, i % 2): c / total for i, c in enumerate(cells)}
    mi = mutual_information(joint)
    assert mi >= 0
    assert mi <= min(entropy(marginal(joint, 0)), entropy(marginal(joint, 1))) + 1e-12


@settings(max_examples=300, deadline=None)
@given(weights)
def test_mi_of_variable_with_itself(ws):
    p = normalize(ws)
    joint = {(i, i): q for i, q in enumerate(p)}
    assert abs(mutual_information(joint) - entropy(dict(enumerate(p)))) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.binary(max_size=2000))
def test_proxy_at_least_header(data):
    assert algorithmic_info_proxy(data) >= algorithmic_info_proxy(b"")
