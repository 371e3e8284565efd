import pytest
from hypothesis import given
from hypothesis import strategies as st

from _helpers import record
from cascadegate.costs import (
    BudgetTarget,
    call_probability,
    cascade_probability,
    measure_averages,
    routing_probability,
)
from cascadegate.errors import (
    BudgetRangeError,
    EmptyDatasetError,
    OrderingAssumptionError,
)
from cascadegate.records import CostScheme

SCHEME = CostScheme.fixed(1, 10)


def test_routing_probability_midpoint():
    assert routing_probability(5.5, SCHEME) == pytest.approx(0.5)


def test_routing_probability_endpoints():
    assert routing_probability(1.0, SCHEME) == 0.0
    assert routing_probability(10.0, SCHEME) == 1.0


def test_routing_budget_out_of_range():
    with pytest.raises(BudgetRangeError):
        routing_probability(0.5, SCHEME)
    with pytest.raises(BudgetRangeError):
        routing_probability(10.5, SCHEME)


def test_cascade_probability_examples():
    assert cascade_probability(6.0, SCHEME) == pytest.approx(0.5)
    assert cascade_probability(1.0, SCHEME) == 0.0
    assert cascade_probability(11.0, SCHEME) == 1.0


def test_cascade_budget_out_of_range():
    with pytest.raises(BudgetRangeError):
        cascade_probability(0.9, SCHEME)
    with pytest.raises(BudgetRangeError):
        cascade_probability(11.1, SCHEME)


def test_call_probability_dispatches_by_family():
    assert call_probability(BudgetTarget(5.5, "routing"), SCHEME) == pytest.approx(0.5)
    assert call_probability(BudgetTarget(6.0, "cascading"), SCHEME) == pytest.approx(0.5)
    with pytest.raises(BudgetRangeError):
        BudgetTarget(5.0, "nonsense")


def test_measure_averages_constants():
    scheme = measure_averages([record(), record()])
    assert scheme.avg_small == 1.0
    assert scheme.avg_large == 10.0
    assert scheme.source == "measured"


def test_measure_averages_means():
    records = [
        record(small_cost=1.0, large_cost=10.0),
        record(small_cost=3.0, large_cost=10.0),
    ]
    scheme = measure_averages(records)
    assert scheme.avg_small == pytest.approx(2.0)
    assert scheme.avg_large == pytest.approx(10.0)


def test_measure_averages_ordering_violation():
    records = [record(small_cost=5.0, large_cost=4.0)] * 2
    with pytest.raises(OrderingAssumptionError):
        measure_averages(records)


def test_measure_averages_empty_stream():
    with pytest.raises(EmptyDatasetError):
        measure_averages([])


@st.composite
def cost_triples(draw):
    cs = draw(st.floats(0.1, 10.0))
    cl = cs + draw(st.floats(0.1, 10.0))
    c = draw(st.floats(cs, cl))
    return c, CostScheme.fixed(cs, cl)


@given(cost_triples())
def test_routing_round_trip_identity(triple):
    c, scheme = triple
    p = routing_probability(c, scheme)
    assert (1 - p) * scheme.avg_small + p * scheme.avg_large == pytest.approx(c, abs=1e-12)


@given(cost_triples())
def test_cascade_round_trip_identity(triple):
    c, scheme = triple
    p = cascade_probability(c, scheme)
    assert scheme.avg_small + p * scheme.avg_large == pytest.approx(c, abs=1e-12)


@given(cost_triples(), st.floats(0.01, 0.5))
def test_probabilities_strictly_increasing_in_budget(triple, bump):
    c, scheme = triple
    higher = min(c + bump, scheme.avg_large)
    if higher > c:
        assert routing_probability(higher, scheme) > routing_probability(c, scheme)
        assert cascade_probability(higher, scheme) > cascade_probability(c, scheme)


@given(cost_triples())
def test_cascade_probability_below_routing_probability(triple):
    c, scheme = triple
    if c > scheme.avg_small:
        assert cascade_probability(c, scheme) < routing_probability(c, scheme)
