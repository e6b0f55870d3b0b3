import cmath
import math

import pytest

from dqcalc.graphs import GraphError, build_graph, canonicalize, relabel, wedge_graph, wheel_family
from dqcalc.weights import WeightEstimate, estimate_weight, propagator_angle


def test_propagator_angle_conventions():
    # for w on the real line the angle is twice the euclidean angle of z - w
    for z, w in [(1 + 1j, 0), (0.3 + 2j, 1), (-2 + 0.1j, 0.5)]:
        assert propagator_angle(z, w) == pytest.approx((2 * cmath.phase(z - w)) % (2 * math.pi))
    # a point straight above another sits at angle pi
    assert propagator_angle(2j, 1j) == pytest.approx(math.pi)
    with pytest.raises(ValueError):
        propagator_angle(-1j, 0)
    with pytest.raises(ValueError):
        propagator_angle(1j, 1j)


def test_wedge_weight():
    est = estimate_weight(wedge_graph(1), samples=200_000, seed=1)
    assert est.within(0.5)
    assert est.stderr < 0.005


def test_two_wedge_factorizes():
    est = estimate_weight(wedge_graph(2), samples=200_000, seed=2)
    assert est.within(0.25)


def test_estimates_are_deterministic_per_seed():
    a = estimate_weight(wedge_graph(1), samples=70_000, seed=5)
    b = estimate_weight(wedge_graph(1), samples=70_000, seed=5)
    c = estimate_weight(wedge_graph(1), samples=70_000, seed=6)
    assert a == b
    assert a.mean != c.mean


def test_edge_reordering_flips_sign():
    g = wedge_graph(1)
    h = relabel(g, [0, 1, 2], [1, 0])
    a = estimate_weight(g, samples=50_000, seed=3)
    b = estimate_weight(h, samples=50_000, seed=3)
    assert canonicalize(h).sign == -canonicalize(g).sign
    assert b.mean == pytest.approx(-a.mean)


def test_wrong_form_degree_is_exactly_zero():
    g = build_graph("kontsevich", 1, 2, [(0, 1)])
    est = estimate_weight(g)
    assert est.exact and est.mean == 0.0


def test_unsupported_graphs():
    with pytest.raises(ValueError):
        estimate_weight(build_graph("kontsevich", 1, 1, [(0, 1)]))
    with pytest.raises(ValueError):
        estimate_weight(wedge_graph(4), samples=10)
    with pytest.raises(GraphError):
        estimate_weight(wheel_family("tetrahedron"))


def test_within():
    assert WeightEstimate(0.49, 0.01, 100, 0).within(0.5)
    assert not WeightEstimate(0.40, 0.01, 100, 0).within(0.5)
