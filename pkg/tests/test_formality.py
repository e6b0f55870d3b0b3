import math
import random
from fractions import Fraction

import pytest
import sympy

from dqcalc.formality import (
    MissingWeight,
    WeightCollection,
    WeightTableError,
    associativity_residual,
    associativity_residual_with_error,
    extract_characteristic,
    kontsevich_graphs,
    moyal_weights,
    relation_contributors,
    star_product,
    wheel_weight_table,
)
from dqcalc.graphs import (
    brane_normalization_graphs,
    build_graph,
    canonicalize,
    relabel,
    wedge_graph,
    wheel_family,
)
from dqcalc.poly import PolyVectorField, poly_ring
from dqcalc.series import duflo_reference_series, series_from_pairs

R2 = poly_ring(2)
x1, x2 = R2.gens
R3 = poly_ring(3)
y1, y2, y3 = R3.gens

CONSTANT = PolyVectorField(2, 2, {(0, 1): 1})
LINEAR = PolyVectorField(2, 2, {(0, 1): x1})
AFFINE = PolyVectorField(2, 2, {(0, 1): x1 + 2 * x2 + 1})
SU2 = PolyVectorField(3, 2, {(0, 1): y3, (1, 2): y1, (2, 0): y2})


def k2(*edges):
    return build_graph("kontsevich", 2, 2, edges)


# order-2 weights; the ones not listed vanish
ORDER_TWO = {
    k2((0, 2), (0, 3), (1, 2), (1, 3)): Fraction(1, 4),
    k2((0, 1), (0, 2), (1, 0), (1, 3)): Fraction(-1, 24),
    k2((0, 1), (0, 2), (1, 2), (1, 3)): Fraction(-1, 12),
    k2((0, 1), (0, 3), (1, 2), (1, 3)): Fraction(1, 12),
}


def order_two_weights():
    return WeightCollection([(wedge_graph(1), Fraction(1, 2))] + list(ORDER_TWO.items()), max_aerial=2)


def moyal_by_exponential(f, g, order):
    """Moyal product for the constant bivector d1 ^ d2, straight from the exponential."""
    X1, X2 = sympy.symbols("x1 x2")
    F, G = f.as_expr(), g.as_expr()
    out = {}
    for k in range(order + 1):
        term = 0
        for r in range(k + 1):
            # (d1 (x) d2 - d2 (x) d1)^k, r factors of the first kind
            sign = (-1) ** (k - r)
            df = sympy.diff(F, X1, r, X2, k - r) if k else F
            dg = sympy.diff(G, X2, r, X1, k - r) if k else G
            term += sympy.binomial(k, r) * sign * df * dg
        out[k] = sympy.expand(term * sympy.Rational(1, 2**k * math.factorial(k)))
    return {k: v for k, v in out.items() if v != 0}


def test_collection_sign_and_lookup():
    w = WeightCollection()
    g = k2((0, 1), (0, 2), (1, 2), (1, 3))
    w.set(g, Fraction(-1, 12))
    h = relabel(g, [0, 1, 2, 3], [1, 0, 2, 3])
    assert w.get(g) == Fraction(-1, 12)
    assert w.get(h) == Fraction(1, 12)
    with pytest.raises(MissingWeight):
        w.get(wedge_graph(1))
    w.max_aerial = 2
    assert w.get(wedge_graph(1)) == 0


def test_graphs_with_double_edges_carry_zero():
    w = WeightCollection()
    double = k2((0, 2), (0, 2), (1, 2), (1, 3))
    assert canonicalize(double).sign == 0
    with pytest.raises(WeightTableError):
        w.set(double, 1)
    w.set(double, 0)
    assert w.get(double) == 0


def test_normalization_is_validated():
    w = WeightCollection([(wedge_graph(1), Fraction(1, 3))])
    with pytest.raises(WeightTableError):
        w.validate()
    b = WeightCollection([(brane_normalization_graphs()[0], 2)])
    with pytest.raises(WeightTableError):
        b.validate()


def test_json_round_trip():
    w = order_two_weights()
    back = WeightCollection.from_json(w.to_json(), max_aerial=2)
    assert list(back.items()) == list(w.items())


def test_kontsevich_graphs_at_order_two():
    assert len(kontsevich_graphs(2)) == 6
    assert len(kontsevich_graphs(1)) == 1


def test_moyal_commutator():
    w = moyal_weights(3)
    fg = star_product(w, CONSTANT, 3, x1, x2)
    gf = star_product(w, CONSTANT, 3, x2, x1)
    assert fg[0] - gf[0] == 0
    assert fg[1] - gf[1] == 1
    assert set(fg) | set(gf) <= {0, 1}


def test_moyal_matches_exponential_formula():
    rng = random.Random(0)
    for _ in range(4):
        f = R2({(rng.randint(0, 3), rng.randint(0, 3)): rng.randint(1, 5)}) + x1 * x2
        g = R2({(rng.randint(0, 3), rng.randint(0, 3)): rng.randint(1, 5)}) + x2**2
        ours = star_product(moyal_weights(4), CONSTANT, 4, f, g)
        ref = moyal_by_exponential(f, g, 4)
        assert set(ours) == set(ref)
        for k in ref:
            assert sympy.expand(ours[k].as_expr() - ref[k]) == 0


def test_moyal_is_associative():
    f, g, h = x1**2 + x2, x1 * x2**2, x2**3 - x1
    assert associativity_residual(moyal_weights(4), CONSTANT, 4, f, g, h) == {}


def test_moyal_is_not_associative_for_linear_structure():
    f, g, h = x1**2 * x2, x2**2 + x1, x1 * x2
    assert associativity_residual(moyal_weights(2), LINEAR, 2, f, g, h)


@pytest.mark.parametrize("pi", [LINEAR, AFFINE, SU2], ids=["linear", "affine", "su2"])
def test_order_two_weights_are_associative(pi):
    n = pi.n
    R = poly_ring(n)
    gens = R.gens
    f = gens[0] ** 3 + 2 * gens[0] * gens[1]
    g = gens[1] ** 3 - gens[0] ** 2 * gens[1] + gens[0]
    h = gens[0] * gens[1] ** 2 + 3 + gens[-1]
    assert associativity_residual(order_two_weights(), pi, 2, f, g, h) == {}


def test_perturbed_order_two_weight_breaks_associativity():
    w = order_two_weights()
    g = k2((0, 1), (0, 2), (1, 2), (1, 3))
    w.set(g, w.get(g) + Fraction(1, 100))
    f, g2, h = x1**3 + 2 * x1 * x2, x2**3 - x1**2 * x2 + x1, x1 * x2**2 + 3
    assert associativity_residual(w, LINEAR, 2, f, g2, h)


def test_non_poisson_structure_is_rejected():
    bad = PolyVectorField(3, 2, {(1, 2): y2, (0, 1): 1})
    with pytest.raises(ValueError):
        associativity_residual(moyal_weights(2), bad, 2, y1, y2, y3)


def test_partial_table_is_rejected_for_star_products():
    w = WeightCollection([(wedge_graph(1), Fraction(1, 2))])
    with pytest.raises(MissingWeight):
        star_product(w, CONSTANT, 1, x1, x2)


def test_propagated_error_is_zero_without_sigmas_and_positive_with():
    w = order_two_weights()
    f, g, h = x1**3 + 2 * x1 * x2, x2**3 - x1**2 * x2 + x1, x1 * x2**2 + 3
    res, err = associativity_residual_with_error(w, {}, LINEAR, 2, f, g, h)
    assert res == {} and err == {}
    key = canonicalize(k2((0, 1), (0, 2), (1, 2), (1, 3))).key
    res, err = associativity_residual_with_error(w, {key: 0.01}, LINEAR, 2, f, g, h)
    assert res == {} and err and all(v > 0 for v in err.values())


def test_fixture_table_characteristics():
    w = wheel_weight_table(12, duflo_reference_series(12))
    ref = duflo_reference_series(12)
    for kind in ("duflo", "curv", "chain"):
        assert extract_characteristic(w, kind, 12) == ref
    for j in range(2, 13):
        assert w.get(wheel_family("duflo_I", j)) == 0


def test_chain_identification_makes_curv_equal_chain():
    duflo = duflo_reference_series(8)
    curv = series_from_pairs(8, [(2, Fraction(1, 7)), (5, 2)])
    w = wheel_weight_table(8, duflo, curv=curv, chain=duflo)
    before = extract_characteristic(w, "curv", 8) - extract_characteristic(w, "chain", 8)
    for j in range(2, 9):
        w.set(wheel_family("chain_wheel", j), w.get(wheel_family("curv_III", j)))
    after = extract_characteristic(w, "curv", 8) - extract_characteristic(w, "chain", 8)
    assert before != series_from_pairs(8, [])
    assert after == series_from_pairs(8, [])
    assert extract_characteristic(w, "chain", 8) == curv


def test_brane_characteristic():
    rng = random.Random(4)
    entries = [(g, 1) for g in brane_normalization_graphs()]
    ones, bars = {}, {}
    for j in range(2, 7):
        ones[j] = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        bars[j] = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        entries += [(wheel_family("duflo_I", j), ones[j]), (wheel_family("brane_wheel", j), bars[j])]
    w = WeightCollection(entries)
    w.validate()
    s = extract_characteristic(w, "brane", 6)
    assert s.coefficients() == [(ones[j] + bars[j]) / j for j in range(2, 7)]


def test_missing_wheel_is_reported():
    w = wheel_weight_table(4, duflo_reference_series(4))
    with pytest.raises(MissingWeight):
        extract_characteristic(w, "duflo", 5)


@pytest.mark.parametrize("j", [2, 3, 4])
def test_contributors(j):
    one = relation_contributors(wheel_family("duflo_I", j), "cochain_homotopy")
    two = relation_contributors(wheel_family("duflo_II", j), "cochain_homotopy")
    base = canonicalize(wheel_family("homotopy_base", j)).key
    assert [(canonicalize(g).key, m) for g, m in one] == [(base, "gerstenhaber_compose")]
    assert [(canonicalize(g).key, m) for g, m in two] == [(base, "hochschild_attach")]
    module = relation_contributors(wheel_family("module_target", j), "module")
    keys = {canonicalize(g).key for g, _ in module}
    assert keys == {canonicalize(wheel_family("curv_III", j)).key, canonicalize(wheel_family("chain_wheel", j)).key}


def test_contributors_ignore_labels():
    t = wheel_family("module_target", 4)
    perm = [2, 0, 3, 1, 4, 5, 6]
    order = list(reversed(range(t.n_edges)))
    shuffled = relabel(t, perm, order)
    a = sorted((canonicalize(g).key, m) for g, m in relation_contributors(t, "module"))
    b = sorted((canonicalize(g).key, m) for g, m in relation_contributors(shuffled, "module"))
    assert a == b


def test_relation_species_checks():
    with pytest.raises(ValueError):
        relation_contributors(wheel_family("module_target", 3), "cochain_homotopy")
    with pytest.raises(ValueError):
        relation_contributors(wheel_family("duflo_I", 3), "module")
    with pytest.raises(ValueError):
        relation_contributors(wheel_family("duflo_I", 3), "bogus")
