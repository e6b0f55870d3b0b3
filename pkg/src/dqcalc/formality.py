"""Weight collections, star products, characteristic functions and relation contributors.

A weight collection maps canonical Kontsevich, Shoikhet and brane graphs to
rational weights.  Weights are stored against the canonical representative;
``get`` returns the weight of the graph as given, i.e. with the edge-order
sign folded in.
"""
from __future__ import annotations

import itertools
import json
import math
from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from sympy.polys.rings import PolyElement

from .graphs import (
    Graph,
    GraphError,
    brane_normalization_graphs,
    build_graph,
    canonicalize,
    wedge_graph,
    wheel_family,
)
from .poly import (
    PolyVectorField,
    edge_grouping_sign,
    evaluate_kontsevich_operator,
    poly_ring,
    schouten_bracket,
    to_poly,
)
from .series import TruncatedSeries


class WeightTableError(ValueError):
    pass


class MissingWeight(KeyError):
    pass


class WeightCollection:
    """Map from canonical graphs to weights.

    ``max_aerial`` declares the collection total for graphs with at most that
    many aerial vertices: absent graphs of that size have weight 0.  Weights
    are usually ``Fraction``; floats are accepted for Monte Carlo tables.
    """

    def __init__(self, entries: Iterable[tuple[Graph, object]] = (), max_aerial: int | None = None):
        self.max_aerial = max_aerial
        self._w: dict[bytes, object] = {}
        self._g: dict[bytes, Graph] = {}
        for g, w in entries:
            self.set(g, w)

    def set(self, g: Graph, weight) -> None:
        """Set the weight of ``g`` (in its own edge order)."""
        if g.species == "gc2":
            raise GraphError("weight collections hold kontsevich, shoikhet or brane graphs")
        cg = canonicalize(g)
        weight = weight if isinstance(weight, float) else Fraction(weight)
        if cg.sign == 0:
            if weight:
                raise WeightTableError("graph with an odd automorphism must have weight 0")
            return
        self._w[cg.key] = weight * cg.sign
        self._g[cg.key] = cg.graph

    def get(self, g: Graph):
        cg = canonicalize(g)
        if cg.sign == 0:
            return Fraction(0)
        if cg.key in self._w:
            return self._w[cg.key] * cg.sign
        if self.max_aerial is not None and g.aerial <= self.max_aerial:
            return Fraction(0)
        raise MissingWeight(f"no weight for graph {g.edges} ({g.species})")

    def __contains__(self, g: Graph) -> bool:
        return canonicalize(g).key in self._w

    def items(self):
        """``(representative, weight)`` pairs in key order."""
        for k in sorted(self._w):
            yield self._g[k], self._w[k]

    def __len__(self):
        return len(self._w)

    def copy(self) -> "WeightCollection":
        out = WeightCollection(max_aerial=self.max_aerial)
        out._w = dict(self._w)
        out._g = dict(self._g)
        return out

    def validate(self) -> None:
        """Check the normalization constraints: wedge 1/2, brane normalization graphs 1."""
        w = wedge_graph(1)
        if w in self and self.get(w) != Fraction(1, 2):
            raise WeightTableError(f"wedge weight must be 1/2, got {self.get(w)}")
        for g in brane_normalization_graphs():
            if g in self and self.get(g) != 1:
                raise WeightTableError(f"brane normalization graph {g.to_json()} must have weight 1")

    def to_json(self) -> str:
        rows = [{"graph": g.to_dict(), "weight": str(w)} for g, w in self.items()]
        return json.dumps(rows, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str, max_aerial: int | None = None, validate: bool = True) -> "WeightCollection":
        data = json.loads(text)
        if isinstance(data, dict):
            max_aerial = data.get("max_aerial", max_aerial)
            data = data["weights"]
        out = cls(max_aerial=max_aerial)
        for row in data:
            out.set(Graph.from_dict(row["graph"]), Fraction(row["weight"]))
        if validate:
            out.validate()
        return out


def moyal_weights(order: int) -> WeightCollection:
    """``(1/2)^k`` on the ``k``-fold wedge for ``k <= order``, zero on every other graph."""
    if order < 1:
        raise ValueError("order must be at least 1")
    return WeightCollection(((wedge_graph(k), Fraction(1, 2**k)) for k in range(1, order + 1)), max_aerial=order)


def kontsevich_graphs(k: int, m: int = 2, out_degree: int = 2) -> list[Graph]:
    """Representatives of the nonzero classes of Kontsevich graphs with every
    aerial vertex of the given out-degree."""
    found: dict[bytes, Graph] = {}
    n = k + m
    choices = [list(itertools.combinations([t for t in range(n) if t != v], out_degree)) for v in range(k)]
    for picks in itertools.product(*choices):
        edges = [(v, t) for v, targets in enumerate(picks) for t in targets]
        g = build_graph("kontsevich", k, m, edges)
        cg = canonicalize(g)
        if cg.sign and cg.key not in found:
            found[cg.key] = cg.graph
    return [found[key] for key in sorted(found)]


# ---------------------------------------------------------------------------
# star products


def _check_total(w: WeightCollection, order: int) -> None:
    if w.max_aerial is None or w.max_aerial < order:
        raise MissingWeight(f"weight collection is not total up to {order} aerial vertices")


def _star_terms(w: WeightCollection, pi: PolyVectorField, order: int):
    """``(k, prefactor, operator)`` for every weighted bivector graph with two ground vertices."""
    n = pi.n
    out = []
    for g, c in w.items():
        if g.species != "kontsevich" or g.ground != 2 or not 1 <= g.aerial <= order:
            continue
        if any(g.out_degree(v) != 2 for v in range(g.aerial)) or not c:
            continue
        op = evaluate_kontsevich_operator(g, [pi] * g.aerial, n)
        if not op.terms:
            continue
        aut = canonicalize(g).automorphisms
        out.append((g.aerial, c * edge_grouping_sign(g) / aut, op))
    return out


def _as_poly_coeff(n: int, c) -> PolyElement:
    if isinstance(c, float):
        c = Fraction(c)
    return to_poly(n, Fraction(c))


def _star_series(terms, n: int, order: int, f: Mapping[int, PolyElement], g: Mapping[int, PolyElement]) -> dict[int, PolyElement]:
    out: dict[int, PolyElement] = defaultdict(lambda: poly_ring(n)(0))
    for a, fa in f.items():
        for b, gb in g.items():
            if a + b > order or not fa or not gb:
                continue
            out[a + b] += fa * gb
            for k, c, op in terms:
                if a + b + k <= order:
                    out[a + b + k] += _as_poly_coeff(n, c) * op(fa, gb)
    return {k: v for k, v in out.items() if v}


def _check_bivector(pi: PolyVectorField) -> None:
    if pi.coeffs and pi.degree != 2:
        raise ValueError("pi must be a bivector field")


def star_product(w: WeightCollection, pi: PolyVectorField, order: int, f, g) -> dict[int, PolyElement]:
    """``f * g = fg + sum_k hbar^k sum_Gamma c_Gamma D_Gamma(pi..)(f, g) / |Aut Gamma|``.

    The sum runs over classes of graphs with ``k`` aerial vertices; dividing
    by the automorphism count equals the ``1/k!`` sum over labelled graphs.
    Returns ``{power of hbar: coefficient polynomial}``.
    """
    _check_bivector(pi)
    _check_total(w, order)
    n = pi.n
    terms = _star_terms(w, pi, order)
    return _star_series(terms, n, order, {0: to_poly(n, f)}, {0: to_poly(n, g)})


def _associator(terms, n, order, f, g, h):
    F, G, H = ({0: to_poly(n, x)} for x in (f, g, h))
    left = _star_series(terms, n, order, _star_series(terms, n, order, F, G), H)
    right = _star_series(terms, n, order, F, _star_series(terms, n, order, G, H))
    out = {}
    for k in set(left) | set(right):
        d = left.get(k, 0) - right.get(k, 0)
        if d:
            out[k] = d
    return out


def associativity_residual(w: WeightCollection, pi: PolyVectorField, order: int, f, g, h, check_poisson: bool = True) -> dict[int, PolyElement]:
    """``(f*g)*h - f*(g*h)`` through ``hbar^order``."""
    _check_bivector(pi)
    if check_poisson and pi.coeffs and schouten_bracket(pi, pi).coeffs:
        raise ValueError("pi is not Poisson; associativity is not expected")
    if order == 0:
        return {}
    _check_total(w, order)
    return _associator(_star_terms(w, pi, order), pi.n, order, f, g, h)


def associativity_residual_with_error(
    w: WeightCollection, sigmas: Mapping[bytes, float], pi: PolyVectorField, order: int, f, g, h
):
    """Residual at ``hbar^order`` and its propagated Monte Carlo error per monomial.

    ``sigmas`` maps canonical keys of estimated graphs to standard errors.  The
    top-order residual is affine in the top-order weights, so each weight's
    sensitivity is an exact finite difference.
    """
    base = associativity_residual(w, pi, order, f, g, h).get(order)
    base_terms = dict(base.terms()) if base else {}
    var: dict = defaultdict(float)
    for g_rep, _ in list(w.items()):
        key = canonicalize(g_rep).key
        s = sigmas.get(key)
        if not s:
            continue
        bumped = w.copy()
        bumped.set(g_rep, Fraction(w.get(g_rep)) + 1)
        diff = associativity_residual(bumped, pi, order, f, g, h).get(order)
        if diff is None and base is None:
            continue
        delta = (diff if diff is not None else 0) - (base if base is not None else 0)
        if not delta:
            continue
        for mono, c in delta.terms():
            var[mono] += (float(c) * s) ** 2
    residual = {m: float(c) for m, c in base_terms.items()}
    error = {m: math.sqrt(v) for m, v in var.items()}
    return residual, error


# ---------------------------------------------------------------------------
# characteristic functions


CHARACTERISTIC_KINDS = ("duflo", "curv", "chain", "brane")


def extract_characteristic(w: WeightCollection, kind: str, order: int) -> TruncatedSeries:
    """``sum_{j=2..order} lambda_j x^j`` read off the wheel weights.

    duflo: ``(c(I_j) - c(II_j))/j``; curv: ``c(III_j)/j``; chain:
    ``c~(chain_j)/j``; brane: ``(c(I_j) + c(brane_j))/j``.
    """
    if kind not in CHARACTERISTIC_KINDS:
        raise ValueError(f"unknown characteristic kind {kind!r}")
    coeffs = {}
    floats = False
    for j in range(2, order + 1):
        if kind == "duflo":
            c = w.get(wheel_family("duflo_I", j)) - w.get(wheel_family("duflo_II", j))
        elif kind == "curv":
            c = w.get(wheel_family("curv_III", j))
        elif kind == "chain":
            c = w.get(wheel_family("chain_wheel", j))
        else:
            c = w.get(wheel_family("duflo_I", j)) + w.get(wheel_family("brane_wheel", j))
        floats = floats or isinstance(c, float)
        coeffs[j] = c / j
    return TruncatedSeries(order, coeffs, exact=not floats)


def wheel_weight_table(order: int, duflo: TruncatedSeries, curv: TruncatedSeries | None = None,
                       chain: TruncatedSeries | None = None, c_one: Mapping[int, Fraction] | None = None) -> WeightCollection:
    """Weights on the wheel families realising given characteristic series.

    ``c(I_j)`` comes from ``c_one`` (default 0), ``c(II_j) = c(I_j) - j lambda_j^Duflo``,
    ``c(III_j) = j lambda_j^curv`` and ``c~(chain_j) = j lambda_j^chain``.
    """
    curv = curv if curv is not None else duflo
    chain = chain if chain is not None else curv
    c_one = c_one or {}
    out = WeightCollection()
    for j in range(2, order + 1):
        c1 = Fraction(c_one.get(j, 0))
        out.set(wheel_family("duflo_I", j), c1)
        out.set(wheel_family("duflo_II", j), c1 - j * duflo[j])
        out.set(wheel_family("curv_III", j), j * curv[j])
        out.set(wheel_family("chain_wheel", j), j * chain[j])
    return out


# ---------------------------------------------------------------------------
# relation contributors


RELATIONS = ("cochain_homotopy", "module")
MAX_RELATION_VERTICES = 12


def _parity(order: Sequence[int]) -> int:
    inv = sum(1 for a, b in itertools.combinations(order, 2) if a > b)
    return -1 if inv % 2 else 1


def _try_build(species, k, m, edges, distinguished=None) -> Graph | None:
    try:
        return build_graph(species, k, m, edges, distinguished)
    except GraphError:
        return None


def _has_parallel(edges) -> bool:
    return len(set(edges)) != len(edges)


def _contract(g: Graph, e: int) -> Graph | None:
    """Contract the aerial edge ``e``; ``None`` when a tadpole or double edge appears."""
    a, b = g.edges[e]
    keep, drop = min(a, b), max(a, b)

    def m(x):
        x = keep if x == drop else x
        return x - 1 if x > drop else x

    edges = [(m(s), m(t)) for i, (s, t) in enumerate(g.edges) if i != e]
    if any(s == t for s, t in edges) or _has_parallel(edges):
        return None
    return _try_build(g.species, g.aerial - 1, g.ground, edges)


def _schouten_terms(s: Graph):
    """Vertex splittings of aerial vertices with the new edge first (both directions)."""
    k = s.aerial
    shift = lambda x: x + 1 if x >= k else x  # noqa: E731
    for v in range(k):
        inc = [i for i, (p, q) in enumerate(s.edges) if v in (p, q)]
        for mask in itertools.product((0, 1), repeat=len(inc)):
            moved = {i for i, bit in zip(inc, mask) if bit}
            body = []
            for i, (p, q) in enumerate(s.edges):
                p2, q2 = shift(p), shift(q)
                if i in moved:
                    p2 = k if p == v else p2
                    q2 = k if q == v else q2
                body.append((p2, q2))
            for new in ((v, k), (k, v)):
                edges = [new] + body
                if _has_parallel(edges):
                    continue
                g = _try_build(s.species, k + 1, s.ground, edges)
                if g is not None:
                    yield 1, g


def _ground_split_terms(s: Graph, cyclic: bool):
    """Hochschild (co)boundary terms: ground vertex ``i`` splits into adjacent
    ``i, i+1`` with sign ``(-1)^i``; the cochain version adds empty end slots,
    the cyclic version the wrap-around term."""
    k, m = s.aerial, s.ground
    total = m + 1
    if not cyclic:
        yield 1, _try_build(s.species, k, total, [(p, q + 1 if q >= k else q) for p, q in s.edges])
        yield (-1) ** (total), _try_build(s.species, k, total, list(s.edges))
    for i in range(m):
        g = k + i
        inc = [e for e, (_, q) in enumerate(s.edges) if q == g]
        for mask in itertools.product((0, 1), repeat=len(inc)):
            moved = {e for e, bit in zip(inc, mask) if bit}
            edges = []
            for e, (p, q) in enumerate(s.edges):
                q2 = q + 1 if q > g or (e in moved) else q
                edges.append((p, q2))
            sign = (-1) ** (i + 1) if not cyclic else (-1) ** i
            yield sign, _try_build(s.species, k, total, edges)
    if cyclic and m >= 1:
        g0 = k
        inc = [e for e, (_, q) in enumerate(s.edges) if q == g0]
        for mask in itertools.product((0, 1), repeat=len(inc)):
            moved = {e for e, bit in zip(inc, mask) if bit}
            edges = [(p, k + m if e in moved else q) for e, (p, q) in enumerate(s.edges)]
            yield (-1) ** m, _try_build(s.species, k, total, edges)


def _coefficient(terms, target_key: bytes) -> int:
    total = 0
    for sign, g in terms:
        if g is None:
            continue
        cg = canonicalize(g)
        if cg.key == target_key and cg.sign:
            total += sign * cg.sign
    return total


def _sub_graph(species, aerial: Sequence[int], ground: Sequence[int], edges, target_map, distinguished=None):
    """Relabel a piece of a graph; returns the graph and the original edge ids."""
    index = {v: i for i, v in enumerate(aerial)}
    index.update({v: len(aerial) + i for i, v in enumerate(ground)})
    out, ids = [], []
    for e, (p, q) in edges:
        out.append((index[p], index[target_map(q)] if target_map(q) in index else None))
        ids.append(e)
    if any(t is None for _, t in out):
        return None, ids
    if any(p == t for p, t in out) or _has_parallel(out):
        return None, ids
    return _try_build(species, len(aerial), len(ground), out, distinguished), ids


def _closed(g: Graph, subset: set[int], allowed: set[int]) -> bool:
    return all(q in subset or q in allowed for p, q in g.edges if p in subset)


def _homotopy_count(g: Graph) -> bool:
    return g.n_edges == 2 * g.aerial + g.ground - 1


def _u_count(g: Graph) -> bool:
    return g.n_edges == 2 * g.aerial + g.ground - 2


def _composition_decompositions(t: Graph, cyclic: bool):
    """Split ``t`` into an inner operator on a (cyclic) ground interval and an outer graph.

    Yields ``(inner, outer, sign)`` where ``inner`` uses the aerial subset
    closed under out-edges plus the interval, and ``outer`` sees the interval
    collapsed to one ground vertex (or a new one when the interval is empty).
    The sign is the parity of the target's edges rearranged as outer edges
    followed by inner edges, times the canonical signs of both pieces and the
    position sign ``(-1)^(i (r-1))``.
    """
    k, m = t.aerial, t.ground
    grounds = list(range(k, k + m))
    intervals = []
    if cyclic:
        for r in range(1, m + 1):
            for l in range(m if r < m else 1):
                intervals.append((l, [grounds[(l + i) % m] for i in range(r)]))
        # empty interval: a new slot after each existing slot
        intervals += [(l, []) for l in range(1, m + 1)]
    else:
        for l in range(m + 1):
            for r in range(m - l + 1):
                intervals.append((l, grounds[l:l + r]))
    for l, interval in intervals:
        iset = set(interval)
        for size in range(1, k):
            for inner_aerial in itertools.combinations(range(k), size):
                a2 = set(inner_aerial)
                if not _closed(t, a2, iset):
                    continue
                outer_aerial = [v for v in range(k) if v not in a2]
                inner_edges = [(e, pq) for e, pq in enumerate(t.edges) if pq[0] in a2]
                outer_edges = [(e, pq) for e, pq in enumerate(t.edges) if pq[0] not in a2]
                inner, inner_ids = _sub_graph("kontsevich", inner_aerial, interval, inner_edges, lambda q: q)
                if inner is None:
                    continue
                # outer ground vertices: the others in order, the collapsed one at position l
                if cyclic and interval and grounds[0] in iset:
                    rest = [g for g in grounds if g not in iset]
                    outer_ground = ["c"] + rest
                else:
                    rest_before = [g for g in grounds[:l] if g not in iset]
                    rest_after = [g for g in grounds[l:] if g not in iset]
                    outer_ground = rest_before + ["c"] + rest_after
                collapse = lambda q: "c" if (q in a2 or q in iset) else q  # noqa: E731
                outer, outer_ids = _sub_graph(t.species, outer_aerial, outer_ground, outer_edges, collapse)
                if outer is None:
                    continue
                perm = outer_ids + inner_ids
                ci, co = canonicalize(inner), canonicalize(outer)
                if not ci.sign or not co.sign:
                    continue
                slot = outer_ground.index("c")
                sign = _parity(perm) * ci.sign * co.sign * (-1) ** (slot * (len(interval) - 1))
                yield inner, outer, sign


def _form_action_decompositions(t: Graph):
    for v in range(t.aerial):
        if t.in_degree(v):
            continue
        rest = [u for u in range(t.aerial) if u != v]
        own = [e for e, (p, _) in enumerate(t.edges) if p == v]
        others = [(e, pq) for e, pq in enumerate(t.edges) if pq[0] != v]
        sub, ids = _sub_graph(t.species, rest, list(range(t.aerial, t.n_vertices)), others, lambda q: q)
        if sub is None:
            continue
        cs = canonicalize(sub)
        if cs.sign:
            yield sub, _parity(own + ids) * cs.sign


def relation_contributors(target: Graph, relation: str) -> list[tuple[Graph, str]]:
    """Graphs whose relation terms contain ``target`` with nonzero coefficient.

    ``cochain_homotopy`` considers the homotopy components (graphs with
    ``2k + m - 1`` edges) through ``schouten_contract`` (a split aerial vertex),
    ``hochschild_attach`` (a split or added ground vertex) and
    ``gerstenhaber_compose`` (composition with a morphism component at a
    ground vertex).  ``module`` considers ``schouten_contract``,
    ``hochschild_boundary`` (cyclic slot merging), ``chain_boundary``
    (a Kontsevich component acting on chain slots) and ``form_action``
    (a field acting on the output form).  Coefficients are summed with signs
    per source and partner; pieces with a single aerial vertex are the fixed
    one-vertex components and are not reported.
    """
    if relation not in RELATIONS:
        raise ValueError(f"unknown relation {relation!r}")
    if target.n_vertices > MAX_RELATION_VERTICES:
        raise ValueError(f"target has more than {MAX_RELATION_VERTICES} vertices")
    if relation == "cochain_homotopy" and target.species != "kontsevich":
        raise GraphError("cochain homotopy targets are kontsevich graphs")
    if relation == "module" and target.species != "shoikhet":
        raise GraphError("module relation targets are shoikhet graphs")
    tkey = canonicalize(target).key
    found: dict[tuple[bytes, str], Graph] = {}

    def report(g: Graph, mech: str) -> None:
        if g.aerial < 2:
            return
        cg = canonicalize(g)
        found.setdefault((cg.key, mech), cg.graph)

    # vertex splitting
    seen = set()
    for e, (p, q) in enumerate(target.edges):
        if q >= target.aerial:
            continue
        s = _contract(target, e)
        if s is None:
            continue
        cs = canonicalize(s)
        if not cs.sign or cs.key in seen:
            continue
        seen.add(cs.key)
        if relation == "cochain_homotopy" and not _homotopy_count(cs.graph):
            continue
        if _coefficient(_schouten_terms(cs.graph), tkey):
            report(cs.graph, "schouten_contract")

    # ground splitting
    cyclic = relation == "module"
    seen = set()
    for s in _ground_merges(target, cyclic):
        cs = canonicalize(s)
        if not cs.sign or cs.key in seen:
            continue
        seen.add(cs.key)
        if relation == "cochain_homotopy" and not _homotopy_count(cs.graph):
            continue
        if _coefficient(_ground_split_terms(cs.graph, cyclic), tkey):
            report(cs.graph, "hochschild_boundary" if cyclic else "hochschild_attach")

    # compositions
    sums: dict[tuple[bytes, bytes, str], int] = defaultdict(int)
    pieces: dict[bytes, Graph] = {}
    for inner, outer, sign in _composition_decompositions(target, cyclic):
        if relation == "cochain_homotopy":
            if _homotopy_count(inner) and _u_count(outer):
                src, partner, role = inner, outer, "inner"
            elif _homotopy_count(outer) and _u_count(inner):
                src, partner, role = outer, inner, "outer"
            else:
                continue
            mech = "gerstenhaber_compose"
        else:
            if not _u_count(inner):
                continue
            src, partner, role = inner, outer, "inner"
            mech = "chain_boundary"
        ks, kp = canonicalize(src), canonicalize(partner)
        pieces[ks.key], pieces[kp.key] = ks.graph, kp.graph
        sums[(ks.key, kp.key, mech + "|" + role)] += sign
    for (ks, kp, tag), total in sums.items():
        if total:
            mech = tag.split("|")[0]
            report(pieces[ks], mech)
            if relation == "module":
                report(pieces[kp], mech)

    if relation == "module":
        fsums: dict[bytes, int] = defaultdict(int)
        for sub, sign in _form_action_decompositions(target):
            cs = canonicalize(sub)
            pieces[cs.key] = cs.graph
            fsums[cs.key] += sign
        for key, total in fsums.items():
            if total:
                report(pieces[key], "form_action")

    return [(found[k], k[1]) for k in sorted(found)]


def _ground_merges(t: Graph, cyclic: bool):
    """Graphs whose ground splitting can produce ``t``: adjacent ground vertices
    merged, plus (cochain case) an isolated end vertex removed."""
    k, m = t.aerial, t.ground
    for i in range(m - 1):
        a = k + i
        edges = [(p, q - 1 if q > a else q) for p, q in t.edges]
        if not _has_parallel(edges):
            g = _try_build(t.species, k, m - 1, edges)
            if g is not None:
                yield g
    if cyclic and m >= 2:
        last = k + m - 1
        edges = [(p, k if q == last else q) for p, q in t.edges]
        if not _has_parallel(edges):
            g = _try_build(t.species, k, m - 1, edges)
            if g is not None:
                yield g
    if not cyclic and m >= 1:
        for end in (k, k + m - 1):
            if t.in_degree(end) == 0:
                edges = [(p, q - 1 if q > end else q) for p, q in t.edges]
                g = _try_build(t.species, k, m - 1, edges)
                if g is not None:
                    yield g
