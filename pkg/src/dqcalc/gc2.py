"""The graph complex GC2: degree, vertex-splitting differential, insertion bracket.

Orientation of a gc2 graph is an ordering of its edges; permuting the edges
multiplies the graph by the sign of the permutation.  The degree of a graph
with ``v`` vertices and ``e`` edges is ``2(v - 1) - e``.
"""
from __future__ import annotations

import itertools
import json
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .graphs import CanonicalGraph, Graph, GraphError, build_graph, canonicalize, wheel_family


class GraphVector:
    """Finite rational combination of canonical gc2 graphs.

    Zero coefficients and graphs with an odd automorphism are never stored.
    """

    __slots__ = ("_terms", "_graphs")

    def __init__(self, terms: Iterable[tuple[Graph, Fraction | int]] = ()):
        self._terms: dict[bytes, Fraction] = {}
        self._graphs: dict[bytes, Graph] = {}
        for g, c in terms:
            self._add(g, Fraction(c))

    def _add(self, g: Graph, c: Fraction) -> None:
        if g.species != "gc2":
            raise GraphError("GraphVector holds gc2 graphs only")
        cg = canonicalize(g)
        self._add_canonical(cg, c * cg.sign)

    def _add_canonical(self, cg: CanonicalGraph, c: Fraction) -> None:
        if not c or cg.sign == 0:
            return
        total = self._terms.get(cg.key, 0) + c
        if total:
            self._terms[cg.key] = total
            self._graphs[cg.key] = cg.graph
        else:
            self._terms.pop(cg.key, None)
            self._graphs.pop(cg.key, None)

    @classmethod
    def _from_raw(cls, terms: Mapping[bytes, Fraction], graphs: Mapping[bytes, Graph]):
        out = cls()
        for k, c in terms.items():
            if c:
                out._terms[k] = Fraction(c)
                out._graphs[k] = graphs[k]
        return out

    @classmethod
    def from_graph(cls, g: Graph, coeff=1) -> "GraphVector":
        return cls([(g, coeff)])

    def items(self) -> Iterator[tuple[Graph, Fraction]]:
        for k in sorted(self._terms):
            yield self._graphs[k], self._terms[k]

    def coefficient(self, g: Graph) -> Fraction:
        """Coefficient of ``g`` (with its own edge order) in this vector."""
        cg = canonicalize(g)
        if cg.sign == 0:
            return Fraction(0)
        return self._terms.get(cg.key, Fraction(0)) * cg.sign

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self._terms
        if not isinstance(other, GraphVector):
            return NotImplemented
        return self._terms == other._terms

    def __add__(self, other: "GraphVector") -> "GraphVector":
        terms = dict(self._terms)
        graphs = dict(self._graphs)
        for k, c in other._terms.items():
            terms[k] = terms.get(k, 0) + c
            graphs[k] = other._graphs[k]
        return GraphVector._from_raw(terms, graphs)

    def __neg__(self):
        return GraphVector._from_raw({k: -c for k, c in self._terms.items()}, self._graphs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        scalar = Fraction(scalar)
        return GraphVector._from_raw({k: c * scalar for k, c in self._terms.items()}, self._graphs)

    __rmul__ = __mul__

    def __repr__(self):
        parts = [f"{c}*{g.edges}" for g, c in self.items()]
        return "GraphVector(" + " + ".join(parts) + ")" if parts else "GraphVector(0)"

    def degrees(self) -> set[int]:
        return {gc_degree(g) for g, _ in self.items()}

    def to_json(self) -> str:
        rows = [{"graph": g.to_dict(), "coeff": str(c)} for g, c in self.items()]
        return json.dumps(rows, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "GraphVector":
        rows = json.loads(text)
        return cls((Graph.from_dict(r["graph"]), Fraction(r["coeff"])) for r in rows)


def gc_degree(g: Graph) -> int:
    if g.species != "gc2":
        raise GraphError("gc_degree is defined for gc2 graphs")
    return 2 * (g.n_vertices - 1) - g.n_edges


def split_vertex_terms(g: Graph) -> Iterator[Graph]:
    """All splittings of a vertex into two at-least-trivalent vertices.

    Each unordered split appears once; the new vertex gets the last index and
    the new edge comes first in the edge order.
    """
    n = g.n_vertices
    for v in range(n):
        inc = [i for i, e in enumerate(g.edges) if v in e]
        d = len(inc)
        if d < 4:
            continue
        first, rest = inc[0], inc[1:]
        for size in range(1, d - 2):
            for chosen in itertools.combinations(rest, size):
                moved = {first, *chosen}
                if d - len(moved) < 2:
                    continue
                edges = [(v, n)]
                for i, (a, b) in enumerate(g.edges):
                    if i in moved:
                        a, b = (n if a == v else a), (n if b == v else b)
                    edges.append((a, b))
                yield build_graph("gc2", n + 1, 0, edges)


def gc_differential(vec: GraphVector) -> GraphVector:
    """Vertex-splitting differential; raises the degree by one."""
    out = GraphVector()
    for g, c in vec.items():
        for h in split_vertex_terms(g):
            out._add(h, c)
    return out


def insertions(a: Graph, b: Graph) -> Iterator[Graph]:
    """Terms of ``a o b``: ``b`` inserted at each vertex of ``a``.

    The edges of ``a`` incident to the removed vertex are reattached to
    vertices of ``b`` in every way.  Edges of ``a`` precede those of ``b``.
    Terms violating the gc2 rules are skipped.
    """
    na, nb = a.n_vertices, b.n_vertices
    for v in range(na):
        shift = lambda x: x if x < v else x - 1  # noqa: E731
        inc = [i for i, e in enumerate(a.edges) if v in e]
        for targets in itertools.product(range(nb), repeat=len(inc)):
            place = dict(zip(inc, targets))
            edges = []
            for i, (s, t) in enumerate(a.edges):
                if i in place:
                    u = na - 1 + place[i]
                    other = t if s == v else s
                    edges.append((shift(other), u))
                else:
                    edges.append((shift(s), shift(t)))
            edges += [(na - 1 + s, na - 1 + t) for s, t in b.edges]
            try:
                yield build_graph("gc2", na + nb - 1, 0, edges)
            except GraphError:
                continue


def _pre_lie(a: GraphVector, b: GraphVector) -> GraphVector:
    out = GraphVector()
    for ga, ca in a.items():
        for gb, cb in b.items():
            for h in insertions(ga, gb):
                out._add(h, ca * cb)
    return out


def gc_bracket(a: GraphVector, b: GraphVector) -> GraphVector:
    """``[a, b] = a o b - (-1)^{|a||b|} b o a`` on homogeneous parts."""
    out = GraphVector()
    for ga, ca in a.items():
        for gb, cb in b.items():
            sign = -1 if (gc_degree(ga) * gc_degree(gb)) % 2 else 1
            for h in insertions(ga, gb):
                out._add(h, ca * cb)
            for h in insertions(gb, ga):
                out._add(h, -sign * ca * cb)
    return out


def wheel_coefficient(vec: GraphVector, n: int) -> Fraction:
    """Coefficient of the ``n``-spoke wheel (printed orientation) in ``vec``."""
    if n < 3:
        return Fraction(0)
    return vec.coefficient(wheel_family("gc2_wheel", n))


def is_cocycle(vec: GraphVector) -> bool:
    return not gc_differential(vec)


# ---------------------------------------------------------------------------
# enumeration


def gc2_graphs(n_vertices: int, n_edges: int | None = None) -> list[Graph]:
    """Representatives of all nonzero gc2 classes with the given size."""
    pairs = list(itertools.combinations(range(n_vertices), 2))
    lo = (3 * n_vertices + 1) // 2
    sizes = [n_edges] if n_edges is not None else range(lo, len(pairs) + 1)
    found: dict[bytes, Graph] = {}
    for e in sizes:
        if e is None or e < lo or e > len(pairs):
            continue
        for chosen in itertools.combinations(pairs, e):
            deg = [0] * n_vertices
            for a, b in chosen:
                deg[a] += 1
                deg[b] += 1
            if min(deg) < 3:
                continue
            try:
                g = build_graph("gc2", n_vertices, 0, chosen)
            except GraphError:
                continue
            cg = canonicalize(g)
            if cg.sign and cg.key not in found:
                found[cg.key] = cg.graph
    return [found[k] for k in sorted(found)]


def contract_edge(g: Graph, e: int) -> Graph | None:
    """Contract edge ``e`` of a gc2 graph; ``None`` if the result is not a gc2 graph."""
    a, b = g.edges[e]

    def m(x):
        x = a if x == b else x
        return x - 1 if x > b else x

    edges = [(m(s), m(t)) for i, (s, t) in enumerate(g.edges) if i != e]
    try:
        return build_graph("gc2", g.n_vertices - 1, 0, edges)
    except GraphError:
        return None


def wheel_cocycle(n: int) -> GraphVector:
    """A degree-0 cocycle whose ``n``-wheel coefficient is 1 (``n`` odd).

    The support is grown from the wheel: every graph whose differential can
    meet a term of the differential of the current support is added, until
    nothing changes.  A cocycle restricted to such a closed block is still a
    cocycle, so solving ``d x = 0`` on the block is enough.
    """
    from sympy import Matrix, Rational

    if n < 3 or n % 2 == 0:
        raise ValueError("wheel cocycles exist for odd n >= 3")
    wheel = canonicalize(wheel_family("gc2_wheel", n))
    basis = {wheel.key: wheel.graph}
    images: dict[bytes, GraphVector] = {}
    frontier = [wheel.key]
    while frontier:
        fresh = []
        for key in frontier:
            images[key] = gc_differential(GraphVector.from_graph(basis[key]))
            for h, _ in images[key].items():
                for e in range(h.n_edges):
                    c = contract_edge(h, e)
                    if c is None:
                        continue
                    cc = canonicalize(c)
                    if cc.sign and cc.key not in basis:
                        basis[cc.key] = cc.graph
                        fresh.append(cc.key)
        frontier = fresh
    keys = sorted(basis)
    rows = sorted({k for im in images.values() for k in im._terms})
    index = {k: i for i, k in enumerate(rows)}
    m = Matrix.zeros(len(rows), len(keys))
    for j, key in enumerate(keys):
        for k, c in images[key]._terms.items():
            m[index[k], j] = Rational(c.numerator, c.denominator)
    w_col = keys.index(wheel.key)
    for vec in m.nullspace():
        if vec[w_col] != 0:
            vec = vec / vec[w_col]
            out = GraphVector(
                (basis[key], Fraction(int(c.p), int(c.q))) for key, c in zip(keys, vec) if c != 0
            )
            # normalize against the printed wheel orientation
            return out * (1 / wheel_coefficient(out, n))
    raise ValueError(f"no cocycle with a nonzero {n}-wheel coefficient")


# ---------------------------------------------------------------------------
# action on wheel weights


def act_on_wheel_weights(w, vec: GraphVector):
    """Shift wheel weights by the wheel coefficients of a degree-0 cocycle.

    For odd ``j`` the weights of ``duflo_I(j)`` and ``curv_III(j)`` both move
    by ``wheel_coefficient(vec, j)``; ``duflo_II`` weights are untouched.
    """
    if vec and vec.degrees() != {0}:
        raise ValueError("the acting vector must have degree 0")
    if not is_cocycle(vec):
        raise ValueError("the acting vector is not closed")
    out = w.copy()
    for j in sorted({g.n_vertices - 1 for g, _ in vec.items()}):
        if j < 3 or j % 2 == 0:
            continue
        q = wheel_coefficient(vec, j)
        if not q:
            continue
        for kind in ("duflo_I", "curv_III"):
            g = wheel_family(kind, j)
            out.set(g, w.get(g) + q)
    return out
