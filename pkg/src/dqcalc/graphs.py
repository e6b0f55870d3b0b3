"""Graph species, validation, signed canonical forms and the named wheel families.

Vertices are integers.  Aerial (type I) vertices come first, ``0..k-1``;
ground (type II) vertices follow, ``k..k+m-1``.  The position of an edge in
``Graph.edges`` is its place in the edge ordering, which fixes orientation.

Species:

``kontsevich``
    directed, ground vertices linearly ordered on the real line.
``shoikhet``
    directed, ground vertices are the boundary slots of the disk; slot 0
    (vertex ``k``) carries ``a0`` and the cyclic order is kept, so every
    slot is fixed under isomorphism.
``brane``
    kontsevich graph with at most one distinguished ground vertex.
``gc2``
    undirected, connected, every vertex at least trivalent, no multiple
    edges.  All vertices are stored as aerial.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

SPECIES = ("kontsevich", "shoikhet", "brane", "gc2")
DIRECTED = ("kontsevich", "shoikhet", "brane")

WHEEL_KINDS = (
    "duflo_I",
    "duflo_II",
    "curv_III",
    "chain_wheel",
    "homotopy_base",
    "brane_wheel",
    "gc2_wheel",
    "module_target",
    "tetrahedron",
)

MAX_CANONICAL_VERTICES = 16


class GraphError(ValueError):
    """Raised for graphs violating the rules of their species."""


@dataclass(frozen=True)
class Graph:
    species: str
    aerial: int
    ground: int
    edges: tuple[tuple[int, int], ...]
    distinguished: int | None = None

    def __post_init__(self):
        _validate(self)

    @property
    def n_vertices(self) -> int:
        return self.aerial + self.ground

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def out_degree(self, v: int) -> int:
        return sum(1 for s, _ in self.edges if s == v)

    def in_degree(self, v: int) -> int:
        return sum(1 for _, t in self.edges if t == v)

    def valence(self, v: int) -> int:
        return sum((s == v) + (t == v) for s, t in self.edges)

    def out_edges(self, v: int) -> list[int]:
        """Positions of the edges leaving ``v``, in edge order."""
        return [i for i, (s, _) in enumerate(self.edges) if s == v]

    def in_edges(self, v: int) -> list[int]:
        return [i for i, (_, t) in enumerate(self.edges) if t == v]

    def to_dict(self) -> dict:
        return {
            "species": self.species,
            "aerial": self.aerial,
            "ground": self.ground,
            "distinguished": self.distinguished,
            "edges": [list(e) for e in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "Graph":
        return build_graph(
            data["species"],
            data.get("aerial", 0),
            data.get("ground", 0),
            data.get("edges", []),
            distinguished=data.get("distinguished"),
        )

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        return cls.from_dict(json.loads(text))


def _connected(n: int, edges: Iterable[tuple[int, int]]) -> bool:
    if n == 0:
        return True
    adj: dict[int, set[int]] = {v: set() for v in range(n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def _validate(g: Graph) -> None:
    if g.species not in SPECIES:
        raise GraphError(f"unknown species {g.species!r}")
    if g.aerial < 0 or g.ground < 0:
        raise GraphError("vertex counts must be nonnegative")
    n = g.n_vertices
    for e in g.edges:
        if len(e) != 2:
            raise GraphError(f"malformed edge {e!r}")
        s, t = e
        if not (0 <= s < n and 0 <= t < n):
            raise GraphError(f"edge {e} out of range for {n} vertices")
        if s == t:
            raise GraphError(f"tadpole edge {e}")
    if g.species == "gc2":
        if g.ground:
            raise GraphError("gc2 graphs have no ground vertices")
        if g.distinguished is not None:
            raise GraphError("gc2 graphs have no distinguished vertex")
        if any(s > t for s, t in g.edges):
            raise GraphError("gc2 edges are stored with source < target")
        if len(set(g.edges)) != len(g.edges):
            raise GraphError("duplicate gc2 edge")
        if not _connected(n, g.edges):
            raise GraphError("gc2 graph is disconnected")
        low = [v for v in range(n) if g.valence(v) < 3]
        if low:
            raise GraphError(f"gc2 vertices {low} have valence < 3")
        return
    for s, _ in g.edges:
        if s >= g.aerial:
            raise GraphError(f"edge source {s} is not an aerial vertex")
    if g.distinguished is not None:
        if g.species != "brane":
            raise GraphError("only brane graphs carry a distinguished vertex")
        if not (g.aerial <= g.distinguished < n):
            raise GraphError("distinguished vertex must be a ground vertex")


def build_graph(
    species: str,
    aerial: int,
    ground: int,
    edges: Iterable[Sequence[int]],
    distinguished: int | None = None,
) -> Graph:
    """Validate and build a graph; gc2 edges are normalized to ``source < target``."""
    edges = [tuple(int(x) for x in e) for e in edges]
    if species == "gc2":
        edges = [(min(e), max(e)) if len(e) == 2 else e for e in edges]
    return Graph(species, int(aerial), int(ground), tuple(edges), distinguished)


# ---------------------------------------------------------------------------
# canonical forms


@dataclass(frozen=True)
class CanonicalGraph:
    """Isomorphism class of a graph together with the orientation sign.

    ``graph`` is the stored representative; the input equals ``sign`` times
    the representative as an oriented graph.  ``automorphisms`` counts the
    vertex permutations fixing the representative's edge multiset.
    """

    key: bytes
    sign: int
    graph: Graph
    automorphisms: int


def _permutation_parity(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    parity = 0
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        parity ^= (length - 1) & 1
    return -1 if parity else 1


def _refine(cells: list[list[int]], out_nb, in_nb) -> list[list[int]]:
    """Equitable refinement of an ordered partition (label invariant)."""
    while True:
        cell_of = {}
        for i, cell in enumerate(cells):
            for v in cell:
                cell_of[v] = i
        new_cells: list[list[int]] = []
        changed = False
        for cell in cells:
            if len(cell) == 1:
                new_cells.append(cell)
                continue
            sig = {}
            for v in cell:
                o = sorted(Counter(cell_of[w] for w in out_nb[v]).items())
                i_ = sorted(Counter(cell_of[w] for w in in_nb[v]).items())
                sig[v] = (tuple(o), tuple(i_))
            groups: dict = {}
            for v in cell:
                groups.setdefault(sig[v], []).append(v)
            if len(groups) > 1:
                changed = True
                for s in sorted(groups):
                    new_cells.append(groups[s])
            else:
                new_cells.append(cell)
        cells = new_cells
        if not changed:
            return cells


def _relabeled_edges(g: Graph, pos: dict[int, int]) -> list[tuple[int, int]]:
    if g.species == "gc2":
        out = []
        for s, t in g.edges:
            a, b = pos[s], pos[t]
            out.append((a, b) if a < b else (b, a))
        return out
    return [(pos[s], pos[t]) for s, t in g.edges]


@lru_cache(maxsize=None)
def canonicalize(g: Graph) -> CanonicalGraph:
    """Signed canonical form by exhaustive search over refined labelings.

    Aerial vertices are permuted freely (all vertices for gc2); ground
    vertices of the directed species are fixed.  The key is the lexicographic
    minimum of the relabeled, sorted edge list over every leaf of the
    individualization tree; the leaves attaining it differ by automorphisms.
    """
    n = g.n_vertices
    if n > MAX_CANONICAL_VERTICES:
        raise GraphError(f"canonicalization limited to {MAX_CANONICAL_VERTICES} vertices")
    out_nb: list[list[int]] = [[] for _ in range(n)]
    in_nb: list[list[int]] = [[] for _ in range(n)]
    for s, t in g.edges:
        if g.species == "gc2":
            out_nb[s].append(t)
            out_nb[t].append(s)
        else:
            out_nb[s].append(t)
            in_nb[t].append(s)
    if g.species == "gc2":
        cells = [list(range(n))] if n else []
    else:
        cells = ([list(range(g.aerial))] if g.aerial else []) + [
            [v] for v in range(g.aerial, n)
        ]

    # key, parities of the minimal leaves, their count, first minimal labeling
    best: list = [None, [], 0, None]

    def search(cells):
        cells = _refine(cells, out_nb, in_nb)
        for i, cell in enumerate(cells):
            if len(cell) > 1:
                for v in cell:
                    rest = [w for w in cell if w != v]
                    search(cells[:i] + [[v], rest] + cells[i + 1 :])
                return
        pos = {cell[0]: i for i, cell in enumerate(cells)}
        relabeled = _relabeled_edges(g, pos)
        key = tuple(sorted(relabeled))
        if best[0] is None or key < best[0]:
            best[:] = [key, [], 0, pos]
        if key == best[0]:
            order = sorted(range(len(relabeled)), key=lambda i: relabeled[i])
            target = [0] * len(order)
            for rank, i in enumerate(order):
                target[i] = rank
            best[1].append(_permutation_parity(target))
            best[2] += 1

    search(cells)
    key_edges = best[0] if best[0] is not None else ()
    pos = best[3] if best[3] is not None else {v: v for v in range(n)}
    parities = set(best[1]) if best[1] else {1}
    has_parallel = len(set(key_edges)) != len(key_edges)
    if has_parallel or len(parities) > 1:
        sign = 0
    else:
        sign = parities.pop()
    dist = pos[g.distinguished] if g.distinguished is not None else None
    rep = Graph(g.species, g.aerial, g.ground, tuple(key_edges), dist)
    return CanonicalGraph(rep.to_json().encode(), sign, rep, max(best[2], 1))


def is_isomorphic(a: Graph, b: Graph) -> bool:
    return canonicalize(a).key == canonicalize(b).key


def relabel(g: Graph, perm: Sequence[int], edge_order: Sequence[int] | None = None) -> Graph:
    """Graph with vertex ``v`` renamed ``perm[v]`` and edges listed in ``edge_order``."""
    edges = [(perm[s], perm[t]) for s, t in g.edges]
    if edge_order is not None:
        edges = [edges[i] for i in edge_order]
    dist = perm[g.distinguished] if g.distinguished is not None else None
    return build_graph(g.species, g.aerial, g.ground, edges, distinguished=dist)


# ---------------------------------------------------------------------------
# named graphs


def _wheel_edges(j: int, hub, rim, spoke_out_of_hub: bool, cycle_forward: bool):
    """Edges in the printed order: spoke to rim i, then the rim edge after it."""
    edges = []
    for i in range(j):
        a, b = rim[i], rim[(i + 1) % j]
        edges.append((hub(i), rim[i]) if spoke_out_of_hub else (rim[i], hub(i)))
        edges.append((a, b) if cycle_forward else (b, a))
    return edges


def wheel_family(kind: str, j: int = 3) -> Graph:
    """The named graphs of the wheel families, with the printed edge order.

    Rim vertices ``r_1..r_j`` get indices ``0..j-1``; edge ``2i-1`` is the spoke
    at ``r_i`` and edge ``2i`` joins ``r_i`` and ``r_{i+1}``.
    """
    if kind == "tetrahedron":
        return build_graph("gc2", 4, 0, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 3)])
    if kind not in WHEEL_KINDS:
        raise GraphError(f"unknown wheel kind {kind!r}")
    if j < 2:
        raise GraphError("wheel families need j >= 2")
    rim = list(range(j))
    hub = j
    if kind == "duflo_I":
        edges = _wheel_edges(j, lambda i: hub, rim, False, False)
        return build_graph("kontsevich", j + 1, 0, edges)
    if kind == "duflo_II":
        g1, g2 = j, j + 1
        edges = _wheel_edges(j, lambda i: g2 if i == 0 else g1, rim, False, False)
        return build_graph("kontsevich", j, 2, edges)
    if kind == "curv_III":
        edges = _wheel_edges(j, lambda i: hub, rim, True, True)
        return build_graph("kontsevich", j + 1, 0, edges)
    if kind == "chain_wheel":
        edges = _wheel_edges(j, lambda i: hub, rim, True, True)
        return build_graph("shoikhet", j + 1, 1, edges)
    if kind == "homotopy_base":
        edges = _wheel_edges(j, lambda i: j, rim, False, False)
        return build_graph("kontsevich", j, 1, edges)
    if kind == "brane_wheel":
        edges = _wheel_edges(j, lambda i: j, rim, False, False)
        return build_graph("brane", j, 2, edges, distinguished=j + 1)
    if kind == "gc2_wheel":
        if j < 3:
            raise GraphError("gc2 wheels need at least 3 spokes")
        edges = _wheel_edges(j, lambda i: hub, rim, True, True)
        return build_graph("gc2", j + 1, 0, edges)
    if kind == "module_target":
        center = j + 1
        edges = _wheel_edges(j, lambda i: hub, rim, True, True) + [(center, hub)]
        return build_graph("shoikhet", j + 2, 1, edges)
    raise GraphError(f"unknown wheel kind {kind!r}")


def wedge_graph(copies: int = 1) -> Graph:
    """``copies`` aerial vertices, each with one edge to each of two ground vertices."""
    edges = []
    for a in range(copies):
        edges += [(a, copies), (a, copies + 1)]
    return build_graph("kontsevich", copies, 2, edges)


def brane_normalization_graphs() -> tuple[Graph, Graph]:
    """The two edgeless two-point graphs with one distinguished ground vertex."""
    return (
        build_graph("brane", 0, 2, [], distinguished=1),
        build_graph("brane", 0, 2, [], distinguished=0),
    )
