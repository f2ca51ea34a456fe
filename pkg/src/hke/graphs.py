"""Simple graphs and the dictionary between set collections and graphs.

A graph is König–Egerváry (KE) when its independence number plus its matching
number equals its vertex count.  Omega(G) denotes the family of all maximum
independent sets; corona(G) is the union of that family.  The graph of a
family F has vertex set union(F) and joins two vertices exactly when no member
contains both, which makes every member independent.

All solvers here are exact and exhaustive at desk scale: branch and bound over
vertex bitmasks for independent sets, branch and bound over edges for general
matchings, and augmenting paths for the bipartite matchings demanded by the
KE-via-hke-subcollection test.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations

from .errors import (
    AlphaOutOfRange,
    DuplicateEdge,
    ParseError,
    PreconditionFailed,
    SelfLoop,
    TheoremViolation,
    TooLarge,
)
from .families import (
    SUBCOLLECTION_CAP,
    ElementSet,
    ElementTable,
    Selector,
    SetFamily,
    alpha_of,
    bit_indices,
    label_sort_key,
)
from .maximal import _fresh_labels, characterize_maximal
from .verify import _can_add_masks, check_hke_definition, check_ke

MIS_VERTEX_CAP = 32
THEOREM_VERTEX_CAP = 16
TYPICAL_GRAPH_ALPHA_CAP = 16
EMBED_ALPHA_CAP = 4
EMBED_UNIVERSE_CAP = 12


class Graph:
    """A simple undirected graph: labelled vertices, bitmask adjacency."""

    __slots__ = ("table", "adj")

    def __init__(self, table: ElementTable, adj: tuple[int, ...]):
        n = len(table)
        if n == 0:
            raise ValueError("a graph needs at least one vertex")
        if len(adj) != n:
            raise ValueError("adjacency length does not match the vertex table")
        for v, mask in enumerate(adj):
            if mask >> n:
                raise ValueError("adjacency mask has bits beyond the vertex table")
            if mask >> v & 1:
                raise SelfLoop(f"vertex {table.label(v)!r} is adjacent to itself")
            for u in bit_indices(mask):
                if not adj[u] >> v & 1:
                    raise ValueError("adjacency is not symmetric")
        self.table = table
        self.adj = tuple(adj)

    @classmethod
    def from_edges(cls, vertices=(), edges=()) -> "Graph":
        order: list[str] = []
        index: dict[str, int] = {}

        def intern(label: str) -> int:
            if label not in index:
                index[label] = len(order)
                order.append(label)
            return index[label]

        for lab in vertices:
            intern(lab)
        pairs: list[tuple[int, int]] = []
        seen: set[frozenset[int]] = set()
        for u, v in edges:
            iu, iv = intern(u), intern(v)
            if iu == iv:
                raise SelfLoop(f"edge {u!r}-{v!r} is a self-loop")
            key = frozenset((iu, iv))
            if key in seen:
                raise DuplicateEdge(f"edge {u!r}-{v!r} is declared twice")
            seen.add(key)
            pairs.append((iu, iv))
        if not order:
            raise ValueError("a graph needs at least one vertex")
        table = ElementTable(order)
        adj = [0] * len(order)
        for iu, iv in pairs:
            adj[iu] |= 1 << iv
            adj[iv] |= 1 << iu
        return cls(table, tuple(adj))

    @property
    def vertex_count(self) -> int:
        return len(self.table)

    def adjacency(self, index: int) -> ElementSet:
        return ElementSet(len(self.table), self.adj[index])

    def degree(self, index: int) -> int:
        return self.adj[index].bit_count()

    def edge_index_pairs(self) -> list[tuple[int, int]]:
        pairs = []
        for v in range(len(self.table)):
            for u in bit_indices(self.adj[v]):
                if u > v:
                    pairs.append((v, u))
        return sorted(pairs)

    def edges(self) -> tuple[tuple[str, str], ...]:
        out = []
        for i, j in self.edge_index_pairs():
            pair = tuple(sorted((self.table.label(i), self.table.label(j)), key=label_sort_key))
            out.append(pair)
        return tuple(sorted(out, key=lambda p: (label_sort_key(p[0]), label_sort_key(p[1]))))

    def edge_labelsets(self) -> set[frozenset[str]]:
        return {frozenset(pair) for pair in self.edges()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return set(self.table.labels) == set(other.table.labels) and self.edge_labelsets() == other.edge_labelsets()

    def __hash__(self) -> int:
        return hash((frozenset(self.table.labels), frozenset(self.edge_labelsets())))

    def __repr__(self) -> str:
        return f"Graph({len(self.table)} vertices, {len(self.edge_index_pairs())} edges)"

    def render(self) -> str:
        return render_graph(self)


@dataclass(frozen=True)
class Matching:
    """Pairwise vertex-disjoint edges, as label pairs."""

    edges: tuple[tuple[str, str], ...]

    @property
    def size(self) -> int:
        return len(self.edges)

    def as_dict(self) -> dict:
        return {"size": self.size, "edges": [list(e) for e in self.edges]}


def parse_graph(text: str | bytes) -> Graph:
    """Parse the edge-list graph format: optional "v <lbl> ..." declaration
    lines, one "e <lbl> <lbl>" line per edge, '#' comments."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from None
    vertices: list[str] = []
    edges: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        kind, rest = tokens[0], tokens[1:]
        if kind == "v":
            vertices.extend(rest)
        elif kind == "e":
            if len(rest) != 2:
                raise ParseError(f"an edge line needs exactly two labels, got {len(rest)}", lineno)
            edges.append((rest[0], rest[1]))
        else:
            raise ParseError(f"unknown directive {kind!r}; expected 'v' or 'e'", lineno)
    if not vertices and not edges:
        raise ParseError("graph has no vertices")
    return Graph.from_edges(vertices, edges)


def render_graph(graph: Graph) -> str:
    """Canonical text; parse_graph(render_graph(G)) == G."""
    labels = sorted(graph.table.labels, key=label_sort_key)
    lines = ["v " + " ".join(labels)]
    for u, v in graph.edges():
        lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


def _guard_vertices(graph: Graph, cap: int) -> int:
    n = graph.vertex_count
    if n > cap:
        raise TooLarge(f"graph has {n} vertices; this operation is capped at {cap}")
    return n


def _alpha_masks(adj: tuple[int, ...], n: int) -> int:
    best = 0

    def rec(allowed: int, size: int) -> None:
        nonlocal best
        if size + allowed.bit_count() <= best:
            return
        if allowed == 0:
            best = size
            return
        v = (allowed & -allowed).bit_length() - 1
        bit = 1 << v
        rec(allowed & ~(adj[v] | bit), size + 1)
        rec(allowed ^ bit, size)

    rec((1 << n) - 1, 0)
    return best


def _all_mis_masks(adj: tuple[int, ...], n: int) -> tuple[int, list[int]]:
    best = 0
    collected: list[int] = []

    def rec(allowed: int, chosen: int, size: int) -> None:
        nonlocal best, collected
        if size + allowed.bit_count() < best:
            return
        if allowed == 0:
            if size > best:
                best = size
                collected = [chosen]
            elif size == best:
                collected.append(chosen)
            return
        v = (allowed & -allowed).bit_length() - 1
        bit = 1 << v
        rec(allowed & ~(adj[v] | bit), chosen | bit, size + 1)
        rec(allowed ^ bit, chosen, size)

    rec((1 << n) - 1, 0, 0)
    collected.sort(key=lambda m: tuple(bit_indices(m)))
    return best, collected


def independence_number(graph: Graph) -> int:
    """Exact independence number by branch and bound over vertex bitmasks."""
    n = _guard_vertices(graph, MIS_VERTEX_CAP)
    return _alpha_masks(graph.adj, n)


def max_independent_sets(graph: Graph) -> SetFamily:
    """Omega(G): every maximum independent set, in lexicographic index order.

    The family's universe is the whole vertex set, so vertices outside the
    corona appear as declared extra labels."""
    n = _guard_vertices(graph, MIS_VERTEX_CAP)
    _, masks = _all_mis_masks(graph.adj, n)
    members = [ElementSet(n, m) for m in masks]
    return SetFamily(graph.table, members)


def corona(graph: Graph) -> ElementSet:
    """The union of all maximum independent sets."""
    omega = max_independent_sets(graph)
    return omega.union_all()


def maximum_matching(graph: Graph) -> Matching:
    """Exact maximum matching on general graphs, deterministic witness.

    Branch and bound over the canonically ordered edge list; the bound is the
    smaller of the remaining edge count and half the free vertices.
    """
    n = _guard_vertices(graph, MIS_VERTEX_CAP)
    edges = graph.edge_index_pairs()
    best_count = -1
    best: list[tuple[int, int]] = []
    current: list[tuple[int, int]] = []

    def rec(idx: int, used: int, count: int) -> None:
        nonlocal best_count, best
        if count > best_count:
            best_count = count
            best = list(current)
        if idx == len(edges):
            return
        free = n - used.bit_count()
        if count + min(len(edges) - idx, free // 2) <= best_count:
            return
        i, j = edges[idx]
        bits = (1 << i) | (1 << j)
        if not used & bits:
            current.append((i, j))
            rec(idx + 1, used | bits, count + 1)
            current.pop()
        rec(idx + 1, used, count)

    rec(0, 0, 0)
    pairs = [
        tuple(sorted((graph.table.label(i), graph.table.label(j)), key=label_sort_key))
        for i, j in best
    ]
    pairs.sort(key=lambda p: (label_sort_key(p[0]), label_sort_key(p[1])))
    return Matching(tuple(pairs))


def is_ke(graph: Graph) -> bool:
    """Whether independence number plus matching number equals vertex count."""
    n = _guard_vertices(graph, MIS_VERTEX_CAP)
    return independence_number(graph) + maximum_matching(graph).size == n


@dataclass(frozen=True)
class KeTheoremVerdict:
    """Outcome of the KE test through hke subcollections of Omega(G)."""

    holds: bool
    omega: SetFamily
    gamma: Selector | None
    matching: Matching | None

    def as_dict(self) -> dict:
        return {
            "holds": self.holds,
            "omega_size": len(self.omega),
            "gamma": list(self.gamma.indices()) if self.gamma else None,
            "matching": self.matching.as_dict()["edges"] if self.matching else None,
        }


def _saturating_matching(graph: Graph, left: list[int], right_mask: int) -> list[tuple[int, int]] | None:
    """Match every vertex of `left` to a distinct neighbour inside right_mask,
    using graph edges; None when impossible."""
    match_of: dict[int, int] = {}

    def augment(u: int, visited: set[int]) -> bool:
        for w in bit_indices(graph.adj[u] & right_mask):
            if w in visited:
                continue
            visited.add(w)
            if w not in match_of or augment(match_of[w], visited):
                match_of[w] = u
                return True
        return False

    for u in left:
        if not augment(u, set()):
            return None
    return [(u, w) for w, u in match_of.items()]


def _theorem_verdict(graph: Graph, omega: SetFamily) -> KeTheoremVerdict:
    k = len(omega)
    if k > SUBCOLLECTION_CAP:
        raise TooLarge(f"Omega(G) has {k} members; the subcollection sweep is capped at {SUBCOLLECTION_CAP}")
    masks = omega.member_masks
    alpha = len(omega.members[0])
    n = graph.vertex_count
    full_vertices = (1 << n) - 1
    hke = bytearray(1 << k)
    for m in range(1, 1 << k):
        low = m & -m
        rest = m ^ low
        if rest == 0:
            ok = True
        elif not hke[rest]:
            continue
        else:
            sub = [masks[i] for i in bit_indices(rest)]
            ok = _can_add_masks(sub, alpha, masks[low.bit_length() - 1])
        if not ok:
            continue
        hke[m] = 1
        union = 0
        inter = full_vertices
        for i in bit_indices(m):
            union |= masks[i]
            inter &= masks[i]
        outside = full_vertices & ~union
        if outside.bit_count() > inter.bit_count():
            continue
        pairs = _saturating_matching(graph, bit_indices(outside), inter)
        if pairs is not None:
            label_pairs = [
                tuple(sorted((graph.table.label(a), graph.table.label(b)), key=label_sort_key))
                for a, b in pairs
            ]
            label_pairs.sort(key=lambda p: (label_sort_key(p[0]), label_sort_key(p[1])))
            return KeTheoremVerdict(True, omega, Selector(m), Matching(tuple(label_pairs)))
    return KeTheoremVerdict(False, omega, None, None)


def is_ke_via_theorem(graph: Graph) -> KeTheoremVerdict:
    """KE test without matching the whole graph: search for an hke
    subcollection Gamma of Omega(G) whose complement V - union(Gamma) can be
    matched into inter(Gamma).  Candidates are swept in increasing mask order
    with incremental hke testing; the first witness is returned."""
    _guard_vertices(graph, THEOREM_VERTEX_CAP)
    omega = max_independent_sets(graph)
    return _theorem_verdict(graph, omega)


def omega_is_hke(graph: Graph) -> bool:
    """Whether the family of maximum independent sets is hke."""
    _guard_vertices(graph, THEOREM_VERTEX_CAP)
    omega = max_independent_sets(graph)
    return check_hke_definition(omega).holds


def _maximal_independent_sets(adj: tuple[int, ...], n: int):
    """Yield every inclusion-maximal independent set mask (Bron-Kerbosch with
    pivoting on the complement graph)."""
    full = (1 << n) - 1
    comp = [full & ~(adj[v] | (1 << v)) for v in range(n)]

    def bk(r: int, p: int, x: int):
        if p == 0 and x == 0:
            yield r
            return
        px = p | x
        pivot, best = -1, -1
        for u in bit_indices(px):
            c = (p & comp[u]).bit_count()
            if c > best:
                pivot, best = u, c
        for v in bit_indices(p & ~comp[pivot]):
            bit = 1 << v
            yield from bk(r | bit, p & comp[v], x & comp[v])
            p ^= bit
            x |= bit

    yield from bk(0, full, 0)


def is_well_covered(graph: Graph) -> bool:
    """Whether every maximal independent set is maximum."""
    n = _guard_vertices(graph, MIS_VERTEX_CAP)
    alpha = _alpha_masks(graph.adj, n)
    return all(m.bit_count() == alpha for m in _maximal_independent_sets(graph.adj, n))


def wellcovered_roundtrip(graph: Graph) -> bool:
    """For a well-covered graph whose corona is the whole vertex set, whether
    the graph of Omega(G) reproduces G exactly."""
    n = _guard_vertices(graph, MIS_VERTEX_CAP)
    omega = max_independent_sets(graph)
    if not is_well_covered(graph):
        raise PreconditionFailed("graph is not well-covered")
    if omega.union_all().mask != (1 << n) - 1:
        raise PreconditionFailed("corona does not cover the vertex set")
    return graph_of(omega) == graph


def graph_of(family: SetFamily) -> Graph:
    """The graph of a relevant family: vertices union(F), an edge exactly
    where no member contains both endpoints."""
    alpha_of(family)
    union = family.union_all()
    vertex_indices = bit_indices(union.mask)
    labels = [family.table.label(i) for i in vertex_indices]
    n = len(labels)
    adj = [0] * n
    for a_pos in range(n):
        for b_pos in range(a_pos + 1, n):
            fa, fb = vertex_indices[a_pos], vertex_indices[b_pos]
            together = (1 << fa) | (1 << fb)
            if not any(m & together == together for m in family.member_masks):
                adj[a_pos] |= 1 << b_pos
                adj[b_pos] |= 1 << a_pos
    return Graph(ElementTable(labels), tuple(adj))


def typical_ke_graph(alpha: int) -> Graph:
    """The perfect matching graph on {1..2a} with edges {i, i+a}."""
    if not 1 <= alpha <= TYPICAL_GRAPH_ALPHA_CAP:
        raise AlphaOutOfRange(f"alpha must be between 1 and {TYPICAL_GRAPH_ALPHA_CAP}, got {alpha}")
    labels = [str(i) for i in range(1, 2 * alpha + 1)]
    edges = [(str(i), str(i + alpha)) for i in range(1, alpha + 1)]
    return Graph.from_edges(labels, edges)


def bipartite_check_and_theorem(graph: Graph) -> bool:
    """For a graph with corona covering all vertices: G is a disjoint union of
    edges (hence isomorphic to the typical KE graph for alpha(G)) exactly when
    Omega(G) is a maximal hke collection.  Both sides are computed
    independently and must agree."""
    n = _guard_vertices(graph, THEOREM_VERTEX_CAP)
    omega = max_independent_sets(graph)
    if omega.union_all().mask != (1 << n) - 1:
        raise PreconditionFailed("corona does not cover the vertex set")
    graph_side = all(mask.bit_count() == 1 for mask in graph.adj)
    collection_side = characterize_maximal(omega)
    if graph_side != collection_side:
        raise TheoremViolation("perfect-matching shape and maximal-hke Omega disagreed")
    return graph_side


def _embed_into_typical(family: SetFamily, alpha: int) -> dict[str, int] | None:
    """Injective map from union(F) into {1..2a} whose member images avoid the
    dual pairs {i, i+a}; such images are exactly typical-collection members."""
    union_labels = sorted(family.table.labels_of(family.union_all()), key=label_sort_key)
    if len(union_labels) > 2 * alpha:
        return None
    co: dict[str, set[str]] = {lab: set() for lab in union_labels}
    for labelset in family.labelsets():
        for a in labelset:
            co[a].update(labelset - {a})

    assignment: dict[str, int] = {}
    used: set[int] = set()

    def partner(t: int) -> int:
        return t + alpha if t <= alpha else t - alpha

    def rec(i: int) -> bool:
        if i == len(union_labels):
            return True
        u = union_labels[i]
        for t in range(1, 2 * alpha + 1):
            if t in used:
                continue
            bad = partner(t)
            if any(assignment.get(w) == bad for w in co[u]):
                continue
            assignment[u] = t
            used.add(t)
            if rec(i + 1):
                return True
            del assignment[u]
            used.discard(t)
        return False

    return dict(assignment) if rec(0) else None


def old_ke_equivalence(family: SetFamily) -> bool:
    """Four equivalent descriptions of the same class of families, evaluated
    independently: (1) hke by the defining sweep, (2) embeddable into the
    typical collection, (3) contained in Omega(G) for a KE graph, and (4)
    contained in some Omega(G) while satisfying |union| + |inter| = 2*alpha.
    Routes (3) and (4) are witnessed constructively by a relabelled typical KE
    graph built from the embedding.  Disagreement raises TheoremViolation."""
    sizes = {m.bit_count() for m in family.member_masks}
    if len(sizes) > 1:
        return False
    alpha = alpha_of(family)
    if alpha > EMBED_ALPHA_CAP:
        raise TooLarge(f"equivalence check is capped at member cardinality {EMBED_ALPHA_CAP}")
    if len(family.union_all()) > EMBED_UNIVERSE_CAP:
        raise TooLarge(f"equivalence check is capped at ground sets of {EMBED_UNIVERSE_CAP} elements")

    if len(family) > 1 << alpha:
        via_definition = False
    else:
        via_definition = check_hke_definition(family).holds

    embedding = _embed_into_typical(family, alpha)
    via_embedding = embedding is not None

    via_ke_graph = False
    via_old_sense = False
    if embedding is not None:
        reverse = {t: lab for lab, t in embedding.items()}
        fresh = iter(_fresh_labels(family.table, 2 * alpha - len(embedding)))
        vertex_labels = [reverse.get(t) or next(fresh) for t in range(1, 2 * alpha + 1)]
        edges = [(vertex_labels[i - 1], vertex_labels[i - 1 + alpha]) for i in range(1, alpha + 1)]
        witness = Graph.from_edges(vertex_labels, edges)
        omega_w = set(max_independent_sets(witness).labelsets())
        contained = set(family.labelsets()) <= omega_w
        via_ke_graph = contained and is_ke(witness)
        via_old_sense = contained and check_ke(family).holds

    if not (via_definition == via_embedding == via_ke_graph == via_old_sense):
        raise TheoremViolation(
            "equivalence routes disagreed: "
            f"definition={via_definition} embedding={via_embedding} "
            f"ke-graph={via_ke_graph} old-sense={via_old_sense}"
        )
    return via_definition


def exhaustive_graphs(max_vertices: int):
    """Every labelled graph on 1..max_vertices vertices (labels "1".."n")."""
    for n in range(1, max_vertices + 1):
        labels = [str(i) for i in range(1, n + 1)]
        pairs = list(combinations(labels, 2))
        for mask in range(1 << len(pairs)):
            edges = [pairs[i] for i in bit_indices(mask)]
            yield Graph.from_edges(labels, edges)


def random_graph(rng: random.Random, n: int) -> Graph:
    """One labelled graph on n vertices, each edge present with probability 1/2."""
    labels = [str(i) for i in range(1, n + 1)]
    edges = [pair for pair in combinations(labels, 2) if rng.random() < 0.5]
    return Graph.from_edges(labels, edges)


def cross_validate(graph: Graph) -> tuple[bool, list[str]]:
    """Run the theorem cross-checks on one graph.

    Checks: the direct KE test agrees with the hke-subcollection test; a KE
    graph has hke Omega; alpha(Omega(G)) never exceeds alpha of the graph of
    Omega(G); and the well-covered round trip holds where its precondition
    does.  Returns the direct KE bit and any violation notes."""
    problems: list[str] = []
    omega = max_independent_sets(graph)
    direct = alpha_of(omega) + maximum_matching(graph).size == graph.vertex_count
    theorem = _theorem_verdict(graph, omega)
    if direct != theorem.holds:
        problems.append(f"direct KE={direct} but subcollection test={theorem.holds}")
    if direct and not check_hke_definition(omega).holds:
        problems.append("KE graph with non-hke Omega")
    regraph = graph_of(omega)
    if alpha_of(omega) > independence_number(regraph):
        problems.append("alpha(Omega) exceeds alpha of its graph")
    full = (1 << graph.vertex_count) - 1
    if is_well_covered(graph) and omega.union_all().mask == full:
        if not wellcovered_roundtrip(graph):
            problems.append("well-covered round trip failed")
    return direct, problems


def sweep_graphs(max_vertices: int, samples: int, seed: int) -> dict:
    """Theorem cross-validation sweep: exhaustive up to five vertices, then
    seeded random graphs on 6..max_vertices vertices."""
    if max_vertices > THEOREM_VERTEX_CAP:
        raise TooLarge(f"sweep is capped at {THEOREM_VERTEX_CAP} vertices")
    report = {"graphs": 0, "ke_graphs": 0, "violations": []}
    for graph in exhaustive_graphs(min(max_vertices, 5)):
        _sweep_one(graph, report)
    if max_vertices >= 6:
        rng = random.Random(seed)
        for _ in range(samples):
            n = rng.randint(6, max_vertices)
            _sweep_one(random_graph(rng, n), report)
    return report


def _sweep_one(graph: Graph, report: dict) -> None:
    report["graphs"] += 1
    ke, problems = cross_validate(graph)
    if ke:
        report["ke_graphs"] += 1
    for problem in problems:
        report["violations"].append({"graph": render_graph(graph), "problem": problem})
