"""Threshold graphs of a pseudo-metric instance and their quotient structure.

For a radius r the neighborhood graph joins two elements iff their distance
is at most r.  Sweeping r produces a finite filtration; the distinct pairwise
distances are the only radii where the graph changes.  Vertices with equal
closed neighborhoods form the duplicate classes that the clone-robust rules
are built around.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .caps import CapExceeded, default_caps
from .metric import MetricInstance

__all__ = [
    "Graph",
    "ClassPartition",
    "QuotientGraph",
    "neighborhood_graph",
    "threshold_radii",
    "equivalence_classes",
    "quotient",
    "forbidden_intervals",
    "merge_intervals",
    "automorphisms",
    "orbits",
]


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Graph:
    """Undirected graph on vertices 0..n-1 with bitmask adjacency.

    ``nbrs[v]`` is the open neighborhood of v as a bitmask (no self-bit).
    Instances are hashable, so they can key caches and appear in test tables.
    """

    n: int
    nbrs: tuple[int, ...]
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.nbrs) != self.n or len(self.labels) != self.n:
            raise ValueError("adjacency/label arity does not match vertex count")
        for v, mask in enumerate(self.nbrs):
            if mask >> self.n:
                raise ValueError(f"neighbor mask of vertex {v} addresses missing vertices")
            if mask & (1 << v):
                raise ValueError(f"vertex {v} listed as its own neighbor")
            for u in _bits(mask):
                if not self.nbrs[u] & (1 << v):
                    raise ValueError(f"edge {v}-{u} is not symmetric")

    @staticmethod
    def from_edges(
        n: int, edges: list[tuple[int, int]], labels: tuple[str, ...] | None = None
    ) -> "Graph":
        masks = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        if labels is None:
            labels = tuple(f"v{i}" for i in range(n))
        return Graph(n, tuple(masks), labels)

    def index(self, vertex: int | str) -> int:
        if isinstance(vertex, str):
            try:
                return self.labels.index(vertex)
            except ValueError:
                raise KeyError(f"unknown vertex label {vertex!r}") from None
        return vertex

    def closed(self, v: int) -> int:
        return self.nbrs[v] | (1 << v)

    def degree(self, v: int) -> int:
        return self.nbrs[v].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.nbrs[u] & (1 << v))

    def neighbors(self, v: int) -> list[int]:
        return list(_bits(self.nbrs[v]))

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.neighbors(u) if u < v]

    def remove_vertex(self, v: int) -> "Graph":
        keep = [u for u in range(self.n) if u != v]
        return self.subgraph(keep)

    def subgraph(self, keep: list[int]) -> "Graph":
        pos = {old: new for new, old in enumerate(keep)}
        masks = []
        for old in keep:
            mask = 0
            for u in _bits(self.nbrs[old]):
                if u in pos:
                    mask |= 1 << pos[u]
            masks.append(mask)
        return Graph(len(keep), tuple(masks), tuple(self.labels[old] for old in keep))


def neighborhood_graph(
    inst: MetricInstance, r: float | Fraction, *, exact: bool = False
) -> Graph:
    """Graph with an edge between x != y iff d(x, y) <= r (inclusive)."""
    n = inst.n
    masks = [0] * n
    if exact:
        r_ex = r if isinstance(r, Fraction) else Fraction(r)
        for i in range(n):
            for j in range(i + 1, n):
                if inst.d_exact(i, j) <= r_ex:
                    masks[i] |= 1 << j
                    masks[j] |= 1 << i
    else:
        rf = float(r)
        for i in range(n):
            for j in range(i + 1, n):
                if inst.dist[i, j] <= rf:
                    masks[i] |= 1 << j
                    masks[j] |= 1 << i
    return Graph(n, tuple(masks), inst.labels)


def threshold_radii(
    inst: MetricInstance, alpha: float | Fraction, *, exact: bool = False
) -> list:
    """Distinct pairwise distances in (0, alpha], ascending.

    These are exactly the radii at which the neighborhood graph changes
    within the integration window.
    """
    n = inst.n
    if exact:
        a = alpha if isinstance(alpha, Fraction) else Fraction(alpha)
        vals = {
            inst.d_exact(i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if 0 < inst.d_exact(i, j) <= a
        }
    else:
        af = float(alpha)
        vals = {
            float(inst.dist[i, j])
            for i in range(n)
            for j in range(i + 1, n)
            if 0 < inst.dist[i, j] <= af
        }
    return sorted(vals)


@dataclass(frozen=True)
class ClassPartition:
    """Duplicate classes of a graph: vertices with equal closed neighborhoods.

    Classes are ordered by their smallest vertex; each class induces a clique
    (equal closed neighborhoods containing both endpoints force the edge).
    """

    classes: tuple[tuple[int, ...], ...]
    class_of: tuple[int, ...]

    def members(self, v: int) -> tuple[int, ...]:
        return self.classes[self.class_of[v]]

    def __len__(self) -> int:
        return len(self.classes)


def equivalence_classes(graph: Graph) -> ClassPartition:
    by_closed: dict[int, list[int]] = {}
    for v in range(graph.n):
        by_closed.setdefault(graph.closed(v), []).append(v)
    classes = sorted((tuple(vs) for vs in by_closed.values()), key=lambda c: c[0])
    class_of = [0] * graph.n
    for idx, cls in enumerate(classes):
        for v in cls:
            class_of[v] = idx
    return ClassPartition(tuple(classes), tuple(class_of))


@dataclass(frozen=True)
class QuotientGraph:
    graph: Graph
    partition: ClassPartition


def quotient(graph: Graph) -> QuotientGraph:
    """Quotient by the duplicate-class partition.

    Two classes are adjacent iff their members are adjacent; member choice
    cannot matter (equal closed neighborhoods), which is re-checked here
    because the rules build on it.
    """
    part = equivalence_classes(graph)
    k = len(part)
    masks = [0] * k
    for a in range(k):
        for b in range(a + 1, k):
            rep = graph.has_edge(part.classes[a][0], part.classes[b][0])
            for u in part.classes[a]:
                for v in part.classes[b]:
                    if graph.has_edge(u, v) != rep:
                        raise RuntimeError(
                            f"class adjacency of {part.classes[a]} vs {part.classes[b]} "
                            f"is not well-defined; classes are not true duplicates"
                        )
            if rep:
                masks[a] |= 1 << b
                masks[b] |= 1 << a
    labels = tuple("+".join(graph.labels[v] for v in cls) for cls in part.classes)
    return QuotientGraph(Graph(k, tuple(masks), labels), part)


def merge_intervals(intervals: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Union of closed intervals as a sorted list of disjoint intervals."""
    out: list[tuple[float, float]] = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def forbidden_intervals(
    inst: MetricInstance, x: int | str, y: int | str
) -> list[tuple[float, float]]:
    """Radii where x and y might have different closed neighborhoods.

    A witness z can only distinguish the pair when r lies within d(x, y) of
    d(x, z), because |d(y, z) - d(x, z)| <= d(x, y); outside the union
    over z of those closed intervals (clipped to r >= 0) the two elements
    are provably duplicates.  Total measure is at most 2|S|d(x, y).
    """
    xi, yi = inst.index(x), inst.index(y)
    gap = float(inst.dist[xi, yi])
    if gap == 0.0:
        # |d(y, z) - d(x, z)| <= 0: the pair agrees about every witness.
        return []
    intervals = []
    for z in range(inst.n):
        anchor = float(inst.dist[xi, z])
        intervals.append((max(0.0, anchor - gap), anchor + gap))
    return merge_intervals(intervals)


def automorphisms(graph: Graph, cap: int | None = None) -> list[tuple[int, ...]]:
    """All adjacency-preserving vertex permutations, by backtracking.

    Exhaustive search is only allowed up to the ``automorphism_vertices``
    cap (default 8); pass ``cap`` explicitly for known-small bigger graphs.
    """
    limit = cap if cap is not None else default_caps().automorphism_vertices
    if graph.n > limit:
        raise CapExceeded(
            f"automorphism search on {graph.n} vertices", "automorphism_vertices", limit
        )
    n = graph.n
    sig = []
    for v in range(n):
        sig.append((graph.degree(v), tuple(sorted(graph.degree(u) for u in graph.neighbors(v)))))
    candidates = [[w for w in range(n) if sig[w] == sig[v]] for v in range(n)]

    out: list[tuple[int, ...]] = []
    image = [-1] * n
    used = [False] * n

    def extend(v: int) -> None:
        if v == n:
            out.append(tuple(image))
            return
        for w in candidates[v]:
            if used[w]:
                continue
            ok = True
            for u in range(v):
                if graph.has_edge(v, u) != graph.has_edge(w, image[u]):
                    ok = False
                    break
            if ok:
                image[v] = w
                used[w] = True
                extend(v + 1)
                used[w] = False
                image[v] = -1

    extend(0)
    return out


def orbits(graph: Graph, autos: list[tuple[int, ...]] | None = None, cap: int | None = None):
    """Vertex orbits under the automorphism group, ordered by least vertex."""
    if autos is None:
        autos = automorphisms(graph, cap=cap)
    parent = list(range(graph.n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for perm in autos:
        for v in range(graph.n):
            ra, rb = find(v), find(perm[v])
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for v in range(graph.n):
        groups.setdefault(find(v), []).append(v)
    return tuple(tuple(vs) for _, vs in sorted(groups.items()))
