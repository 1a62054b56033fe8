"""Graph weighting rules: closed-form rules, rule combinators, entropy rule.

A rule maps a graph to a probability vector over its vertices.  The
closed-form rules work in exact rational arithmetic end to end; the entropy
rule is a certified numerical optimisation and returns floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy import optimize

from .caps import CapExceeded, default_caps
from .filtration import Graph, _bits, equivalence_classes, quotient

__all__ = [
    "WeightVector",
    "Rule",
    "w_uniform",
    "w_cu",
    "lift_quotient",
    "smooth",
    "w_degree",
    "CliqueCover",
    "maximal_cliques",
    "w_mcca",
    "w_mccp",
    "clique_partitions",
    "shannon_bits",
    "graph_entropy",
    "graph_entropy_certificate",
    "class_entropy",
    "w_entropy",
    "parse_rule",
    "registry_names",
]

LN2 = math.log(2.0)


@dataclass(frozen=True)
class WeightVector:
    """A probability vector over labelled vertices.

    Rational-valued vectors must sum to exactly 1; float-valued vectors to
    within 1e-12.  Both non-negativity and normalisation are enforced at
    construction so downstream code can rely on them.
    """

    values: tuple
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.labels):
            raise ValueError("one weight per label required")
        if not self.values:
            raise ValueError("weight vector over an empty vertex set")
        if any(v < 0 for v in self.values):
            raise ValueError(f"negative weight in {self.values}")
        total = sum(self.values)
        if self.exact:
            if total != 1:
                raise ValueError(f"exact weights sum to {total}, expected 1")
        elif abs(float(total) - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {float(total)!r}, expected 1 within 1e-12")

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, key: int | str):
        if isinstance(key, str):
            try:
                key = self.labels.index(key)
            except ValueError:
                raise KeyError(f"unknown label {key!r}") from None
        return self.values[key]

    def as_floats(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self.values)

    def as_dict(self) -> dict[str, object]:
        return dict(zip(self.labels, self.values))


Rule = Callable[[Graph], WeightVector]


def _require_nonempty(graph: Graph) -> None:
    if graph.n == 0:
        raise ValueError("rules are not defined on the empty graph")


def w_uniform(graph: Graph) -> WeightVector:
    """Uniform mass 1/|V| — the clone-sensitive baseline."""
    _require_nonempty(graph)
    share = Fraction(1, graph.n)
    return WeightVector((share,) * graph.n, graph.labels)


def w_cu(graph: Graph) -> WeightVector:
    """Class-uniform rule: split mass evenly over duplicate classes, then
    evenly inside each class, i.e. w(x) = 1 / (#classes * |class(x)|)."""
    _require_nonempty(graph)
    part = equivalence_classes(graph)
    k = len(part)
    values = tuple(Fraction(1, k * len(part.members(v))) for v in range(graph.n))
    return WeightVector(values, graph.labels)


def lift_quotient(base: Rule) -> Rule:
    """Lift a rule through the duplicate-class quotient:
    w~(x) = base(G/~)([x]) / |[x]|."""

    def rule(graph: Graph) -> WeightVector:
        _require_nonempty(graph)
        q = quotient(graph)
        base_w = base(q.graph)
        values = tuple(
            base_w[q.partition.class_of[v]] / len(q.partition.members(v))
            for v in range(graph.n)
        )
        return WeightVector(values, graph.labels)

    rule.__name__ = f"lift_{getattr(base, '__name__', 'rule')}"
    return rule


def smooth(base: Rule) -> Rule:
    """One step of the lazy random walk applied to a rule's output:
    w^(x) = sum over y in N[x] of base(y) / (1 + deg(y)).

    Each vertex y spreads its mass evenly over its closed neighborhood, so
    total mass is conserved.
    """

    def rule(graph: Graph) -> WeightVector:
        _require_nonempty(graph)
        base_w = base(graph)
        values = []
        for x in range(graph.n):
            acc = Fraction(0) if base_w.exact else 0.0
            for y in _bits(graph.closed(x)):
                acc += base_w[y] / (1 + graph.degree(y))
            values.append(acc)
        return WeightVector(tuple(values), graph.labels)

    rule.__name__ = f"smooth_{getattr(base, '__name__', 'rule')}"
    return rule


def w_degree(graph: Graph) -> WeightVector:
    """Degree-proportional contrast rule, w(x) proportional to 1 + deg(x).

    Deliberately not clone-robust; the audit harness uses it to prove its
    own sensitivity.
    """
    _require_nonempty(graph)
    total = sum(1 + graph.degree(v) for v in range(graph.n))
    values = tuple(Fraction(1 + graph.degree(v), total) for v in range(graph.n))
    return WeightVector(values, graph.labels)


# ---------------------------------------------------------------------------
# Maximal-clique rules


@dataclass(frozen=True)
class CliqueCover:
    """All maximal cliques of a graph plus the derived per-vertex counts.

    ``membership[v]`` is the number of maximal cliques containing v;
    ``participation[k]`` is the sum over members of 1/membership, the total
    "attention" clique k receives from its vertices.
    """

    cliques: tuple[tuple[int, ...], ...]
    membership: tuple[int, ...]
    participation: tuple[Fraction, ...]


def _maximal_clique_masks(nbrs: Sequence[int], cap: int) -> list[int]:
    """Bron-Kerbosch with pivoting over bitmask vertex sets."""
    out: list[int] = []

    def expand(r: int, p: int, x: int) -> None:
        if not p and not x:
            out.append(r)
            if len(out) > cap:
                raise CapExceeded("maximal-clique enumeration", "cliques", cap)
            return
        pux = p | x
        u = max(_bits(pux), key=lambda v: (p & nbrs[v]).bit_count())
        for v in _bits(p & ~nbrs[u]):
            bit = 1 << v
            expand(r | bit, p & nbrs[v], x & nbrs[v])
            p &= ~bit
            x |= bit

    if nbrs:
        expand(0, (1 << len(nbrs)) - 1, 0)
    return out


def maximal_cliques(graph: Graph, cap: int | None = None) -> CliqueCover:
    _require_nonempty(graph)
    limit = cap if cap is not None else default_caps().cliques
    masks = _maximal_clique_masks(graph.nbrs, limit)
    cliques = sorted(tuple(_bits(m)) for m in masks)
    membership = [0] * graph.n
    for clique in cliques:
        for v in clique:
            membership[v] += 1
    participation = tuple(
        sum(Fraction(1, membership[v]) for v in clique) for clique in cliques
    )
    return CliqueCover(tuple(cliques), tuple(membership), participation)


def w_mcca(graph: Graph, cap: int | None = None) -> WeightVector:
    """Maximal-clique averaging: each maximal clique holds mass 1/#cliques
    and splits it evenly among its members."""
    cover = maximal_cliques(graph, cap)
    k = len(cover.cliques)
    values = [Fraction(0)] * graph.n
    for clique in cover.cliques:
        share = Fraction(1, k * len(clique))
        for v in clique:
            values[v] += share
    return WeightVector(tuple(values), graph.labels)


def w_mccp(graph: Graph, cap: int | None = None) -> WeightVector:
    """Maximal-clique proportional sharing: inside each clique, mass goes
    inversely to how many cliques a member belongs to, normalised by the
    clique's total participation."""
    cover = maximal_cliques(graph, cap)
    k = len(cover.cliques)
    values = [Fraction(0)] * graph.n
    for clique, part in zip(cover.cliques, cover.participation):
        for v in clique:
            values[v] += Fraction(1, k) / (cover.membership[v] * part)
    return WeightVector(tuple(values), graph.labels)


# ---------------------------------------------------------------------------
# Clique partitions and the entropy rule


def clique_partitions(
    graph: Graph, cap: int | None = None
) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All partitions of V into cliques, deterministically ordered.

    The block containing the smallest unassigned vertex is grown in
    lexicographic order, so the all-singletons partition streams first and
    the overall order is stable across runs.
    """
    _require_nonempty(graph)
    limit = cap if cap is not None else default_caps().partition_vertices
    if graph.n > limit:
        raise CapExceeded(
            f"clique-partition enumeration on {graph.n} vertices",
            "partition_vertices",
            limit,
        )
    return _partition_stream(graph)


def _partition_stream(graph: Graph) -> Iterator[tuple[tuple[int, ...], ...]]:
    nbrs = graph.nbrs

    def blocks(prefix: list[int], cand: int) -> Iterator[list[int]]:
        yield prefix
        for u in _bits(cand):
            above = ~((1 << (u + 1)) - 1)
            yield from blocks(prefix + [u], cand & nbrs[u] & above)

    def rec(remaining: int, acc: list[tuple[int, ...]]) -> Iterator[tuple]:
        if not remaining:
            yield tuple(acc)
            return
        v = (remaining & -remaining).bit_length() - 1
        rest = remaining & ~(1 << v)
        for block in blocks([v], rest & nbrs[v]):
            mask = 0
            for u in block:
                mask |= 1 << u
            acc.append(tuple(block))
            yield from rec(remaining & ~mask, acc)
            acc.pop()

    yield from rec((1 << graph.n) - 1, [])


def shannon_bits(masses) -> float:
    """Shannon entropy in bits with the 0·log 0 = 0 convention."""
    h = 0.0
    for m in masses:
        m = float(m)
        if m > 0.0:
            h -= m * math.log2(m)
    return h


def graph_entropy(graph: Graph, pi, cap: int | None = None) -> float:
    """Clique-partition entropy: the minimum over partitions of V into
    cliques of the Shannon entropy of the block masses of pi."""
    return graph_entropy_certificate(graph, pi, cap)[0]


def graph_entropy_certificate(
    graph: Graph, pi, cap: int | None = None
) -> tuple[float, tuple[tuple[int, ...], ...]]:
    """Graph entropy plus an attaining partition, by exhaustive enumeration."""
    masses = [float(v) for v in pi]
    if len(masses) != graph.n:
        raise ValueError(f"{len(masses)} masses for {graph.n} vertices")
    best = math.inf
    best_partition = None
    for partition in clique_partitions(graph, cap):
        h = shannon_bits(sum(masses[v] for v in block) for block in partition)
        if h < best - 1e-15:
            best = h
            best_partition = partition
    return best, best_partition


def class_entropy(graph: Graph, pi) -> float:
    """Shannon entropy of the duplicate-class masses of pi."""
    masses = [float(v) for v in pi]
    part = equivalence_classes(graph)
    return shannon_bits(sum(masses[v] for v in cls) for cls in part.classes)


def _class_mass_matrices(graph: Graph, cap: int | None) -> list[np.ndarray]:
    """Distinct block-aggregation matrices over class masses.

    Any clique partition's block masses, for a vector constant on duplicate
    classes, are a fixed linear image of the class masses; deduplicating the
    matrices collapses the enumeration hugely.
    """
    part = equivalence_classes(graph)
    sizes = [len(cls) for cls in part.classes]
    seen: set[tuple] = set()
    mats: list[np.ndarray] = []
    for partition in clique_partitions(graph, cap):
        rows = []
        for block in partition:
            row = [0] * len(part.classes)
            for v in block:
                row[part.class_of[v]] += 1
            rows.append(tuple(Fraction(c, s) for c, s in zip(row, sizes)))
        key = tuple(sorted(rows))
        if key not in seen:
            seen.add(key)
            mats.append(np.array([[float(f) for f in row] for row in key]))
    return mats


def _entropy_and_grad(masses: np.ndarray) -> tuple[float, np.ndarray]:
    clipped = np.maximum(masses, 1e-300)
    return float(-(clipped * np.log2(clipped)).sum()), -np.log2(clipped) - 1.0 / LN2


def _project_simplex(q: np.ndarray) -> np.ndarray:
    u = np.sort(q)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u * np.arange(1, len(q) + 1) > css)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(q - theta, 0.0)


def w_entropy(
    graph: Graph,
    tol: float = 1e-8,
    max_iter: int | None = None,
    cap: int | None = None,
) -> WeightVector:
    """Entropy-maximising rule.

    Maximises graph entropy over the simplex, restricted to vectors uniform
    on duplicate classes (ties inside a class can always be flattened without
    losing graph entropy, and the Shannon tie-break demands it).  The
    lexicographic tie-breaking by class entropy is realised as a single
    concave objective Phi(q) + mu*H(q) with mu = tol, which perturbs the
    leading value by O(mu log mu) — inside the certified tolerance.  A
    projected supergradient ascent finds the region, an epigraph-form SLSQP
    polish finishes, and every candidate is re-certified against the exact
    partition enumeration before it may win.
    """
    _require_nonempty(graph)
    budget = max_iter if max_iter is not None else default_caps().entropy_iterations
    if graph.n == 1:
        return WeightVector((1.0,), graph.labels)
    part = equivalence_classes(graph)
    k = len(part.classes)
    mats = _class_mass_matrices(graph, cap)
    mu = tol

    def phi(q: np.ndarray) -> tuple[float, np.ndarray]:
        best, best_grad = math.inf, None
        for mat in mats:
            h, grad = _entropy_and_grad(mat @ q)
            if h < best:
                best, best_grad = h, mat.T @ grad
        return best, best_grad

    def objective(q: np.ndarray) -> float:
        return phi(q)[0] + mu * _entropy_and_grad(q)[0]

    q = np.full(k, 1.0 / k)
    best_q, best_val = q.copy(), objective(q)
    ascent_iters = min(2000, budget)
    stall_needed = min(200, max(10, ascent_iters // 4))
    stall = 0
    for it in range(1, ascent_iters + 1):
        _, grad_phi = phi(q)
        grad = grad_phi + mu * _entropy_and_grad(q)[1]
        q = _project_simplex(q + 0.25 / math.sqrt(it) * grad)
        val = objective(q)
        if val > best_val + tol * 1e-3:
            best_val, best_q, stall = val, q.copy(), 0
        else:
            stall += 1
        if stall > stall_needed:
            break

    # Epigraph polish: maximise t + mu*H(q) s.t. H(A q) >= t for every matrix.
    def neg_obj(z: np.ndarray) -> float:
        h, _ = _entropy_and_grad(z[:k])
        return -(z[k] + mu * h)

    def neg_obj_grad(z: np.ndarray) -> np.ndarray:
        _, grad = _entropy_and_grad(z[:k])
        return np.concatenate([-mu * grad, [-1.0]])

    constraints = [
        {"type": "eq", "fun": lambda z: z[:k].sum() - 1.0,
         "jac": lambda z: np.concatenate([np.ones(k), [0.0]])},
    ]
    for mat in mats:
        constraints.append(
            {
                "type": "ineq",
                "fun": lambda z, m=mat: _entropy_and_grad(m @ z[:k])[0] - z[k],
                "jac": lambda z, m=mat: np.concatenate(
                    [m.T @ _entropy_and_grad(m @ z[:k])[1], [-1.0]]
                ),
            }
        )
    z0 = np.concatenate([best_q, [phi(best_q)[0]]])
    res = optimize.minimize(
        neg_obj,
        z0,
        jac=neg_obj_grad,
        bounds=[(0.0, 1.0)] * k + [(0.0, math.log2(graph.n) + 1.0)],
        constraints=constraints,
        method="SLSQP",
        options={"maxiter": 400, "ftol": 1e-14},
    )
    if res.success:
        cand = np.maximum(res.x[:k], 0.0)
        s = cand.sum()
        if s > 0:
            cand /= s
            if objective(cand) > best_val:
                best_val, best_q = objective(cand), cand
    elif stall <= stall_needed:
        # neither the ascent stabilised nor the polish converged
        raise RuntimeError(
            f"entropy rule did not converge within the iteration budget {budget}"
        )

    values = []
    for v in range(graph.n):
        cls = part.class_of[v]
        values.append(max(float(best_q[cls]), 0.0) / len(part.classes[cls]))
    total = sum(values)
    values = tuple(v / total for v in values)
    return WeightVector(values, graph.labels)


# ---------------------------------------------------------------------------
# Rule registry

_ATOMIC: dict[str, Rule] = {
    "uniform": w_uniform,
    "cu": w_cu,
    "mcca": w_mcca,
    "mccp": w_mccp,
    "degree": w_degree,
    "entropy": lambda graph: w_entropy(graph),
}
_COMBINATORS: dict[str, Callable[[Rule], Rule]] = {
    "lift": lift_quotient,
    "smooth": smooth,
}

#: rules whose values are exact rationals (safe for exact integration)
_RATIONAL_ATOMS = {"uniform", "cu", "mcca", "mccp", "degree"}


def registry_names() -> list[str]:
    return sorted(_ATOMIC) + [f"{c}:<rule>" for c in sorted(_COMBINATORS)]


def parse_rule(spec: str) -> tuple[str, Rule]:
    """Resolve a rule expression like ``cu``, ``lift:uniform`` or
    ``smooth:cu`` into a canonical name and a callable."""
    tokens = spec.strip().split(":")
    name = tokens[-1]
    if name not in _ATOMIC:
        raise ValueError(
            f"unknown rule {name!r}; available: {', '.join(registry_names())}"
        )
    rule = _ATOMIC[name]
    for combinator in reversed(tokens[:-1]):
        if combinator not in _COMBINATORS:
            raise ValueError(
                f"unknown rule combinator {combinator!r}; "
                f"available: {', '.join(sorted(_COMBINATORS))}"
            )
        rule = _COMBINATORS[combinator](rule)
    canonical = ":".join(tokens)
    return canonical, rule


def rule_is_rational(spec: str) -> bool:
    """Whether a rule expression yields exact rational weights."""
    return spec.strip().split(":")[-1] in _RATIONAL_ATOMS
