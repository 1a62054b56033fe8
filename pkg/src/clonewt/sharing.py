"""Vertex-removal sharing coefficients for graph rules, and their axioms.

Removing a vertex x from a graph frees its mass; a rule redistributes that
mass among the survivors.  The redistribution splits into a multiplicative
rescaling (read off far from x, where locality pins the weights) and
per-vertex shifts chi(x, y) near x.  Everything here runs in exact rational
arithmetic because the axioms are sign conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .filtration import Graph
from .rules import Rule

__all__ = [
    "InconsistentRescaling",
    "RescaleReport",
    "AxiomReport",
    "eta",
    "chi_graph",
    "private_graph",
    "audit_axioms",
]


class InconsistentRescaling(ValueError):
    """Raised when a rule fails the multiplicative-rescaling axiom at x,
    which leaves the sharing coefficients undefined."""


@dataclass(frozen=True)
class RescaleReport:
    """Rescaling factor observed outside N[x] after removing x.

    ``eta`` is None when the non-neighbour ratios disagree (the rule breaks
    the rescaling axiom at x); ``witness`` then names two non-neighbours
    with different ratios.  When N[x] covers the whole graph the factor is 0
    by convention (nothing is pinned, nothing needs rescaling).
    """

    x: int
    eta: Fraction | None
    consistent: bool
    witness: tuple[int, int] | None = None


def _analyze_removal(
    graph: Graph, rule: Rule, x: int
) -> tuple[RescaleReport, dict[int, Fraction] | None]:
    """One vertex removal: the rescale report plus, when consistent, the
    full row of sharing coefficients chi(x, y) for y != x."""
    if graph.n < 2:
        raise ValueError("cannot remove a vertex from a single-vertex graph")
    w_before = rule(graph)
    survivors = [v for v in range(graph.n) if v != x]
    w_after = rule(graph.remove_vertex(x))
    after = {z: Fraction(w_after[i]) for i, z in enumerate(survivors)}

    outside = [z for z in survivors if not graph.closed(x) & (1 << z)]
    scale = Fraction(1)
    if outside:
        ratios = []
        for z in outside:
            before = Fraction(w_before[z])
            if before == 0:
                raise InconsistentRescaling(
                    f"w(G)({graph.labels[z]}) = 0; rescaling ratio undefined"
                )
            ratios.append((z, after[z] / before))
        first_z, scale = ratios[0]
        for z, ratio in ratios[1:]:
            if ratio != scale:
                return RescaleReport(x, None, False, witness=(first_z, z)), None

    report = RescaleReport(x, scale - 1, True)
    chis = {}
    for y in survivors:
        value = after[y] / scale - Fraction(w_before[y])
        if not graph.closed(x) & (1 << y) and value != 0:  # pragma: no cover
            raise RuntimeError(
                f"chi({graph.labels[x]},{graph.labels[y]}) = {value} != 0 outside N[x]"
            )
        chis[y] = value
    return report, chis


def eta(graph: Graph, rule: Rule, x: int | str) -> RescaleReport:
    """Rescaling factor: w(G-x)(z)/w(G)(z) - 1 for z outside N[x], with all
    eligible z checked for agreement."""
    return _analyze_removal(graph, rule, graph.index(x))[0]


def _require_consistent(graph: Graph, report: RescaleReport):
    if not report.consistent:
        u, v = report.witness
        raise InconsistentRescaling(
            f"rule rescales inconsistently when removing {graph.labels[report.x]}: "
            f"witness non-neighbours {graph.labels[u]}, {graph.labels[v]}"
        )


def chi_graph(graph: Graph, rule: Rule, x: int | str, y: int | str) -> Fraction:
    """Sharing coefficient chi(x, y) = w(G-x)(y)/(1 + eta) - w(G)(y).

    Requires the rescaling at x to be consistent; by construction the value
    is 0 for every y outside N[x], which is re-checked.
    """
    x, y = graph.index(x), graph.index(y)
    if x == y:
        raise ValueError("use private_graph for the diagonal")
    report, chis = _analyze_removal(graph, rule, x)
    _require_consistent(graph, report)
    return chis[y]


def private_graph(graph: Graph, rule: Rule, x: int | str) -> Fraction:
    """Private weight chi(x, x) = eta/(1 + eta).

    The row identity w(x) = chi(x, x) + sum over y != x of chi(x, y) is an
    algebraic consequence of normalisation and is re-derived here exactly.
    """
    x = graph.index(x)
    report, chis = _analyze_removal(graph, rule, x)
    _require_consistent(graph, report)
    value = report.eta / (1 + report.eta)
    w_x = Fraction(rule(graph)[x])
    if w_x != value + sum(chis.values()):  # pragma: no cover - guard
        raise RuntimeError(
            f"row identity failed at {graph.labels[x]}: "
            f"w = {w_x} but chi(x,x) + row = {value + sum(chis.values())}"
        )
    return value


@dataclass
class AxiomReport:
    """Outcome of the four sharing axioms on one graph and rule.

    ``passed[k]`` covers axiom k; witnesses hold up to ``max_witnesses``
    labelled counterexamples each.  Axioms 2-4 are only evaluated at
    vertices where the rescaling is consistent (they presuppose chi).
    """

    passed: dict[int, bool] = field(default_factory=dict)
    witnesses: dict[int, list] = field(default_factory=dict)
    skipped_vertices: list[int] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(self.passed.values())


def audit_axioms(
    graph: Graph,
    rule: Rule,
    axioms: tuple[int, ...] = (1, 2, 3, 4),
    max_witnesses: int = 10,
) -> AxiomReport:
    """Check multiplicative rescaling, non-negative sharing, sharing
    symmetry and sharing domination, with exact witnesses."""
    report = AxiomReport(
        passed={k: True for k in axioms}, witnesses={k: [] for k in axioms}
    )
    n = graph.n
    rows = {x: _analyze_removal(graph, rule, x) for x in range(n)}
    consistent = {x for x, (rep, _) in rows.items() if rep.consistent}
    report.skipped_vertices = sorted(set(range(n)) - consistent)

    def note(axiom: int, witness) -> None:
        report.passed[axiom] = False
        if len(report.witnesses[axiom]) < max_witnesses:
            report.witnesses[axiom].append(witness)

    if 1 in axioms:
        for x in range(n):
            rep, _ = rows[x]
            if not rep.consistent:
                u, v = rep.witness
                note(1, (graph.labels[x], graph.labels[u], graph.labels[v]))

    chi = {
        (x, y): value
        for x in sorted(consistent)
        for y, value in rows[x][1].items()
    }

    if 2 in axioms:
        for (x, y), value in sorted(chi.items()):
            if value < 0:
                note(2, (graph.labels[x], graph.labels[y], value))

    if 3 in axioms:
        for x in sorted(consistent):
            for y in sorted(consistent):
                if x < y and chi[x, y] != chi[y, x]:
                    note(3, (graph.labels[x], graph.labels[y], chi[x, y], chi[y, x]))

    if 4 in axioms:
        for x in sorted(consistent):
            nx = graph.closed(x)
            for y in range(n):
                if y == x:
                    continue
                for z in range(n):
                    if z in (x, y):
                        continue
                    # y dominates z at x iff N[x] & N[z] is a subset of N[x] & N[y]
                    if nx & graph.closed(z) & ~graph.closed(y):
                        continue
                    if chi[x, y] < chi[x, z]:
                        note(
                            4,
                            (
                                graph.labels[x],
                                graph.labels[y],
                                graph.labels[z],
                                chi[x, y],
                                chi[x, z],
                            ),
                        )
    return report
