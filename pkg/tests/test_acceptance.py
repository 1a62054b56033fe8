"""Acceptance gate: every headline guarantee of the package, one test each.

Run ``pytest tests/test_acceptance.py -v`` to get a one-line pass/fail
checklist.  Exact ledger values are asserted with rational arithmetic;
numeric criteria state their tolerance inline.  Two checks are expected
failures (``XFAIL``): the smoothed rule does *not* satisfy one-hop removal
locality, because its walk kernel depends on raw degrees, which change when
a duplicate is removed.  The minimal counterexample is pinned exactly in a
passing test so the boundary of the guarantee stays visible.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from clonewt import Graph, load_instance
from clonewt.audit import (
    attack,
    conjecture_search,
    random_graph,
    run_def31_suite,
    run_graph_suite,
    strict_locality_demo,
)
from clonewt.euclid import (
    chi_gr,
    g_r,
    removal_effect_gr,
    sharing_matrix,
)
from clonewt.filtration import equivalence_classes, threshold_radii
from clonewt.metric import random_instance
from clonewt.rules import (
    graph_entropy_certificate,
    maximal_cliques,
    parse_rule,
    w_entropy,
)
from clonewt.sharing import chi_graph, eta
from clonewt.weighting import Density, MetricWeighting, evaluate_all, riemann_oracle

CLEAN_RULES = ("cu", "lift:uniform", "mcca", "mccp")

_SMOOTH_LOCALITY_LEAK = (
    "the smoothed rule redistributes mass with the kernel 1/(1+deg), and "
    "removing a duplicate changes the degree of every bridge vertex, so "
    "weights one hop beyond the removed vertex's closed neighbourhood move; "
    "minimal witness: the triangle-plus-pendant graph (see the pinned "
    "counterexample test)"
)


def test_criterion_01_class_uniform_reference_weights(g8):
    """The eight-vertex reference graph gets its exact class-uniform weights."""
    _, cu = parse_rule("cu")
    expected = (
        Fraction(1, 15), Fraction(1, 15), Fraction(1, 15), Fraction(1, 5),
        Fraction(1, 10), Fraction(1, 10), Fraction(1, 5), Fraction(1, 5),
    )
    assert tuple(cu(g8)) == expected


def test_criterion_02_four_vertex_sharing_ledger_exact(paw):
    """The full exact ledger of the triangle-plus-pendant example."""
    _, cu = parse_rule("cu")
    _, mcca = parse_rule("mcca")
    _, mccp = parse_rule("mccp")

    assert tuple(cu(paw)) == (
        Fraction(1, 3), Fraction(1, 3), Fraction(1, 6), Fraction(1, 6),
    )
    assert 1 + eta(paw, cu, 0).eta == 2
    assert chi_graph(paw, cu, 0, 1) == Fraction(-1, 6)
    assert chi_graph(paw, cu, 1, 0) == Fraction(1, 6)
    assert tuple(mcca(paw)) == (
        Fraction(1, 4), Fraction(5, 12), Fraction(1, 6), Fraction(1, 6),
    )
    assert tuple(mccp(paw)) == (
        Fraction(1, 3), Fraction(4, 15), Fraction(1, 5), Fraction(1, 5),
    )
    assert chi_graph(paw, mcca, 0, 1) == Fraction(-1, 4)
    assert chi_graph(paw, mccp, 0, 1) == Fraction(-1, 15)


def test_criterion_03_entropy_rule_certified(paw):
    """Maximum-entropy weights within 1e-6, entropy 1.0 bit certified to 1e-9."""
    h = w_entropy(paw)
    np.testing.assert_allclose(list(h), [0.5, 0.0, 0.25, 0.25], atol=1e-6)
    value, partition = graph_entropy_certificate(paw, h)
    assert abs(value - 1.0) <= 1e-9, (
        f"certified entropy {value} is not 1.0 bit within 1e-9"
    )
    assert partition == ((0, 1), (2, 3))


def test_criterion_04_sweep_agrees_with_midpoint_oracle(three_points):
    """The event sweep matches a 1e5-step midpoint quadrature everywhere.

    Tolerance per element: nu_bar * (number of radius events) * step width
    + 1e-9, the worst-case midpoint error for a piecewise-constant
    integrand.  The worked 1-D instance is also checked exactly.
    """
    mw = MetricWeighting.from_names("cu", Density.uniform(1))
    rng = np.random.default_rng(7)
    for i in range(100):
        kind = "euclidean" if i % 2 == 0 else "shortest_path"
        n = int(rng.integers(2, 11))
        dim = int(rng.integers(1, 4))
        inst = random_instance(kind, n, seed=int(rng.integers(2**32)), dim=dim)
        weights = evaluate_all(inst, mw)
        tol = float(len(threshold_radii(inst, 1))) * 1e-5 + 1e-9
        for label in inst.labels:
            oracle = riemann_oracle(inst, label, mw, 100_000)
            assert abs(weights[label] - oracle) <= tol, (
                f"instance {i} ({kind}, n={n}, dim={dim}), element {label}: "
                f"sweep {weights[label]} vs oracle {oracle}, tol {tol}"
            )

    exact = evaluate_all(
        three_points, MetricWeighting.from_names("cu", Density.uniform(2)), exact=True
    )
    assert exact["p0"] == Fraction(17, 60)
    assert exact["p1"] == Fraction(17, 60)
    assert exact["p2"] == Fraction(13, 30)


def test_criterion_05_metric_axiom_suite_zero_violations():
    """Positivity, symmetry, fairness, locality, continuity: 100 instances,
    zero violations for the class-uniform, lifted-uniform and both
    clique-cover rules."""
    report = run_def31_suite(CLEAN_RULES, instances=100, seed=0, alpha=1)
    doc = report.to_document()
    assert doc["passed"], f"violations: {doc['violations'][:3]}"


@pytest.mark.xfail(strict=True, reason=_SMOOTH_LOCALITY_LEAK)
def test_criterion_05_metric_axiom_suite_smoothed_rule():
    """As stated for the smoothed rule -- genuinely unattainable: a perfect
    clone changes bridge degrees, so far weights drift despite a zero
    locality budget."""
    report = run_def31_suite(("smooth:cu",), instances=100, seed=0, alpha=1)
    assert report.to_document()["passed"]


def test_criterion_06_graph_suite_zero_violations():
    """Graph-level symmetry and removal locality: 500 random graphs
    (exhaustive automorphisms, |V| <= 8), zero violations, rational
    arithmetic (tol=0)."""
    report = run_graph_suite(CLEAN_RULES, graphs=500, seed=0, tol=0.0)
    doc = report.to_document()
    assert doc["passed"], f"violations: {doc['violations'][:3]}"


@pytest.mark.xfail(strict=True, reason=_SMOOTH_LOCALITY_LEAK)
def test_criterion_06_graph_suite_smoothed_rule():
    """As stated for the smoothed rule -- genuinely unattainable at the
    graph level for the same reason (one-hop kernel leak)."""
    report = run_graph_suite(("smooth:cu",), graphs=500, seed=0, tol=0.0)
    assert report.to_document()["passed"]


def test_criterion_06_smoothed_rule_minimal_counterexample(paw):
    """Pin the exact leak: on the triangle-plus-pendant graph, removing the
    duplicate d moves the pendant's weight from 1/4 to 5/18, because the
    bridge b drops from degree 3 to 2 and its kernel from 1/4 to 1/3.  The
    smoothed rule still satisfies positivity and symmetry; only one-hop
    removal locality fails."""
    _, smooth_cu = parse_rule("smooth:cu")
    assert tuple(smooth_cu(paw)) == (
        Fraction(1, 4), Fraction(13, 36), Fraction(7, 36), Fraction(7, 36),
    )
    # a is outside N[c] = {b, c, d}, yet removing c's duplicate d moves a
    assert smooth_cu(paw.remove_vertex(3))[0] == Fraction(5, 18)
    assert sum(smooth_cu(paw)) == 1 and min(smooth_cu(paw)) > 0


def test_criterion_06_lifted_uniform_equals_class_uniform_exactly():
    """The class-uniform rule is the quotient lift of the uniform rule;
    rational arithmetic, 100 seeded graphs."""
    _, cu = parse_rule("cu")
    _, lifted = parse_rule("lift:uniform")
    rng = np.random.default_rng(3)
    for _ in range(100):
        g = random_graph(int(rng.integers(2, 9)), float(rng.uniform(0.1, 0.9)), rng)
        assert tuple(cu(g)) == tuple(lifted(g))


def test_criterion_07_interval_sharing_ledger_exact():
    """1-D sharing for two unit-radius intervals at distance 1: weights,
    sharing and private coefficients, and the removal identity with
    rescaling 1/2, all exact."""
    two = [[Fraction(0)], [Fraction(1)]]
    r = Fraction(1)
    assert g_r(two, r, 0) == Fraction(1, 2)
    assert chi_gr(two, r, 0, 1) == Fraction(1, 6)
    assert chi_gr(two, r, 0, 0) == Fraction(1, 3)
    report = removal_effect_gr(two, r, 0)
    assert report.eta == Fraction(1, 2)
    assert report.passed and report.max_residual <= 1e-9


def test_criterion_07_dilution_inequality():
    """Two near-duplicates on one side each share less with the centre than
    a single point at comparable distance on the other side (99% margins)."""
    pts = [[0.0, 0.0], [-1.6, 0.05], [-1.6, -0.05], [1.8, 0.0]]
    chi_split = chi_gr(pts, 1.5, 0, 1, samples=200_000, seed=11)
    chi_solo = chi_gr(pts, 1.5, 0, 3, samples=200_000, seed=12)
    margin = 3 * (chi_split.half_width + chi_solo.half_width)
    assert chi_split.value + margin < chi_solo.value, (
        f"{chi_split.value}+-{chi_split.half_width} !< "
        f"{chi_solo.value}+-{chi_solo.half_width}"
    )


def test_criterion_07_disk_decomposition_within_confidence():
    """2-D Monte-Carlo: on 20 seeded 3-point configurations each weight
    reconstructs from its sharing row within the summed 99% half-widths."""
    for seed in range(20):
        rng = np.random.default_rng(1000 + seed)
        pts = (rng.random((3, 2)) * 2.0).tolist()
        m = sharing_matrix(pts, family="gr", r=1.2, samples=40_000, seed=seed)
        for x in range(3):
            budget = m.weight_half_widths[x] + sum(m.half_widths[x])
            assert abs(m.row_residuals[x]) <= budget, (
                f"seed {seed}, row {x}: residual {m.row_residuals[x]} "
                f"exceeds 99% budget {budget}"
            )


def test_criterion_08_strong_locality_refutation():
    """Constraint propagation on the growing spider ends in a contradiction,
    with the documented intermediate forced values along the way."""
    trace = strict_locality_demo()
    assert trace.refuted
    assert "impossible" in trace.contradiction
    assert "1/2" in trace.contradiction

    numeric = {stage.name: stage.numeric for stage in trace.stages}
    assert numeric["add c2"]["c1"] == 0
    assert numeric["add b2"]["d"] == 0
    assert numeric["add a2"]["c2"] == 0
    final = numeric["add a3"]
    assert final["a1"] == 0 and final["b1"] == Fraction(1, 2)


def test_criterion_09_clique_cover_removal_invariance():
    """Removing any vertex with a duplicate maps the maximal-clique cover
    elementwise: K(G - x) = {K - x}.  200 random graphs that contain a
    non-singleton class, exact set comparison."""
    rng = np.random.default_rng(2026)
    found = 0
    for _ in range(5000):
        if found == 200:
            break
        g = random_graph(int(rng.integers(3, 9)), float(rng.uniform(0.2, 0.8)), rng)
        classes = [c for c in equivalence_classes(g).classes if len(c) > 1]
        if not classes:
            continue
        found += 1
        before = {
            frozenset(g.labels[v] for v in clique)
            for clique in maximal_cliques(g).cliques
        }
        for cls in classes:
            for x in cls:
                label = g.labels[x]
                h = g.remove_vertex(x)
                after = {
                    frozenset(h.labels[v] for v in clique)
                    for clique in maximal_cliques(h).cliques
                }
                expected = {frozenset(s - {label}) for s in before} - {frozenset()}
                assert after == expected, (
                    f"removing clone {label}: cover {sorted(map(sorted, after))} "
                    f"vs expected {sorted(map(sorted, expected))}"
                )
    assert found == 200


def test_criterion_10_duplication_attack_resistance(three_points):
    """Five perfect clones of one point: every element at distance >= alpha
    drifts by exactly zero, while the uniform rule would inflate the target
    family's mass to (1+k)/(n+k)."""
    mw = MetricWeighting.from_names("cu", Density.uniform(1))
    report = attack(three_points, "p2", 5, 0, mw, seed=9, exact=True)
    assert report.far_labels == ("p0", "p1")
    assert report.max_far_drift == Fraction(0)
    assert all(v == 0 for v in report.final_drift.values())
    assert report.within_bound
    assert report.stages[-1].uniform_family_mass == Fraction(1 + 5, 3 + 5)


def test_criterion_11_negative_sharing_search_deterministic():
    """The counterexample search runs its whole budget deterministically and
    reports the four-vertex family witnesses for negative clique-cover
    sharing; it never claims a proof."""
    first = conjecture_search("mcc_axiom2", 200, 0)
    second = conjecture_search("mcc_axiom2", 200, 0)
    assert first.to_document() == second.to_document()
    assert first.witnesses
    head = first.witnesses[0]
    assert head.vertices == ("a", "b", "c", "d")
    assert Fraction(head.value) == Fraction(-1, 4)
    assert "evidence only" in first.note or "not a proof" in first.note


def test_full_suite_runs_inside_the_time_budget():
    """The three heavyweight sweeps together stay well under the overall
    ten-minute target (checked here at one minute combined)."""
    start = time.monotonic()
    run_def31_suite(CLEAN_RULES, instances=100, seed=0, alpha=1)
    run_graph_suite(CLEAN_RULES, graphs=500, seed=0, tol=0.0)
    conjecture_search("mcc_axiom2", 200, 0)
    elapsed = time.monotonic() - start
    assert elapsed < 60, f"heavy sweeps took {elapsed:.1f}s"
