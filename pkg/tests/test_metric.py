"""Instance loading, validation, and clone construction.

The clone constructor is the attack surface of the whole package: a clone
at radius eps must sit within eps of its template, keep every original
distance untouched, and never break the triangle inequality.  These are
checked both on hand-built cases and property-style over random instances.
"""

import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clonewt import MetricError, add_clone, load_instance, random_instance


class TestLoadInstance:
    def test_points_document(self):
        inst = load_instance(
            {"kind": "points", "points": [[0, 0], [3, 4]], "labels": ["p", "q"]}
        )
        assert inst.n == 2
        assert inst.labels == ("p", "q")
        assert inst.d("p", "q") == pytest.approx(5.0)

    def test_matrix_document_keeps_exact_entries(self):
        doc = {
            "kind": "matrix",
            "distances": [
                [0, Fraction(1, 3), 1],
                [Fraction(1, 3), 0, 1],
                [1, 1, 0],
            ],
        }
        inst = load_instance(doc)
        assert inst.has_exact
        assert inst.dist_exact[0][1] == Fraction(1, 3)

    def test_one_dimensional_points_get_exact_distances(self):
        inst = load_instance(
            {"kind": "points", "points": [[Fraction(1, 10)], [Fraction(7, 10)]]}
        )
        assert inst.has_exact
        assert inst.d_exact(0, 1) == Fraction(3, 5)

    def test_default_labels(self):
        inst = load_instance({"kind": "points", "points": [[0], [1], [2]]})
        assert inst.labels == ("e0", "e1", "e2")

    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "inst.csv"
        path.write_text("a,b,c\n0,1,2\n1,0,1\n2,1,0\n")
        inst = load_instance(path)
        assert inst.labels == ("a", "b", "c")
        assert inst.d("a", "c") == 2.0

    @pytest.mark.parametrize(
        "distances, message",
        [
            ([[0, 1], [1, 0], [1, 1]], "square"),
            ([[0, 1], [2, 0]], "symmetric"),
            ([[0, -1], [-1, 0]], "negative"),
            ([[0, 1, 3], [1, 0, 1], [3, 1, 0]], "triangle"),
            ([[1, 1], [1, 0]], "diagonal"),
        ],
    )
    def test_invalid_matrices_are_rejected(self, distances, message):
        with pytest.raises(MetricError, match=message):
            load_instance({"kind": "matrix", "distances": distances})

    def test_document_round_trip(self, three_points):
        doc = three_points.to_document()
        again = load_instance(json.loads(json.dumps(doc)))
        assert again.labels == three_points.labels
        np.testing.assert_allclose(again.dist, three_points.dist)


class TestAddClone:
    def test_perfect_clone_copies_the_distance_row(self, three_points):
        cloned = add_clone(three_points, "p1", 0, seed=1, label="p1~")
        assert cloned.n == 4
        assert cloned.d("p1", "p1~") == 0.0
        for other in ("p0", "p2"):
            assert cloned.d("p1~", other) == three_points.d("p1", other)

    def test_original_block_is_untouched(self, three_points):
        cloned = add_clone(three_points, "p1", Fraction(1, 10), seed=3)
        sub = cloned.dist[:3, :3]
        np.testing.assert_array_equal(sub, three_points.dist)

    def test_clone_radius_is_respected(self, three_points):
        for seed in range(5):
            cloned = add_clone(three_points, "p0", Fraction(1, 4), seed=seed)
            assert 0 < cloned.d(0, 3) <= 0.25

    def test_point_instances_clone_in_coordinates(self):
        inst = load_instance({"kind": "points", "points": [[0.0, 0.0], [1.0, 0.0]]})
        cloned = add_clone(inst, 0, 0.1, seed=0)
        assert cloned.points is not None
        assert cloned.d(0, 2) <= 0.1 + 1e-12

    def test_same_seed_same_clone(self, three_points):
        a = add_clone(three_points, "p1", Fraction(1, 5), seed=11)
        b = add_clone(three_points, "p1", Fraction(1, 5), seed=11)
        np.testing.assert_array_equal(a.dist, b.dist)

    @given(
        kind=st.sampled_from(["euclidean", "shortest_path"]),
        n=st.integers(min_value=2, max_value=9),
        seed=st.integers(min_value=0, max_value=10_000),
        eps_num=st.integers(min_value=0, max_value=8),
    )
    @settings(max_examples=50, deadline=None)
    def test_cloned_instances_stay_metric(self, kind, n, seed, eps_num):
        """Adding a clone must never violate the triangle inequality.

        load-bearing invariant: the axiom suites take clones of arbitrary
        instances and would report phantom violations on a broken metric.
        """
        inst = random_instance(kind, n, seed)
        eps = Fraction(eps_num, 16)
        cloned = add_clone(inst, n // 2, eps, seed=seed + 1)
        d = cloned.dist
        m = cloned.n
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    assert d[i, j] <= d[i, k] + d[k, j] + 1e-9, (
                        f"triangle broken after clone: kind={kind} n={n} "
                        f"seed={seed} eps={eps} ({i},{j},{k})"
                    )


class TestRandomInstance:
    def test_deterministic(self):
        a = random_instance("euclidean", 6, 42, dim=2)
        b = random_instance("euclidean", 6, 42, dim=2)
        np.testing.assert_array_equal(a.dist, b.dist)

    def test_shortest_path_is_a_metric(self):
        inst = random_instance("shortest_path", 8, 7)
        d = inst.dist
        for i in range(8):
            for j in range(8):
                for k in range(8):
                    assert d[i, j] <= d[i, k] + d[k, j] + 1e-12

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            random_instance("banana", 4, 0)
