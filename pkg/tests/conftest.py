"""Shared fixtures: the two ledger graphs and the worked point instance.

``paw`` is the four-vertex graph (triangle plus a pendant) whose complete
sharing ledger is frozen in the acceptance tests; ``g8`` is the eight-vertex
graph whose class-uniform weights are pinned exactly; ``three_points`` is
the 1-D instance {0, 2/5, 2} whose integrated class-uniform weights were
derived by hand before the implementation existed.
"""

from fractions import Fraction

import pytest

from clonewt import Graph, load_instance


@pytest.fixture
def paw() -> Graph:
    return Graph.from_edges(
        4, [(0, 1), (1, 2), (1, 3), (2, 3)], labels=("a", "b", "c", "d")
    )


@pytest.fixture
def g8() -> Graph:
    edges = [
        (0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3),
        (3, 4), (3, 5), (4, 5), (4, 6), (5, 6), (4, 7), (5, 7),
    ]
    return Graph.from_edges(8, edges)


@pytest.fixture
def three_points():
    return load_instance(
        {
            "kind": "points",
            "points": [[Fraction(0)], [Fraction(2, 5)], [Fraction(2)]],
            "labels": ["p0", "p1", "p2"],
        }
    )
