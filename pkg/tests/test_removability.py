"""Removability: definitional, graphical, and CI-based checks must agree."""

import pytest

from lmarvel.citest import OracleTester
from lmarvel.errors import ChordalityViolated, OracleSizeExceeded
from lmarvel.graph import ARROW, TAIL, Mag
from lmarvel.learner import SepSetStore, is_removable_ci
from lmarvel.removability import (
    RemovabilityVerdict,
    find_removable,
    is_removable_by_definition,
    is_removable_graphical,
)

from conftest import five_vertex_mag, make_projected_mag


def ci_removable(mag: Mag, x: str) -> bool:
    """Run the CI-based check in a fresh oracle context for one vertex."""
    tester = OracleTester(mag)
    store = SepSetStore(mag.vertices)
    mb_x = mag.markov_boundary(x)
    adj_x = mag.adjacent(x)
    return is_removable_ci(x, mb_x, adj_x, tester, store)


def undirected_cycle(n: int) -> Mag:
    names = [f"O{i+1}" for i in range(n)]
    edges = [
        (names[i], names[(i + 1) % n], TAIL, TAIL) for i in range(n)
    ]
    return Mag(names, edges)


class TestWorkedExample:
    def test_removable_set(self, example_mag):
        verdicts = {
            v: is_removable_graphical(example_mag, v).removable
            for v in example_mag.vertices
        }
        assert verdicts == {"T": True, "Y": True, "Z": True, "W": False}

    def test_w_has_condition1_witness(self, example_mag):
        verdict = is_removable_graphical(example_mag, "W")
        kind, y, z = verdict.witness
        assert kind == "adjacency"
        assert {y, z} <= {"Y", "T", "Z"}
        assert not example_mag.is_adjacent(y, z)

    def test_definitional_agrees(self, example_mag):
        for v in example_mag.vertices:
            assert is_removable_by_definition(example_mag, v) == (v != "W")

    def test_ci_based_agrees(self, example_mag):
        for v in example_mag.vertices:
            assert ci_removable(example_mag, v) == (v != "W")

    def test_find_removable_prefers_smallest_boundary(self, example_mag):
        # boundaries: Y has size 1, T and Z size 2, W size 3
        assert find_removable(example_mag) == "Y"


class TestVerdictShape:
    def test_witness_required_exactly_when_not_removable(self):
        with pytest.raises(ValueError):
            RemovabilityVerdict(True, ("adjacency", "A", "B"))
        with pytest.raises(ValueError):
            RemovabilityVerdict(False, None)


class TestConditionTwo:
    def test_collider_path_violation_detected(self):
        # x <-> a -> z, x -> z, and y <-> x: collider path (x, y) with
        # z having x as parent but y, z non-adjacent
        g = Mag(
            ["Y", "X", "Z"],
            [("Y", "X", ARROW, ARROW), ("X", "Z", TAIL, ARROW)],
        )
        verdict = is_removable_graphical(g, "X")
        assert not verdict.removable
        assert verdict.witness[0] == "adjacency"  # z in Ch(x), y in Adj(x)

    def test_longer_collider_path(self):
        # path (X, V, Y) with V a collider, {X, V} subset of Pa(Z), Y not
        # adjacent to Z: condition 2 must catch it
        g = Mag(
            ["X", "V", "Y", "Z"],
            [
                ("X", "V", TAIL, ARROW),
                ("Y", "V", ARROW, ARROW),
                ("X", "Z", TAIL, ARROW),
                ("V", "Z", TAIL, ARROW),
                ("X", "Y", ARROW, ARROW),
            ],
        )
        verdict = is_removable_graphical(g, "X")
        assert not verdict.removable
        assert not is_removable_by_definition(g, "X")


class TestBruteForceLimits:
    def test_size_cap(self):
        g = Mag([f"V{i}" for i in range(11)])
        with pytest.raises(OracleSizeExceeded):
            is_removable_by_definition(g, "V0")


class TestTripleEquivalence:
    @pytest.mark.parametrize("seed", range(60))
    def test_three_checks_agree(self, seed):
        mag = make_projected_mag(700 + seed, n_range=(4, 8))
        for x in mag.vertices:
            expected = is_removable_by_definition(mag, x)
            assert is_removable_graphical(mag, x).removable == expected, x
            assert ci_removable(mag, x) == expected, x


class TestChordlessCycles:
    def test_four_cycle_has_no_removable_vertex(self):
        g = undirected_cycle(4)
        for x in g.vertices:
            verdict = is_removable_graphical(g, x)
            assert not verdict.removable
            assert verdict.witness[0] == "adjacency"
            assert not is_removable_by_definition(g, x)

    def test_five_cycle_has_no_removable_vertex(self):
        g = undirected_cycle(5)
        assert not any(
            is_removable_graphical(g, x).removable for x in g.vertices
        )

    def test_find_removable_rejects_non_chordal(self):
        with pytest.raises(ChordalityViolated):
            find_removable(undirected_cycle(4))


class TestChordalExistence:
    @pytest.mark.parametrize("seed", range(40))
    def test_chordal_mags_have_a_removable_vertex(self, seed):
        mag = make_projected_mag(800 + seed, n_range=(4, 9))
        assert mag.undirected_part_chordal()
        x = find_removable(mag)  # raises if none exists
        assert is_removable_by_definition(mag, x)


class TestBoundaryBound:
    @pytest.mark.parametrize("seed", range(40))
    def test_removable_vertices_have_small_boundaries(self, seed):
        mag = make_projected_mag(900 + seed, n_range=(4, 9))
        bound = mag.delta_plus()
        for x in mag.vertices:
            if is_removable_graphical(mag, x).removable:
                assert len(mag.markov_boundary(x)) <= bound, x
