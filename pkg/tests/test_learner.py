"""The recursive learner: store semantics, oracle recovery, budgets, API."""

import itertools
import logging

import numpy as np
import pytest

from lmarvel.citest import OracleTester
from lmarvel.errors import InternalInvariantBroken, InvalidQuery
from lmarvel.graph import Mag, latent_project
from lmarvel.learner import (
    ADJACENT,
    SEPARATED,
    UNKNOWN,
    LMarvel,
    SepSetStore,
    find_adjacent,
    initialize_store,
    lmarvel_learn,
)
from lmarvel.mbound import compute_mb_tc
from lmarvel.simulate import LinearSem, sample

from conftest import five_vertex_dag, five_vertex_mag, make_scenario


class TestSepSetStore:
    def test_verdict_lifecycle(self):
        store = SepSetStore(["A", "B", "C"])
        assert store.verdict("A", "B") == UNKNOWN
        store.record_separated("A", "B", ["C"])
        assert store.verdict("B", "A") == SEPARATED
        store.mark_adjacent("A", "C")
        assert store.verdict("C", "A") == ADJACENT

    def test_multiple_sepsets_keep_first(self):
        store = SepSetStore(["A", "B", "C", "D"])
        store.record_separated("A", "B", ["C"])
        store.record_separated("A", "B", ["C", "D"])
        store.record_separated("A", "B", ["C"])  # duplicate ignored
        assert store.sepsets("A", "B") == [frozenset("C"), frozenset("CD")]
        assert store.first_sepset("A", "B") == frozenset("C")

    def test_conflicts_keep_first_verdict(self, caplog):
        store = SepSetStore(["A", "B", "C"])
        store.mark_adjacent("A", "B")
        with caplog.at_level(logging.WARNING):
            store.record_separated("A", "B", ["C"])
        assert store.verdict("A", "B") == ADJACENT
        store2 = SepSetStore(["A", "B", "C"])
        store2.record_separated("A", "B", ["C"])
        with caplog.at_level(logging.WARNING):
            store2.mark_adjacent("A", "B")
        assert store2.verdict("A", "B") == SEPARATED

    def test_sepset_must_be_disjoint(self):
        store = SepSetStore(["A", "B"])
        with pytest.raises(InvalidQuery):
            store.record_separated("A", "B", ["A"])


class TestInitializeStore:
    def test_worked_example(self, example_mag):
        mb = compute_mb_tc(example_mag.vertices, OracleTester(example_mag))
        store = initialize_store(example_mag.vertices, mb)
        assert store.verdict("Y", "Z") == SEPARATED
        assert store.first_sepset("Y", "Z") == frozenset({"W"})
        assert store.verdict("Y", "T") == SEPARATED
        # pairs inside each other's boundary stay unknown
        assert store.verdict("W", "Y") == UNKNOWN
        assert store.verdict("T", "Z") == UNKNOWN

    def test_all_dependent_table_gives_all_unknown(self):
        mb = {"A": {"B"}, "B": {"A"}}
        store = initialize_store(["A", "B"], mb)
        assert store.verdict("A", "B") == UNKNOWN

    def test_empty(self):
        store = initialize_store([], {})
        assert store.unknown_pairs() == []


class TestFindAdjacent:
    def test_worked_example(self, example_mag):
        tester = OracleTester(example_mag)
        mb = compute_mb_tc(example_mag.vertices, tester)
        store = initialize_store(example_mag.vertices, mb)
        assert find_adjacent("W", mb["W"], tester, store) == {"Y", "T", "Z"}
        assert find_adjacent("T", mb["T"], tester, store) == {"W", "Z"}

    def test_empty_boundary(self, example_mag):
        tester = OracleTester(example_mag)
        store = SepSetStore(example_mag.vertices)
        assert find_adjacent("Y", set(), tester, store) == set()

    def test_resolved_pairs_are_not_retested(self, example_mag):
        tester = OracleTester(example_mag)
        mb = compute_mb_tc(example_mag.vertices, tester)
        store = initialize_store(example_mag.vertices, mb)
        find_adjacent("W", mb["W"], tester, store)
        before = tester.stats().total_tests
        assert find_adjacent("W", mb["W"], tester, store) == {"Y", "T", "Z"}
        assert tester.stats().total_tests == before


class TestOracleLearning:
    def test_worked_example_skeleton(self, example_mag):
        tester = OracleTester(example_mag)
        store, trace = lmarvel_learn(example_mag.vertices, tester, strict=True)
        learned = {frozenset(p) for p in store.adjacent_pairs()}
        assert learned == set(example_mag.skeleton())
        assert trace.removal_order[0] in {"Y", "T", "Z"}
        assert sorted(trace.removal_order) == sorted(example_mag.vertices)

    def test_single_variable(self):
        tester = OracleTester(Mag(["A"]))
        store, trace = lmarvel_learn(["A"], tester)
        assert store.adjacent_pairs() == []
        assert trace.removal_order == ["A"]

    def test_edgeless_graph(self):
        mag = Mag([f"V{i}" for i in range(5)])
        store, _ = lmarvel_learn(mag.vertices, OracleTester(mag))
        assert store.adjacent_pairs() == []
        assert store.unknown_pairs() == []

    def test_empty_input_rejected(self):
        with pytest.raises(InvalidQuery):
            lmarvel_learn([], OracleTester(Mag(["A"])))

    @pytest.mark.parametrize("seed", range(30))
    def test_random_scenarios_recover_skeleton(self, seed):
        dag, observed, _, selection = make_scenario(1400 + seed, n_range=(4, 10))
        mag = latent_project(dag, observed, selection)
        tester = OracleTester(mag)
        store, _ = lmarvel_learn(observed, tester, strict=True)
        learned = {frozenset(p) for p in store.adjacent_pairs()}
        assert learned == set(mag.skeleton())

    @pytest.mark.parametrize("seed", range(15))
    def test_recorded_sepsets_truly_separate(self, seed):
        dag, observed, _, selection = make_scenario(1500 + seed, n_range=(4, 9))
        mag = latent_project(dag, observed, selection)
        store, _ = lmarvel_learn(observed, OracleTester(mag), strict=True)
        for x, y in itertools.combinations(sorted(observed), 2):
            for sepset in store.sepsets(x, y):
                assert mag.m_separated(x, y, sepset), (x, y, sepset)

    @pytest.mark.parametrize("seed", range(15))
    def test_ci_budget_and_no_duplicates(self, seed):
        dag, observed, _, selection = make_scenario(1600 + seed, n_range=(4, 10))
        mag = latent_project(dag, observed, selection)
        tester = OracleTester(mag)
        _, trace = lmarvel_learn(observed, tester, strict=True)
        n = len(observed)
        d = mag.delta_plus()
        budget = 4 * (n * n + n * d * d * 2**d)
        stats = tester.stats()
        assert stats.total_tests <= budget
        # the cache guarantees every logical query runs at most once
        assert trace.total_tests == stats.total_tests

    @pytest.mark.parametrize("seed", range(15))
    def test_processed_vertices_obey_boundary_bound(self, seed):
        dag, observed, _, selection = make_scenario(1700 + seed, n_range=(4, 10))
        mag = latent_project(dag, observed, selection)
        _, trace = lmarvel_learn(observed, OracleTester(mag), strict=True)
        remaining = set(observed)
        for record in trace.iterations:
            current = mag.induced_subgraph(sorted(remaining, key=mag.index))
            bound = current.delta_plus()
            for vertex, mb_size in record.processed:
                assert mb_size <= bound, (vertex, mb_size, bound)
            remaining.discard(record.removed)


class TestFallback:
    """When no vertex passes the removability test (possible only under
    finite-sample errors), strict mode raises and default mode removes the
    smallest-boundary vertex with a warning."""

    def test_strict_mode_raises_when_nothing_removable(self, monkeypatch):
        monkeypatch.setattr(
            "lmarvel.learner.is_removable_ci", lambda *a, **k: False
        )
        mag = five_vertex_mag()
        with pytest.raises(InternalInvariantBroken):
            lmarvel_learn(mag.vertices, OracleTester(mag), strict=True)

    def test_default_mode_falls_back_and_terminates(self, monkeypatch, caplog):
        monkeypatch.setattr(
            "lmarvel.learner.is_removable_ci", lambda *a, **k: False
        )
        mag = five_vertex_mag()
        with caplog.at_level(logging.WARNING):
            store, trace = lmarvel_learn(mag.vertices, OracleTester(mag))
        assert trace.fallback_count == len(trace.iterations) > 0
        assert sorted(trace.removal_order) == sorted(mag.vertices)
        assert any("removable" in r.message for r in caplog.records)


class TestEstimator:
    def make_dataset(self, n=2500, seed=0):
        dag = five_vertex_dag()
        sem = LinearSem.random(dag, "random", seed)
        data, columns = sample(sem, ["T", "W", "Y", "Z"], ["U"], [], n, seed + 1)
        return data, columns

    def test_fit_recovers_the_skeleton(self):
        data, columns = self.make_dataset()
        est = LMarvel(alpha=0.01)
        est.fit(data, columns=columns)
        assert est.pag_.skeleton() == five_vertex_mag().skeleton()
        assert est.ci_stats_.total_tests > 0
        assert est.predict() is est.pag_

    def test_sklearn_params(self):
        est = LMarvel(alpha=0.05, tc_alpha=0.1)
        params = est.get_params()
        assert params["alpha"] == 0.05
        assert params["tc_alpha"] == 0.1
        est.set_params(alpha=0.2)
        assert est.alpha == 0.2

    def test_unfitted_predict_raises(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            LMarvel().predict()

    def test_column_mismatch_rejected(self):
        data, _ = self.make_dataset(n=100)
        with pytest.raises(InvalidQuery):
            LMarvel().fit(data, columns=["A", "B"])
