import numpy as np
import pytest

from scenariomine.core import (
    ScenarioEntry,
    ScenarioSet,
    Track,
    expand_category,
    normalize_yaw,
    reverse_relationship,
    scenario_and,
    scenario_not,
    scenario_or,
)


def make_set(own, related=None):
    related = related or {}
    return ScenarioSet(
        {
            tid: ScenarioEntry(tuple(ts), {r: tuple(st) for r, st in related.get(tid, {}).items()})
            for tid, ts in own.items()
        }
    )


X = make_set({"a": [1, 2, 3], "b": [2, 4]}, {"a": {"b": [2, 3]}})
EMPTY = ScenarioSet()


class TestCategories:
    def test_vehicle_expansion_exact(self):
        assert expand_category("VEHICLE") == frozenset(
            {
                "ARTICULATED_BUS",
                "BOX_TRUCK",
                "BUS",
                "EGO_VEHICLE",
                "LARGE_VEHICLE",
                "MOTORCYCLE",
                "RAILED_VEHICLE",
                "REGULAR_VEHICLE",
                "SCHOOL_BUS",
                "TRUCK",
                "TRUCK_CAB",
            }
        )

    def test_any_covers_all_31(self):
        assert len(expand_category("ANY")) == 31
        assert "EGO_VEHICLE" in expand_category("ANY")

    def test_unknown_category_lists_names(self):
        with pytest.raises(ValueError, match="PEDESTRIAN"):
            expand_category("UNICORN")


class TestTrack:
    def test_rejects_decreasing_timestamps(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            Track("t", "BUS", [2, 1], np.zeros((2, 3)), [0, 0], np.ones((2, 3)), [1, 1])

    def test_rejects_bad_size(self):
        with pytest.raises(ValueError, match="size"):
            Track("t", "BUS", [1], [[0, 0, 0]], [0], [[1, -1, 1]], [1])

    def test_yaw_normalized(self):
        track = Track("t", "BUS", [1], [[0, 0, 0]], [3 * np.pi], np.ones((1, 3)), [1])
        assert track.yaws[0] == pytest.approx(np.pi)

    def test_normalize_yaw_half_open(self):
        assert normalize_yaw(np.pi) == pytest.approx(np.pi)
        assert normalize_yaw(-np.pi) == pytest.approx(np.pi)


class TestScenarioSetInvariants:
    def test_relationships_clipped_to_own_stamps(self):
        s = make_set({"a": [1, 2]}, {"a": {"b": [1, 5]}})
        assert s.entries["a"].related["b"] == (1,)

    def test_empty_entries_dropped(self):
        s = ScenarioSet({"a": ScenarioEntry(())})
        assert not s.entries

    def test_timestamps_sorted_unique(self):
        s = make_set({"a": [3, 1, 3, 2]})
        assert s.entries["a"].timestamps == (1, 2, 3)

    def test_plain_round_trip(self):
        assert ScenarioSet.from_plain(X.to_plain()) == X


class TestAlgebra:
    def test_and_single_input_identity(self):
        assert scenario_and([X]) == X

    def test_and_empty_absorbs(self):
        assert scenario_and([X, EMPTY]) == EMPTY

    def test_and_requires_input(self):
        with pytest.raises(ValueError):
            scenario_and([])

    def test_or_idempotent(self):
        assert scenario_or([X, X]) == X

    def test_or_empty_identity(self):
        assert scenario_or([X, EMPTY]) == X

    def test_or_direct_union(self):
        a = make_set({"a": [1, 2]})
        b = make_set({"a": [2, 3], "b": [5]})
        assert scenario_or([a, b]) == make_set({"a": [1, 2, 3], "b": [5]})

    def test_or_requires_input(self):
        with pytest.raises(ValueError):
            scenario_or([])

    def test_not_full_complement(self):
        assert scenario_not(X, X) == EMPTY

    def test_not_empty_filter_strips_relationships(self):
        result = scenario_not(X, EMPTY)
        assert result.pairs() == X.pairs()
        assert result.triples() == set()

    def test_not_partition(self):
        f = make_set({"a": [2], "b": [4]})
        kept = scenario_not(X, f)
        assert kept.pairs() | f.pairs() == X.pairs()
        assert kept.pairs() & f.pairs() == set()

    def test_reverse_single_pair(self):
        s = make_set({"v1": [1, 2, 3, 4, 5]}, {"v1": {"p1": [2, 3]}})
        out = reverse_relationship(s)
        assert out == make_set({"p1": [2, 3]}, {"p1": {"v1": [2, 3]}})

    def test_reverse_involution_on_full_relationship_sets(self):
        s = make_set({"a": [1, 2], "b": [2]}, {"a": {"b": [1, 2]}, "b": {"a": [2]}})
        assert reverse_relationship(reverse_relationship(s)) == s

    def test_reverse_drops_relationship_free_keys(self):
        s = make_set({"a": [1]}, {})
        assert reverse_relationship(s) == EMPTY


class TestAlgebraProperties:
    """Randomized invariants over small scenario sets."""

    @staticmethod
    def random_set(rng):
        ids = ["a", "b", "c", "d"]
        own = {}
        related = {}
        for tid in ids:
            if rng.random() < 0.7:
                stamps = sorted(rng.choice(20, size=rng.integers(1, 8), replace=False).tolist())
                own[tid] = stamps
                rel = {}
                for rid in ids:
                    if rid != tid and rng.random() < 0.4:
                        rel[rid] = [t for t in stamps if rng.random() < 0.6]
                related[tid] = rel
        return make_set(own, related)

    def test_and_or_pair_laws(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            sets = [self.random_set(rng) for _ in range(3)]
            conj = scenario_and(sets)
            disj = scenario_or(sets)
            union_pairs = set()
            for s in sets:
                union_pairs |= s.pairs()
                assert conj.pairs() <= s.pairs()
            assert disj.pairs() == union_pairs

    def test_not_partitions_candidates(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            cand = self.random_set(rng)
            mask = self.random_set(rng)
            filtered = scenario_and([cand, mask]) if mask.entries and cand.entries else EMPTY
            kept = scenario_not(cand, filtered)
            assert kept.pairs() | filtered.pairs() == cand.pairs()
            assert kept.pairs() & filtered.pairs() == set()

    def test_reverse_preserves_triples_transposed(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            s = self.random_set(rng)
            rev = reverse_relationship(s)
            assert {(r, t, ts) for t, r, ts in s.triples()} == rev.triples()

    def test_invariant_holds_after_every_operation(self):
        rng = np.random.default_rng(10)
        for _ in range(30):
            sets = [self.random_set(rng) for _ in range(2)]
            for result in (
                scenario_and(sets),
                scenario_or(sets),
                scenario_not(sets[0], sets[1]),
                reverse_relationship(sets[0]),
            ):
                for tid, entry in result.entries.items():
                    assert entry.timestamps
                    own = set(entry.timestamps)
                    for stamps in entry.related.values():
                        assert stamps
                        assert set(stamps) <= own
