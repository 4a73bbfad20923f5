"""Tests for weighted orbit counting and the transfer operation."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knotgenus.errors import InputError, OracleCapacityError
from knotgenus.intervals import Pairing, PairingSystem, count_orbits
from knotgenus.weights import (
    OrbitWeightReport,
    SparseVec,
    WeightList,
    transfer,
    weighted_count,
    weighted_count_oracle,
)


def P(dom, rng, rev=False):
    return Pairing.make(dom, rng, rev)


def random_weighted(rng, max_n=150, max_k=8, max_d=4):
    n = rng.randint(1, max_n)
    k = rng.randint(0, max_k)
    ps = []
    for _ in range(k):
        w = rng.randint(1, n)
        a = rng.randint(1, n - w + 1)
        c = rng.randint(1, n - w + 1)
        rev = rng.random() < 0.5 and not (a == c and w == 1)
        ps.append(P((a, a + w - 1), (c, c + w - 1), rev))
    d = rng.randint(1, max_d)
    entries, pos = [], 1
    for _ in range(rng.randint(0, 6)):
        if pos > n:
            break
        lo = rng.randint(pos, n)
        hi = rng.randint(lo, n)
        entries.append(((lo, hi), tuple(rng.randint(0, 9) for _ in range(d))))
        pos = hi + 2
    return PairingSystem(n, ps), WeightList.make(entries, d=d)


class TestWeightList:
    def test_canonical_coalesce(self):
        L = WeightList.make([((1, 2), (1,)), ((3, 5), (1,)), ((7, 8), (0,))])
        assert len(L.entries) == 1
        assert L.entries[0][0].as_tuple() == (1, 5)

    def test_overlap_rejected(self):
        with pytest.raises(InputError):
            WeightList.make([((1, 4), (1,)), ((4, 6), (2,))])

    def test_mixed_dims_rejected(self):
        with pytest.raises(InputError):
            WeightList.make([((1, 2), (1,)), ((4, 5), (1, 2))])

    def test_segment_count_includes_gaps(self):
        L = WeightList.make([((2, 3), (1,)), ((6, 6), (2,))])
        # [1,1] [2,3] [4,5] [6,6] [7,8]
        assert L.segment_count(8) == 5


class TestTransfer:
    def test_case1_disjoint(self):
        out = transfer(P((1, 2), (4, 5)), WeightList.make([((4, 5), (3,))]))
        assert [(iv.as_tuple(), v) for iv, v in out.entries] == [((1, 2), (3,))]

    def test_case2_periodic(self):
        out = transfer(P((1, 5), (3, 7)), WeightList.make([((3, 7), (1,))]))
        got = {iv.as_tuple(): v for iv, v in out.entries}
        # orbits {1,3,5,7} and {2,4,6}: three resp. two weighted points
        assert got == {(1, 1): (3,), (2, 2): (2,)}

    def test_case3_reversing(self):
        out = transfer(P((1, 3), (7, 9), True),
                       WeightList.make([((7, 7), (2,))]))
        assert [(iv.as_tuple(), v) for iv, v in out.entries] == [((3, 3), (2,))]

    def test_untrimmed_reversing_trims_first(self):
        p = P((1, 6), (4, 9), True)  # trims to (1,4)->(6,9)
        L = WeightList.make([((6, 9), (1,))])
        out = transfer(p, L)
        got = {iv.as_tuple(): v for iv, v in out.entries}
        assert got == {(1, 4): (1,)}

    @given(st.data())
    @settings(max_examples=300)
    def test_transfer_preserves_orbit_weights(self, data):
        rng = random.Random(data.draw(st.integers(0, 10**6)))
        sys_, L = random_weighted(rng, max_n=60, max_k=4)
        if not sys_.pairings:
            return
        p = sys_.pairings[0]
        out = transfer(p, L)
        before = weighted_count_oracle(sys_, L).weight_multiset()
        after = weighted_count_oracle(sys_, out).weight_multiset()
        assert before == after

    @given(st.data())
    @settings(max_examples=300)
    def test_growth_at_most_four(self, data):
        rng = random.Random(data.draw(st.integers(0, 10**6)))
        sys_, L = random_weighted(rng, max_n=80, max_k=4)
        if not sys_.pairings:
            return
        p = sys_.pairings[0]
        out = transfer(p, L)
        assert out.segment_count(sys_.n) <= L.segment_count(sys_.n) + 4


class TestWeightedCount:
    def test_all_ones_counts_points(self):
        rng = random.Random(31)
        for _ in range(50):
            sys_, _ = random_weighted(rng, max_n=80)
            L = WeightList.make([((1, sys_.n), (1,))])
            rep = weighted_count(sys_.copy(), L)
            assert sum(v[0] * iv.width for iv, v in rep.entries) == sys_.n
            assert rep.orbit_count == count_orbits(sys_.copy())

    def test_worked_example(self):
        sys_ = PairingSystem(7, [P((1, 5), (3, 7))])
        rep = weighted_count(sys_, WeightList.make([((1, 7), (1,))]))
        assert rep.orbit_count == 2
        assert rep.weight_multiset() == [(3,), (4,)]

    def test_zero_weights(self):
        sys_ = PairingSystem(9, [P((1, 4), (6, 9))])
        rep = weighted_count(sys_, WeightList.make([], d=2))
        assert rep.orbit_count == count_orbits(sys_.copy())
        assert all(v == (0, 0) for _, v in rep.entries)

    def test_empty_pairings_one_entry_per_point(self):
        L = WeightList.make([((2, 3), (5,))])
        rep = weighted_count_oracle(PairingSystem(4), L)
        assert rep.orbit_count == 4
        assert rep.weight_multiset() == [(0,), (0,), (5,), (5,)]

    def test_interval_outside_rejected(self):
        with pytest.raises(InputError):
            weighted_count(PairingSystem(4), WeightList.make([((2, 6), (1,))]))

    def test_randomized_vs_oracle(self):
        rng = random.Random(777)
        for _ in range(300):
            sys_, L = random_weighted(rng)
            got = weighted_count(sys_.copy(), L)
            exp = weighted_count_oracle(sys_, L)
            assert got.orbit_count == exp.orbit_count
            assert got.weight_multiset() == exp.weight_multiset()

    def test_global_conservation_and_growth(self):
        rng = random.Random(52)
        for _ in range(150):
            sys_, L = random_weighted(rng)
            growth = []
            rep = weighted_count(sys_.copy(), L, growth_log=growth)
            total_in = L.total()
            total_out = tuple(
                sum(v[i] * iv.width for iv, v in rep.entries)
                for i in range(L.d))
            assert tuple(total_in) == total_out
            assert all(after <= before + 4 for before, after in growth)

    def test_report_order_never_coalesced(self):
        sys_ = PairingSystem(6)
        L = WeightList.make([((1, 6), (1,))])
        rep = weighted_count(sys_, L)
        assert rep.orbit_count == 6

    def test_engines_agree(self):
        rng = random.Random(8)
        for _ in range(120):
            sys_, L = random_weighted(rng, max_n=200)
            a = weighted_count(sys_.copy(), L, engine="pure")
            b = weighted_count(sys_.copy(), L, engine="fast")
            assert a.entries == b.entries


class TestSparseVec:
    def test_add_and_scale(self):
        u = SparseVec({1: 2, 5: 1})
        v = SparseVec({1: -2, 3: 4})
        assert (u + v).data == {3: 4, 5: 1}
        assert u.scaled(3).data == {1: 6, 5: 3}
        assert not SparseVec()

    def test_weighted_count_sparse(self):
        sys_ = PairingSystem(7, [P((1, 5), (3, 7))])
        L = WeightList.make([((1, 7), SparseVec({42: 1}))], d=None)
        rep = weighted_count(sys_, L)
        assert sorted(v.data.get(42, 0) for _, v in rep.entries) == [3, 4]
