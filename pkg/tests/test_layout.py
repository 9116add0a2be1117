import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shardsim.circuit import CNOT, H, Y
from shardsim.layout import (
    QubitPermutation,
    ShardConfig,
    amplitude_index,
    decompose_permutation,
    exchange_pairs,
    global_qubits,
    is_local,
    local_qubits,
    needs_communication,
    permutation_distance,
    position_map,
)


def perm_of(*images):
    return QubitPermutation(tuple(images))


@st.composite
def perm_pairs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    a = draw(st.permutations(range(n)))
    b = draw(st.permutations(range(n)))
    m = draw(st.integers(0, n))
    return QubitPermutation(tuple(a)), QubitPermutation(tuple(b)), m


def check_decomposition(perm, new, m):
    """Brute-force check of the three-step contract; returns the step-3 pairs."""
    n = perm.n
    s1, s2 = decompose_permutation(perm, new, m)
    step1 = position_map(perm, s1)
    step2 = position_map(s1, s2)
    step3 = position_map(s2, new)
    assert all(step1[p] == p for p in range(m, n))
    assert all(step1[p] < m for p in range(m))
    assert all(step2[p] == p for p in range(m))
    assert all(step2[p] >= m for p in range(m, n))
    pairs = []
    for p in range(n):
        if step3[p] != p:
            # an involution crossing the local/global boundary
            assert step3[step3[p]] == p
            assert (p < m) != (step3[p] < m)
            if p < m:
                pairs.append((p, step3[p]))
    # composition as position maps reproduces new
    for q in range(n):
        assert step3[step2[step1[perm.map[q]]]] == new.map[q]
    return pairs


class TestQubitPermutation:
    def test_inverse_cached(self):
        p = perm_of(2, 0, 1)
        assert p.inv == (1, 2, 0)
        assert all(p.inv[p(q)] == q for q in range(3))

    @pytest.mark.parametrize("bad", [(0, 0), (1, 2), (-1, 0)])
    def test_rejects_non_bijection(self, bad):
        with pytest.raises(ValueError):
            QubitPermutation(bad)

    def test_text_round_trip(self):
        p = perm_of(3, 1, 0, 2)
        assert p.to_text() == "3,1,0,2"
        assert QubitPermutation.from_text("3,1,0,2") == p

    def test_swap_positions(self):
        p = QubitPermutation.identity(4).swap_positions(0, 3)
        assert p.map == (3, 1, 2, 0)
        q = perm_of(2, 0, 1).swap_positions(0, 2)
        # qubit at position 0 is 1, at position 2 is 0
        assert q.map == (0, 2, 1)

    def test_then(self):
        a, b = perm_of(1, 2, 0), perm_of(2, 0, 1)
        assert a.then(b).map == tuple(b(a(q)) for q in range(3))


class TestShardConfig:
    def test_derived_counts(self):
        cfg = ShardConfig(35, 128)
        assert (cfg.m, cfg.num_global) == (28, 7)
        assert ShardConfig.from_local(35, 28) == cfg

    @pytest.mark.parametrize("k", [0, 3, 6, 12])
    def test_k_power_of_two(self, k):
        with pytest.raises(ValueError):
            ShardConfig(8, k)

    def test_needs_a_local_qubit(self):
        with pytest.raises(ValueError):
            ShardConfig(3, 8)
        with pytest.raises(ValueError):
            ShardConfig.from_local(3, 0)


class TestAmplitudeIndex:
    def test_identity(self):
        assert amplitude_index(5, QubitPermutation.identity(3)) == 5

    def test_permuted(self):
        # bits i0=1, i2=1 go to positions 2 and 1
        assert amplitude_index(5, perm_of(2, 0, 1)) == 6

    def test_reference_split_stays_in_one_shard(self):
        cfg = ShardConfig(35, 128)
        ident = QubitPermutation.identity(35)
        for i in (0, 1, (1 << 28) - 1, 0x5A5A5A5):
            assert amplitude_index(i, ident) >> cfg.m == 0
        assert amplitude_index(1 << 28, ident) >> cfg.m == 1

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 12).flatmap(lambda n: st.permutations(range(n))))
    def test_bijective(self, images):
        perm = QubitPermutation(tuple(images))
        n = perm.n
        seen = {amplitude_index(i, perm) for i in range(1 << n)}
        assert seen == set(range(1 << n))

    @settings(max_examples=100, deadline=None)
    @given(perm_pairs(max_n=10), st.data())
    def test_composition(self, pair, data):
        a, b, _ = pair
        i = data.draw(st.integers(0, (1 << a.n) - 1))
        # relabel positions with b after laying out with a
        j = amplitude_index(i, a)
        assert amplitude_index(j, b) == amplitude_index(i, a.then(b))


class TestLocality:
    def test_identity(self):
        cfg = ShardConfig.from_local(4, 2)
        ident = QubitPermutation.identity(4)
        assert is_local(1, ident, cfg)
        assert not is_local(2, ident, cfg)

    def test_swapped_last_qubit(self):
        cfg = ShardConfig.from_local(4, 2)
        p = QubitPermutation.identity(4).swap_positions(0, 3)
        assert is_local(3, p, cfg)
        assert not is_local(0, p, cfg)

    @settings(max_examples=50, deadline=None)
    @given(perm_pairs())
    def test_partition_sizes(self, pair):
        perm, _, m = pair
        if m == 0:
            return
        cfg = ShardConfig.from_local(perm.n, m)
        flags = [is_local(q, perm, cfg) for q in range(perm.n)]
        assert sum(flags) == m
        assert sorted(local_qubits(perm, cfg) + global_qubits(perm, cfg)) == list(range(perm.n))

    def test_communication_predicate(self):
        cfg = ShardConfig(35, 128)
        ident = QubitPermutation.identity(35)
        assert needs_communication(H(28), ident, cfg)
        assert not needs_communication(H(27), ident, cfg)
        assert needs_communication(Y(34), ident, cfg)
        assert not needs_communication(CNOT(30, 2), ident, cfg)
        assert needs_communication(CNOT(2, 30), ident, cfg)
        assert needs_communication(CNOT(29, 30), ident, cfg)


class TestDecompose:
    def test_same_permutation(self):
        p = perm_of(3, 0, 2, 1)
        s1, s2 = decompose_permutation(p, p, 2)
        assert s1 == p and s2 == p
        assert exchange_pairs(p, p, 2) == []

    def test_direct_exchange(self):
        ident = QubitPermutation.identity(4)
        new = ident.swap_positions(0, 3)
        s1, s2 = decompose_permutation(ident, new, 2)
        assert s1 == ident and s2 == ident
        assert exchange_pairs(ident, new, 2) == [(0, 3)]
        assert check_decomposition(ident, new, 2) == [(0, 3)]

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            decompose_permutation(QubitPermutation.identity(3), QubitPermutation.identity(4), 2)

    def test_exhaustive_small(self):
        for n in range(1, 5):
            perms = [QubitPermutation(p) for p in itertools.permutations(range(n))]
            for a, b in itertools.product(perms, perms):
                for m in range(n + 1):
                    check_decomposition(a, b, m)

    @settings(max_examples=300, deadline=None)
    @given(perm_pairs())
    def test_contracts(self, pair):
        a, b, m = pair
        assert check_decomposition(a, b, m) == exchange_pairs(a, b, m)


class TestDistance:
    def test_unchanged(self):
        p = perm_of(1, 0, 3, 2)
        d = permutation_distance(p, p, 2)
        assert (d.local_changed, d.global_changed, d.num_pairs) == (False, False, 0)

    def test_single_swap(self):
        ident = QubitPermutation.identity(5)
        d = permutation_distance(ident, ident.swap_positions(1, 4), 3)
        assert (d.local_changed, d.global_changed, d.num_pairs) == (False, False, 1)

    def test_local_reversal(self):
        # reverse positions 0..3 of 6, globals untouched
        new = perm_of(3, 2, 1, 0, 4, 5)
        d = permutation_distance(QubitPermutation.identity(6), new, 4)
        assert (d.local_changed, d.global_changed, d.num_pairs) == (True, False, 0)

    def test_global_reversal(self):
        new = perm_of(0, 1, 5, 4, 3, 2)
        d = permutation_distance(QubitPermutation.identity(6), new, 2)
        assert (d.local_changed, d.global_changed, d.num_pairs) == (False, True, 0)

    def test_counts_match_contract(self, rng):
        for _ in range(200):
            n = int(rng.integers(2, 11))
            m = int(rng.integers(1, n + 1))
            a = QubitPermutation(tuple(rng.permutation(n)))
            b = QubitPermutation(tuple(rng.permutation(n)))
            assert permutation_distance(a, b, m).num_pairs == len(check_decomposition(a, b, m))
