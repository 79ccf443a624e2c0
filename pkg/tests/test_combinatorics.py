from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eigenadversary.combinatorics import (
    apply_permutation,
    binomial,
    conditional_twirl,
    enumerate_weight_k,
    full_twirl,
    overlap,
    relabel_average,
)
from eigenadversary.errors import DimensionCapExceeded, IndexOutOfRange, InvalidPermutation, LengthMismatch
from eigenadversary.johnson import decomposition


def rand_herm(d, rng):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (z + z.conj().T) / 2


@pytest.mark.parametrize("n,k,want", [(6, 2, 15), (5, 0, 1), (4, 5, 0), (60, 30, 118264581564861424)])
def test_binomial(n, k, want):
    assert binomial(n, k) == want


def test_enumerate_small():
    assert enumerate_weight_k(4, 2).strings == ("0011", "0101", "0110", "1001", "1010", "1100")
    assert enumerate_weight_k(3, 3).strings == ("111",)
    assert enumerate_weight_k(12, 4).dim == 495


def test_enumerate_cap():
    with pytest.raises(DimensionCapExceeded):
        enumerate_weight_k(20, 10, cap=1000)


@given(st.integers(1, 10).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n))))
def test_rank_roundtrip(nk):
    basis = enumerate_weight_k(*nk)
    for r, s in enumerate(basis.strings):
        assert basis.rank(s) == r
        assert s.count("1") == nk[1]
        assert basis.subset_rank(basis.support(r)) == r
    assert list(basis.strings) == sorted(basis.strings)


def test_overlap():
    assert overlap("110100", "101100") == 2
    assert overlap("110100", "110100") == 3
    assert overlap("1100", "0011") == 0
    with pytest.raises(LengthMismatch):
        overlap("110", "1100")


def test_apply_permutation():
    assert apply_permutation("1100", [1, 2, 3, 4]) == "1100"
    assert apply_permutation("1100", [3, 2, 1, 4]) == "0110"
    with pytest.raises(InvalidPermutation):
        apply_permutation("1100", [1, 1, 3, 4])


@given(st.permutations(range(1, 7)), st.integers(0, 14), st.integers(0, 14))
def test_permutation_preserves_overlap(perm, a, b):
    basis = enumerate_weight_k(6, 2)
    x, y = basis.unrank(a), basis.unrank(b)
    assert overlap(apply_permutation(x, perm), apply_permutation(y, perm)) == overlap(x, y)


def test_bit_position_range():
    with pytest.raises(IndexOutOfRange):
        enumerate_weight_k(4, 2).bit(5)


def test_full_twirl_identity_and_classes():
    basis = enumerate_weight_k(6, 2)
    assert np.allclose(full_twirl(np.eye(basis.dim), basis), np.eye(basis.dim))
    out = full_twirl(rand_herm(basis.dim, np.random.default_rng(0)), basis)
    for c in range(basis.k + 1):
        vals = out[basis.overlaps == c]
        assert np.ptp(vals.real) < 1e-12 and np.ptp(vals.imag) < 1e-12


@pytest.mark.parametrize("n,k", [(3, 1), (4, 2), (5, 2)])
def test_full_twirl_matches_explicit_average(n, k):
    basis = enumerate_weight_k(n, k)
    m = rand_herm(basis.dim, np.random.default_rng(n * 10 + k))
    brute = relabel_average(m, basis, list(permutations(range(1, n + 1))))
    assert np.abs(full_twirl(m, basis) - brute).max() < 1e-12


def test_conditional_twirl_matches_stabilizer_average():
    n, k, i = 5, 2, 3
    basis = enumerate_weight_k(n, k)
    m = rand_herm(basis.dim, np.random.default_rng(1))
    perms = [p for p in permutations(range(1, n + 1)) if p[i - 1] == i]
    assert np.abs(conditional_twirl(m, basis, i) - relabel_average(m, basis, perms)).max() < 1e-12


def test_conditional_twirl_refines_full():
    basis = enumerate_weight_k(6, 2)
    m = rand_herm(basis.dim, np.random.default_rng(2))
    assert np.allclose(conditional_twirl(np.eye(basis.dim), basis, 1), np.eye(basis.dim))
    for i in range(1, 7):
        diff = full_twirl(conditional_twirl(m, basis, i), basis) - full_twirl(m, basis)
        assert np.abs(diff).max() < 1e-12


def test_twirl_preserves_tperp_traces():
    basis = enumerate_weight_k(6, 2)
    dec = decomposition(basis)
    m = rand_herm(basis.dim, np.random.default_rng(3))
    tw = full_twirl(m, basis)
    for j in range(basis.k + 1):
        p = dec.t_perp_projector(j)
        assert abs(np.trace(p @ m) - np.trace(p @ tw)) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_twirl_is_idempotent_and_hermitian(seed):
    basis = enumerate_weight_k(7, 3)
    m = rand_herm(basis.dim, np.random.default_rng(seed))
    tw = full_twirl(m, basis)
    assert np.abs(full_twirl(tw, basis) - tw).max() < 1e-12
    assert np.abs(tw - tw.conj().T).max() < 1e-12
    assert abs(np.trace(tw) - np.trace(m)) < 1e-10
