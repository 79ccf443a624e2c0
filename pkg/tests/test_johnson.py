from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eigenadversary.combinatorics import binomial, enumerate_weight_k, full_twirl
from eigenadversary.errors import DimensionMismatch, NotDensityMatrix, NotOrbitInvariant
from eigenadversary.johnson import (
    SubspaceBasis,
    build_S,
    build_T,
    decomposition,
    eigen_split,
    gram_schmidt,
    progress_coefficients,
    profile_from_densities,
    psi_tuple,
    tail_sums,
)


def ket(basis, *strings):
    v = np.zeros(basis.dim)
    for s in strings:
        v[basis.rank(s)] = 1.0
    return v / np.linalg.norm(v)


def test_psi_tuple_examples():
    basis = enumerate_weight_k(4, 2)
    assert np.allclose(psi_tuple(basis, {1}), ket(basis, "1100", "1010", "1001"))
    assert np.allclose(psi_tuple(basis, ()), np.full(6, 1 / np.sqrt(6)))
    assert np.allclose(psi_tuple(basis, {1, 2}), ket(basis, "1100"))


def test_gram_schmidt_rank_and_prior():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((6, 3))
    cols = gram_schmidt(np.hstack([a, a[:, :1] + a[:, 1:2]]))
    assert cols.shape == (6, 3)
    assert np.allclose(cols.T @ cols, np.eye(3))
    more = gram_schmidt(rng.standard_normal((6, 2)), prior=cols)
    assert np.abs(cols.T @ more).max() < 1e-12


def test_subspace_dimension_is_asserted():
    with pytest.raises(DimensionMismatch):
        SubspaceBasis(np.eye(4)[:, :2], "T", expected_dim=3)


def brute_rank(vectors):
    return np.linalg.matrix_rank(vectors.T @ vectors, tol=1e-9)


@pytest.mark.parametrize("j,want", [(0, 1), (1, 6), (2, 15)])
def test_build_T_dims(j, want):
    basis = enumerate_weight_k(6, 3)
    t = build_T(basis, j)
    assert t.dim == want
    spanning = np.array([psi_tuple(basis, tup) for tup in combinations(range(1, 7), j)]).T
    assert brute_rank(spanning) == want
    assert t.orthonormality_error() < 1e-12


def test_build_S():
    basis = enumerate_weight_k(6, 2)
    s0 = build_S(basis, 0)
    assert s0.dim == 1
    assert abs(abs(s0.columns[:, 0] @ psi_tuple(basis, ())) - 1) < 1e-12
    assert build_S(basis, 2).dim == 9
    assert sum(s.dim for s in decomposition(enumerate_weight_k(8, 3)).S) == 56


@pytest.mark.parametrize("n,k", [(6, 2), (7, 3), (8, 4)])
def test_decomposition_is_orthogonal_and_complete(n, k):
    dec = decomposition(enumerate_weight_k(n, k))
    ps = dec.s_projectors
    assert np.abs(sum(ps) - np.eye(binomial(n, k))).max() < 1e-10
    for a in range(k + 1):
        assert dec.S[a].dim == binomial(n, a) - binomial(n, a - 1)
        for b in range(a):
            assert np.abs(ps[a] @ ps[b]).max() < 1e-10


def test_eigen_split_examples():
    basis = enumerate_weight_k(6, 2)
    lam = [c.eigenvalue for c in eigen_split(np.eye(basis.dim), basis)]
    assert np.allclose(lam, 1.0)
    psi0 = psi_tuple(basis, ())
    comps = eigen_split(np.outer(psi0, psi0), basis)
    assert np.allclose([c.eigenvalue for c in comps], [1, 0, 0])


def test_eigen_split_rejects_non_invariant():
    basis = enumerate_weight_k(6, 2)
    m = np.zeros((15, 15))
    m[0, 0] = 1
    with pytest.raises(NotOrbitInvariant):
        eigen_split(m, basis)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_eigen_split_against_dense_eigendecomposition(seed):
    basis = enumerate_weight_k(8, 3)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((56, 56))
    m = full_twirl(z + z.T, basis)
    comps = eigen_split(m, basis)
    assert max(c.residual for c in comps) < 1e-8
    predicted = np.sort(np.concatenate([np.full(s.dim, c.eigenvalue) for s, c in zip(decomposition(basis).S, comps)]))
    assert np.abs(predicted - np.linalg.eigvalsh(m)).max() < 1e-8


def test_progress_coefficients_examples():
    basis = enumerate_weight_k(8, 3)
    psi0 = psi_tuple(basis, ())
    p, q = progress_coefficients(np.outer(psi0, psi0), basis)
    assert np.allclose(p, [1, 0, 0, 0]) and np.allclose(q, [1, 0, 0, 0])
    p, q = progress_coefficients(np.eye(56) / 56, basis)
    assert np.allclose(p, np.array([1, 7, 20, 28]) / 56)
    assert np.allclose(q, tail_sums(p))


def test_progress_coefficients_validates():
    basis = enumerate_weight_k(6, 2)
    with pytest.raises(NotDensityMatrix):
        progress_coefficients(2 * np.eye(15) / 15, basis)


def test_profile_invariants():
    basis = enumerate_weight_k(6, 2)
    rhos = [np.eye(15) / 15, np.outer(psi_tuple(basis, ()), psi_tuple(basis, ()))]
    prof = profile_from_densities(rhos, basis)
    assert prof.steps == 2 and prof.check()
    assert np.allclose(prof.q[:, 0], 1)
