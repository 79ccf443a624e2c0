"""Subspaces conditioned on one distinguished bit position ``i``.

For a tuple of positions avoiding ``i`` and a bit value ``l``:

* ``psi_cond``   uniform superposition over strings with the tuple set and x_i = l
* ``tilde_psi``  its component orthogonal to all size-(j-1) conditional states
* rotation subspaces span alpha * tilde0/|tilde0| + beta * tilde1/|tilde1|

plus the transfer matrix between the x_i = 0 and x_i = 1 halves, and the exact
rational identities for the coefficients of the tilde vectors.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import prod, sqrt
from typing import Iterable, NamedTuple

import numpy as np

from .combinatorics import WeightKBasis, binomial, check_position
from .errors import EmptySubspace, IndexInTuple, NotNormalized, ParameterOutOfRange
from .johnson import SubspaceBasis, decomposition, gram_schmidt, outside_residual, psi_tuple, uniform_vector

NORMALIZATION_TOL = 1e-12


def other_positions(basis: WeightKBasis, i: int) -> list[int]:
    check_position(i, basis.n)
    return [p for p in range(1, basis.n + 1) if p != i]


def tuples_avoiding(basis: WeightKBasis, i: int, j: int) -> list[tuple[int, ...]]:
    if j < 0:
        return []
    return list(combinations(other_positions(basis, i), j))


def _cond_mask(basis: WeightKBasis, i: int, l: int, tup: Iterable[int]) -> tuple[np.ndarray, tuple[int, ...]]:
    check_position(i, basis.n)
    tup = tuple(sorted(set(tup)))
    for p in tup:
        check_position(p, basis.n)
    if i in tup:
        raise IndexInTuple(f"distinguished position {i} appears in tuple {tup}")
    if l not in (0, 1):
        raise ParameterOutOfRange(f"bit value must be 0 or 1, got {l}")
    mask = basis.mask(ones=tup, fixed={i: l})
    if not mask.any():
        raise EmptySubspace(f"no weight-{basis.k} string has {tup} set and x_{i} = {l}")
    return mask, tup


def psi_cond(basis: WeightKBasis, i: int, l: int, tup: Iterable[int]) -> np.ndarray:
    """Unit uniform superposition of strings with the tuple set and x_i = l.

    It has C(N-j-1, K-j-l) terms.
    """
    mask, _ = _cond_mask(basis, i, l, tup)
    return uniform_vector(mask)


def _expected_cond_dim(basis: WeightKBasis, l: int, j: int) -> int | None:
    # x_i = l restricts to a Johnson space on n-1 points with weight k-l.
    n1, k1 = basis.n - 1, basis.k - l
    return binomial(n1, j) if 0 <= j <= min(k1, n1 - k1) else None


@lru_cache(maxsize=256)
def conditional_T(basis: WeightKBasis, i: int, l: int, j: int) -> SubspaceBasis:
    """T^{i,l}_j: span of psi_cond(i, l, tup) over all size-j tuples avoiding i."""
    if j < 0 or j > basis.k - l:
        return SubspaceBasis(np.zeros((basis.dim, 0)), f"T^{{{i},{l}}}_{j}", 0 if j < 0 else None)
    cols = [psi_cond(basis, i, l, t) for t in tuples_avoiding(basis, i, j)]
    span = np.array(cols).T.reshape(basis.dim, len(cols))
    return SubspaceBasis(gram_schmidt(span), f"T^{{{i},{l}}}_{j}", _expected_cond_dim(basis, l, j))


def tilde_psi(basis: WeightKBasis, i: int, l: int, tup: Iterable[int]) -> np.ndarray:
    """Project psi_cond onto the orthocomplement of T^{i,l}_{j-1}."""
    v = psi_cond(basis, i, l, tup)
    j = len(set(tup))
    prev = conditional_T(basis, i, l, j - 1).columns
    if prev.shape[1]:
        v = v - prev @ (prev.conj().T @ v)
    return v


@lru_cache(maxsize=256)
def tilde_matrix(basis: WeightKBasis, i: int, l: int, j: int) -> np.ndarray:
    """Columns are tilde_psi(i, l, tup) for the size-j tuples avoiding i, in lex order."""
    cols = [tilde_psi(basis, i, l, t) for t in tuples_avoiding(basis, i, j)]
    return np.array(cols).T.reshape(basis.dim, len(cols))


def _check_tilde_params(n: int, k: int, j: int) -> None:
    if not (0 <= j <= k - 1 and k < n and k <= n - j - 1):
        raise ParameterOutOfRange(f"need 0 <= j <= K-1 and K <= N-j-1, got N={n}, K={k}, j={j}")


def tilde_norm_sums(n: int, k: int, j: int) -> tuple[Fraction, Fraction]:
    """Exact squared norms of the rescaled tilde vectors, as the product sums

        sum_m C(j,m) (K-m)...(K-j+1) / ((N-K-1)...(N-K+m-j))      (x_i = 0)
        sum_m C(j,m) (K-m-1)...(K-j) / ((N-K)...(N-K+m-j+1))      (x_i = 1)

    The tilde norms are the reciprocal square roots of these.
    """
    _check_tilde_params(n, k, j)
    s0 = sum(
        Fraction(binomial(j, m) * prod(range(k - j + 1, k - m + 1)), prod(range(n - k + m - j, n - k)))
        for m in range(j + 1)
    )
    s1 = sum(
        Fraction(binomial(j, m) * prod(range(k - j, k - m)), prod(range(n - k + m - j + 1, n - k + 1)))
        for m in range(j + 1)
    )
    return s0, s1


def tilde_norms_formula(n: int, k: int, j: int) -> tuple[float, float]:
    s0, s1 = tilde_norm_sums(n, k, j)
    return 1.0 / sqrt(s0), 1.0 / sqrt(s1)


def coeff_solution(n: int, k: int, j: int, m: int) -> Fraction:
    """alpha_m / alpha_j = (-1)^(j-m) C(N-j-1, K-j) / C(N-j-1, K-m)."""
    if not (0 <= m <= j <= k and k <= n - j - 1):
        raise ParameterOutOfRange(f"need 0 <= m <= j <= K <= N-j-1, got N={n}, K={k}, j={j}, m={m}")
    return (-1) ** (j - m) * Fraction(binomial(n - j - 1, k - j), binomial(n - j - 1, k - m))


def coefficient_system_residual(n: int, k: int, j: int, l: int, coeffs: dict[int, Fraction] | None = None) -> Fraction:
    """Left side of sum_{m=l}^{j} alpha_m C(N-j-1, K-m) C(j-l, m-l) = 0 (exact)."""
    if coeffs is None:
        coeffs = {m: coeff_solution(n, k, j, m) for m in range(j + 1)}
    return sum(
        (coeffs[m] * binomial(n - j - 1, k - m) * binomial(j - l, m - l) for m in range(l, j + 1)),
        Fraction(0),
    )


# ---------------------------------------------------------------- pairs


@dataclass(frozen=True)
class ConditionalPair:
    i: int
    j: int
    alpha0: float
    beta0: float
    norm0: float
    norm1: float
    n: int
    k: int

    @property
    def hypot(self) -> float:
        return float(np.hypot(self.alpha0, self.beta0))

    def unit(self) -> tuple[float, float]:
        return self.alpha0 / self.hypot, self.beta0 / self.hypot

    def beta_fraction(self) -> float:
        return self.beta0 / self.hypot

    def beta_bound(self) -> float:
        """sqrt(4(K-j) / (N + 3K - 4j))."""
        return sqrt(4 * (self.k - self.j) / (self.n + 3 * self.k - 4 * self.j))


def conditional_pair(basis: WeightKBasis, i: int, j: int) -> ConditionalPair:
    """(alpha0, beta0) for position ``i`` and tuple size ``j`` from explicit tilde norms."""
    n, k = basis.n, basis.k
    _check_tilde_params(n, k, j)
    tup = tuples_avoiding(basis, i, j)[0]
    norm0 = float(np.linalg.norm(tilde_psi(basis, i, 0, tup)))
    norm1 = float(np.linalg.norm(tilde_psi(basis, i, 1, tup)))
    alpha0 = sqrt((n - k) / (n - j)) * norm0
    beta0 = sqrt((k - j) / (n - j)) * norm1
    return ConditionalPair(i, j, alpha0, beta0, norm0, norm1, n, k)


# ---------------------------------------------------------------- transfer matrix


@dataclass(frozen=True)
class TransferMatrix:
    """M[x, y] = 1 when y (y_i = 0) turns into x (x_i = 1) by moving one 1 onto i."""

    i: int
    rows: np.ndarray
    cols: np.ndarray
    matrix: np.ndarray
    dim: int

    def embedded(self) -> np.ndarray:
        full = np.zeros((self.dim, self.dim))
        full[np.ix_(self.rows, self.cols)] = self.matrix
        return full

    def apply(self, v: np.ndarray) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.result_type(v.dtype, np.float64))
        out[self.rows] = self.matrix @ v[self.cols]
        return out


def transfer_matrix(basis: WeightKBasis, i: int) -> TransferMatrix:
    xi = basis.bit(i)
    rows = np.flatnonzero(xi == 1)
    cols = np.flatnonzero(xi == 0)
    b = basis.bits
    hamming = (b[rows, None, :] != b[None, cols, :]).sum(axis=2)
    return TransferMatrix(i, rows, cols, (hamming == 2).astype(np.float64), basis.dim)


def transfer_factor(n: int, k: int, j: int) -> float:
    """sqrt((K-j)(N-K)): the printed constant relating M psi^{i,0} to psi^{i,1}."""
    return sqrt((k - j) * (n - k))


def tilde_transfer_factor(n: int, k: int, j: int) -> float:
    """(N-K-j) sqrt((K-j)/(N-K)): the constant with M tilde0 = c tilde1.

    Agrees with :func:`transfer_factor` only at j = 0; for j >= 1 the image of
    the untilded state picks up components in T^{i,1}_{j-1}.
    """
    return (n - k - j) * sqrt((k - j) / (n - k))


def transfer_residual(basis: WeightKBasis, i: int, tup: Iterable[int]) -> float:
    """|M psi^{i,0} - sqrt((K-j)(N-K)) psi^{i,1}| (2-norm) for one tuple."""
    tup = tuple(tup)
    m = transfer_matrix(basis, i)
    lhs = m.apply(psi_cond(basis, i, 0, tup))
    rhs = transfer_factor(basis.n, basis.k, len(tup)) * psi_cond(basis, i, 1, tup)
    return float(np.linalg.norm(lhs - rhs))


def tilde_transfer_residual(basis: WeightKBasis, i: int, tup: Iterable[int]) -> float:
    tup = tuple(tup)
    m = transfer_matrix(basis, i)
    lhs = m.apply(tilde_psi(basis, i, 0, tup))
    rhs = tilde_transfer_factor(basis.n, basis.k, len(tup)) * tilde_psi(basis, i, 1, tup)
    return float(np.linalg.norm(lhs - rhs))


def transfer_complement_residual(basis: WeightKBasis, i: int, j: int) -> float:
    """max |P_{T^{i,1}_j} M (I - P_{T^{i,0}_j})|: zero iff M maps the
    orthocomplement of T^{i,0}_j into that of T^{i,1}_j."""
    m = transfer_matrix(basis, i).embedded()
    p0 = conditional_T(basis, i, 0, j).projector
    p1 = conditional_T(basis, i, 1, j).projector
    return float(np.abs(p1 @ m @ (np.eye(basis.dim) - p0)).max())


# ---------------------------------------------------------------- rotation subspaces


@dataclass(frozen=True)
class RotationSubspace:
    i: int
    j: int
    alpha: float
    beta: float
    spanning: np.ndarray
    basis: SubspaceBasis

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def mixed_state(self) -> np.ndarray:
        return self.basis.projector / self.basis.dim


def _unit_tilde_pair(basis: WeightKBasis, i: int, j: int) -> tuple[np.ndarray, np.ndarray]:
    t0 = tilde_matrix(basis, i, 0, j)
    t1 = tilde_matrix(basis, i, 1, j)
    return t0 / np.linalg.norm(t0, axis=0), t1 / np.linalg.norm(t1, axis=0)


def rotation_spanning(basis: WeightKBasis, i: int, alpha: float, beta: float, j: int) -> np.ndarray:
    if abs(alpha**2 + beta**2 - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"alpha^2 + beta^2 = {alpha**2 + beta**2!r}")
    if not 0 <= j <= basis.k - 1:
        raise ParameterOutOfRange(f"rotation subspaces need 0 <= j <= K-1, got j={j}")
    u0, u1 = _unit_tilde_pair(basis, i, j)
    return alpha * u0 + beta * u1


def rotation_subspace(basis: WeightKBasis, i: int, alpha: float, beta: float, j: int) -> RotationSubspace:
    span = rotation_spanning(basis, i, alpha, beta, j)
    sub = SubspaceBasis(gram_schmidt(span), f"S^{i}_(a,b,{j})")
    return RotationSubspace(i, j, alpha, beta, span, sub)


def overlap_with_next(basis: WeightKBasis, i: int, alpha: float, beta: float, j: int) -> float:
    """Tr(P_{S_{j+1}} tau) for the completely mixed state tau on the rotation subspace."""
    rot = rotation_subspace(basis, i, alpha, beta, j)
    s_next = decomposition(basis).S[j + 1].columns
    return float(np.linalg.norm(s_next.conj().T @ rot.basis.columns) ** 2 / rot.dim)


def overlap_closed_form(pair: ConditionalPair, alpha: float, beta: float) -> float:
    """|alpha beta0 - beta alpha0|^2 / (alpha0^2 + beta0^2)."""
    return (alpha * pair.beta0 - beta * pair.alpha0) ** 2 / (pair.alpha0**2 + pair.beta0**2)


def query_flip_check(basis: WeightKBasis, i: int, alpha: float, beta: float, j: int) -> float:
    """max over tuples of |O_i v - v'| where v, v' span the (alpha, beta) and
    (alpha, -beta) rotation subspaces and O_i = diag((-1)^{x_i})."""
    v = rotation_spanning(basis, i, alpha, beta, j)
    v_flipped = rotation_spanning(basis, i, alpha, -beta, j)
    phase = np.where(basis.bit(i) == 1, -1.0, 1.0)
    return float(np.abs(phase[:, None] * v - v_flipped).max())


def rotation_containment_residuals(basis: WeightKBasis, i: int, j: int) -> tuple[float, float]:
    """Residuals of S^i_(a0,b0,j) in S_j and S^i_(b0,-a0,j) in S_{j+1}."""
    pair = conditional_pair(basis, i, j)
    a, b = pair.unit()
    dec = decomposition(basis)
    inner = rotation_subspace(basis, i, a, b, j).basis.columns
    outer = rotation_subspace(basis, i, b, -a, j).basis.columns
    return outside_residual(inner, dec.s_projectors[j]), outside_residual(outer, dec.s_projectors[j + 1])


def adjacent_containment_residual(basis: WeightKBasis, i: int, alpha: float, beta: float, j: int) -> float:
    dec = decomposition(basis)
    rot = rotation_subspace(basis, i, alpha, beta, j).basis.columns
    return outside_residual(rot, dec.s_projectors[j] + dec.s_projectors[j + 1])


# ---------------------------------------------------------------- structural identities


def psi_split_residual(basis: WeightKBasis, i: int, tup: Iterable[int]) -> float:
    """psi_tup = sqrt((N-K)/(N-j)) psi^{i,0}_tup + sqrt((K-j)/(N-j)) psi^{i,1}_tup."""
    tup = tuple(tup)
    n, k, j = basis.n, basis.k, len(tup)
    rhs = sqrt((n - k) / (n - j)) * psi_cond(basis, i, 0, tup)
    if j <= k - 1:
        rhs = rhs + sqrt((k - j) / (n - j)) * psi_cond(basis, i, 1, tup)
    return float(np.abs(psi_tuple(basis, tup) - rhs).max())


def containment_chain_residuals(basis: WeightKBasis, i: int, j: int) -> tuple[float, float]:
    """T_{j-1} in T^{i,0}_{j-1} + T^{i,1}_{j-1} in T_j, as two absorption residuals."""
    dec = decomposition(basis)
    mid = np.hstack([conditional_T(basis, i, 0, j - 1).columns, conditional_T(basis, i, 1, j - 1).columns])
    # the two halves have disjoint supports, so the stacked columns are orthonormal
    mid_proj = mid @ mid.conj().T
    lower = dec.T[j - 1].columns if j >= 1 else np.zeros((basis.dim, 0))
    return outside_residual(lower, mid_proj), outside_residual(mid, dec.t_projectors[j])


class BlockReport(NamedTuple):
    coefficients: np.ndarray
    span_residual: float
    spread: float


def block_structure(rho: np.ndarray, basis: WeightKBasis, i: int, j: int) -> BlockReport:
    """For each size-j tuple avoiding i, express rho applied to the two tilde
    vectors in the basis {tilde0, tilde1} of the same tuple.

    ``coefficients[t]`` is the 2x2 matrix [[a11, a21], [a12, a22]] for tuple t;
    ``span_residual`` measures how far the images leave that span and
    ``spread`` how much the coefficients vary between tuples.
    """
    if not 0 <= j <= basis.k - 1:
        raise ParameterOutOfRange(f"need 0 <= j <= K-1, got {j}")
    t0 = tilde_matrix(basis, i, 0, j)
    t1 = tilde_matrix(basis, i, 1, j)
    coeffs = []
    worst = 0.0
    for c in range(t0.shape[1]):
        g = np.column_stack([t0[:, c], t1[:, c]]).astype(complex)
        img = rho @ g
        sol, *_ = np.linalg.lstsq(g, img, rcond=None)
        worst = max(worst, float(np.abs(img - g @ sol).max()))
        coeffs.append(sol)
    coeffs = np.array(coeffs)
    spread = float(np.abs(coeffs - coeffs[0]).max()) if len(coeffs) else 0.0
    return BlockReport(coeffs, worst, spread)
