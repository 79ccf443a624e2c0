"""Johnson-scheme subspaces T_j, S_j of the weight-K input space and the
progress coefficients p_j, q_j of input-register density matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .combinatorics import WeightKBasis, binomial, check_position, full_twirl
from .errors import DimensionMismatch, NotDensityMatrix, NotOrbitInvariant, TupleTooLarge

RANK_TOL = 1e-8


def gram_schmidt(vectors: np.ndarray, prior: np.ndarray | None = None, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormalize the columns of ``vectors`` against ``prior`` and each other.

    Modified Gram-Schmidt with one re-orthogonalization pass.  A column whose
    norm after projection falls below ``tol`` times its original norm is
    treated as linearly dependent and dropped.  Returns only the new columns.
    """
    vectors = np.asarray(vectors)
    d, m = vectors.shape
    dtype = np.result_type(vectors.dtype, np.float64)
    r0 = 0 if prior is None else prior.shape[1]
    q = np.zeros((d, r0 + m), dtype=np.result_type(dtype, prior.dtype if prior is not None else dtype))
    if r0:
        q[:, :r0] = prior
    r = r0
    for c in range(m):
        v = vectors[:, c].astype(q.dtype, copy=True)
        norm_in = np.linalg.norm(v)
        if norm_in == 0.0:
            continue
        for _ in range(2):
            if r:
                v -= q[:, :r] @ (q[:, :r].conj().T @ v)
        norm_out = np.linalg.norm(v)
        if norm_out <= tol * norm_in:
            continue
        q[:, r] = v / norm_out
        r += 1
    return q[:, r0:r].copy()


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal columns spanning a subspace of the input space."""

    columns: np.ndarray
    label: str
    expected_dim: int | None = None

    def __post_init__(self):
        if self.expected_dim is not None and self.columns.shape[1] != self.expected_dim:
            raise DimensionMismatch(
                f"{self.label}: found dimension {self.columns.shape[1]}, expected {self.expected_dim}"
            )

    @property
    def dim(self) -> int:
        return self.columns.shape[1]

    @property
    def dim_ambient(self) -> int:
        return self.columns.shape[0]

    @cached_property
    def projector(self) -> np.ndarray:
        b = self.columns
        return b @ b.conj().T

    def orthonormality_error(self) -> float:
        b = self.columns
        if b.shape[1] == 0:
            return 0.0
        return float(np.abs(b.conj().T @ b - np.eye(b.shape[1])).max())


def outside_residual(small: np.ndarray, projector: np.ndarray) -> float:
    """max |(I - P) B| for the columns B of ``small``: zero iff span(B) lies in range(P)."""
    if small.shape[1] == 0:
        return 0.0
    return float(np.abs(small - projector @ small).max())


def _check_tuple(basis: WeightKBasis, tup: Iterable[int]) -> tuple[int, ...]:
    tup = tuple(sorted(set(tup)))
    for p in tup:
        check_position(p, basis.n)
    if len(tup) > basis.k:
        raise TupleTooLarge(f"tuple of size {len(tup)} exceeds K={basis.k}")
    return tup


def uniform_vector(mask: np.ndarray) -> np.ndarray:
    v = mask.astype(np.float64)
    return v / np.sqrt(v.sum())


def psi_tuple(basis: WeightKBasis, tup: Iterable[int] = ()) -> np.ndarray:
    """Unit-norm uniform superposition of the strings with 1 at every position of ``tup``.

    Each of the C(N-j, K-j) terms carries amplitude 1/sqrt(C(N-j, K-j)).
    """
    tup = _check_tuple(basis, tup)
    return uniform_vector(basis.mask(ones=tup))


def spanning_T(basis: WeightKBasis, j: int) -> np.ndarray:
    cols = [psi_tuple(basis, t) for t in combinations(range(1, basis.n + 1), j)]
    return np.array(cols).T.reshape(basis.dim, len(cols))


def _expected_T_dim(basis: WeightKBasis, j: int) -> int | None:
    return binomial(basis.n, j) if j <= min(basis.k, basis.n - basis.k) else None


def build_T(basis: WeightKBasis, j: int) -> SubspaceBasis:
    return decomposition(basis).T[j]


def build_S(basis: WeightKBasis, j: int) -> SubspaceBasis:
    return decomposition(basis).S[j]


class JohnsonDecomposition:
    """Nested T_0 <= T_1 <= ... <= T_K and their successive differences S_j.

    Built once per basis (see :func:`decomposition`), then read-only.
    """

    def __init__(self, basis: WeightKBasis):
        self.basis = basis
        k = basis.k
        t_bases: list[SubspaceBasis] = []
        s_bases: list[SubspaceBasis] = []
        acc = np.zeros((basis.dim, 0))
        for j in range(k + 1):
            new = gram_schmidt(spanning_T(basis, j), prior=acc)
            acc = np.hstack([acc, new])
            t_bases.append(SubspaceBasis(acc, f"T_{j}", _expected_T_dim(basis, j)))
            exp_t, exp_prev = _expected_T_dim(basis, j), _expected_T_dim(basis, j - 1) if j else 0
            exp_s = None if exp_t is None or exp_prev is None else exp_t - exp_prev
            s_bases.append(SubspaceBasis(new, f"S_{j}", exp_s))
        self.T = tuple(t_bases)
        self.S = tuple(s_bases)

    @property
    def k(self) -> int:
        return self.basis.k

    @cached_property
    def s_projectors(self) -> tuple[np.ndarray, ...]:
        return tuple(s.projector for s in self.S)

    @cached_property
    def t_projectors(self) -> tuple[np.ndarray, ...]:
        return tuple(t.projector for t in self.T)

    def t_perp_projector(self, j: int) -> np.ndarray:
        """Projector onto the orthocomplement of T_j."""
        return np.eye(self.basis.dim) - self.t_projectors[j]

    def s_sum_projector(self, js: Sequence[int]) -> np.ndarray:
        out = np.zeros((self.basis.dim, self.basis.dim))
        for j in js:
            out += self.s_projectors[j]
        return out


@lru_cache(maxsize=32)
def decomposition(basis: WeightKBasis) -> JohnsonDecomposition:
    return JohnsonDecomposition(basis)


class EigenComponent(NamedTuple):
    j: int
    eigenvalue: float
    residual: float


def eigen_split(m: np.ndarray, basis: WeightKBasis, invariance_tol: float = 1e-10) -> list[EigenComponent]:
    """Eigenvalue of an overlap-invariant matrix on each S_j, with the
    residual max |(m - lambda_j) B_j| certifying that S_j is an eigenspace."""
    m = np.asarray(m)
    drift = float(np.abs(m - full_twirl(m, basis)).max())
    if drift > invariance_tol:
        raise NotOrbitInvariant(f"entries vary within an overlap class by {drift:.3g}")
    out = []
    for j, s in enumerate(decomposition(basis).S):
        b = s.columns
        if s.dim == 0:
            out.append(EigenComponent(j, 0.0, 0.0))
            continue
        lam = np.trace(b.conj().T @ m @ b) / s.dim
        res = np.abs(m @ b - lam * b).max()
        out.append(EigenComponent(j, float(lam.real), float(res)))
    return out


def check_density_matrix(rho: np.ndarray, trace_tol: float = 1e-9, psd_tol: float = 1e-10) -> None:
    herm = float(np.abs(rho - rho.conj().T).max())
    if herm > trace_tol:
        raise NotDensityMatrix(f"not Hermitian (deviation {herm:.3g})")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise NotDensityMatrix(f"trace {tr!r} differs from 1")
    lo = float(np.linalg.eigvalsh(rho).min())
    if lo < -psd_tol:
        raise NotDensityMatrix(f"minimum eigenvalue {lo:.3g} is negative")


def tail_sums(p: np.ndarray) -> np.ndarray:
    """q_j = sum_{j' >= j} p_j' along the last axis."""
    return np.flip(np.cumsum(np.flip(p, axis=-1), axis=-1), axis=-1)


def progress_coefficients(rho: np.ndarray, basis: WeightKBasis, validate: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Weights p_j = Tr(P_{S_j} rho) and tail sums q_j = sum_{j' >= j} p_j'."""
    rho = np.asarray(rho)
    if rho.shape != (basis.dim, basis.dim):
        raise DimensionMismatch(f"rho shape {rho.shape} vs basis dimension {basis.dim}")
    if validate:
        check_density_matrix(rho)
    p = np.array(
        [np.einsum("ij,ik,kj->", s.columns.conj(), rho, s.columns).real for s in decomposition(basis).S]
    )
    return p, tail_sums(p)


@dataclass
class ProgressProfile:
    """Per-step progress arrays: ``p[t, j]``, ``q[t, j]`` and query weights ``a2[t, i]``.

    ``a2`` has one row per query (captured right before it), so it is one row
    shorter than ``p``.
    """

    n: int
    k: int
    p: np.ndarray
    q: np.ndarray
    query_weights: np.ndarray

    @property
    def steps(self) -> int:
        return self.p.shape[0]

    def invariant_violations(self) -> dict[str, float]:
        return {
            "normalization": float(np.abs(self.p.sum(axis=1) - 1.0).max()),
            "tail_sum": float(np.abs(self.q - tail_sums(self.p)).max()),
            "negativity": float(max(0.0, -self.p.min())),
            "monotone_q": float(max(0.0, np.diff(self.q, axis=1).max(initial=0.0))),
        }

    def check(self) -> bool:
        v = self.invariant_violations()
        return (
            v["normalization"] <= 1e-9
            and v["tail_sum"] <= 1e-12
            and v["negativity"] <= 1e-10
            and v["monotone_q"] <= 1e-10
        )


def profile_from_densities(rhos: Sequence[np.ndarray], basis: WeightKBasis, query_weights=None) -> ProgressProfile:
    rows = [progress_coefficients(r, basis) for r in rhos]
    p = np.array([r[0] for r in rows])
    q = np.array([r[1] for r in rows])
    if query_weights is None:
        query_weights = np.zeros((max(len(rhos) - 1, 0), basis.n + 1))
    return ProgressProfile(basis.n, basis.k, p, q, np.asarray(query_weights))
