"""Weight-K bitstrings, their overlaps, and the two orbit-averaging twirls.

Bit positions are 1-based throughout the public API (position 1 is the
leftmost, most significant character of a bitstring).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from .errors import (
    DimensionCapExceeded,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidPermutation,
    LengthMismatch,
)

DEFAULT_DIMENSION_CAP = 10_000


def binomial(n: int, k: int) -> int:
    """Exact C(n, k), with C(n, k) = 0 outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


@dataclass(frozen=True)
class WeightKBasis:
    """Lexicographically ordered weight-``k`` strings of length ``n``."""

    n: int
    k: int
    strings: tuple[str, ...]
    rank_map: dict[str, int] = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.strings)

    @property
    def dim(self) -> int:
        return len(self.strings)

    def rank(self, x: str) -> int:
        return self.rank_map[x]

    def unrank(self, r: int) -> str:
        return self.strings[r]

    @cached_property
    def bits(self) -> np.ndarray:
        """(dim, n) 0/1 matrix; column ``i - 1`` holds bit ``i``."""
        arr = np.array([[c == "1" for c in s] for s in self.strings], dtype=np.int64)
        return arr.reshape(len(self.strings), self.n)

    @cached_property
    def overlaps(self) -> np.ndarray:
        """Pairwise overlap matrix |{l : x_l = y_l = 1}|."""
        return self.bits @ self.bits.T

    def bit(self, i: int) -> np.ndarray:
        check_position(i, self.n)
        return self.bits[:, i - 1]

    def mask(self, ones: Sequence[int] = (), fixed: dict[int, int] | None = None) -> np.ndarray:
        """Boolean mask of strings with 1 at every position in ``ones`` and the
        prescribed values at ``fixed``."""
        m = np.ones(self.dim, dtype=bool)
        for p in ones:
            m &= self.bit(p) == 1
        for p, v in (fixed or {}).items():
            m &= self.bit(p) == v
        return m

    def subset_rank(self, subset) -> int:
        """Rank of the string whose support is ``subset`` (1-based positions)."""
        s = ["0"] * self.n
        for p in subset:
            check_position(p, self.n)
            s[p - 1] = "1"
        return self.rank_map["".join(s)]

    def support(self, r: int) -> frozenset[int]:
        return frozenset(p + 1 for p, c in enumerate(self.strings[r]) if c == "1")


def check_position(i: int, n: int) -> None:
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"position {i} outside 1..{n}")


def enumerate_weight_k(n: int, k: int, cap: int = DEFAULT_DIMENSION_CAP) -> WeightKBasis:
    if n < 0 or not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    size = binomial(n, k)
    if size > cap:
        raise DimensionCapExceeded(f"C({n},{k}) = {size} exceeds cap {cap}")
    strings = []
    for ones in combinations(range(n), k):
        s = ["0"] * n
        for p in ones:
            s[p] = "1"
        strings.append("".join(s))
    strings.sort()
    return WeightKBasis(n, k, tuple(strings), {s: r for r, s in enumerate(strings)})


def overlap(x: str, y: str) -> int:
    if len(x) != len(y):
        raise LengthMismatch(f"lengths {len(x)} and {len(y)} differ")
    return sum(a == "1" and b == "1" for a, b in zip(x, y))


def apply_permutation(x: str, perm: Sequence[int]) -> str:
    """Relabel positions: bit ``i`` of ``x`` lands at position ``perm[i-1]``."""
    n = len(x)
    if len(perm) != n or sorted(perm) != list(range(1, n + 1)):
        raise InvalidPermutation(f"{perm!r} is not a permutation of 1..{n}")
    out = ["0"] * n
    for i, c in enumerate(x):
        out[perm[i] - 1] = c
    return "".join(out)


def _orbit_average(m: np.ndarray, labels: np.ndarray) -> np.ndarray:
    flat = labels.ravel()
    counts = np.bincount(flat)
    seen = counts > 0
    out_dtype = np.result_type(m.dtype, np.float64)
    sums = np.bincount(flat, weights=m.real.ravel(), minlength=len(counts)).astype(out_dtype)
    if np.iscomplexobj(m):
        sums = sums + 1j * np.bincount(flat, weights=m.imag.ravel(), minlength=len(counts))
    means = np.zeros_like(sums)
    means[seen] = sums[seen] / counts[seen]
    return means[labels]


def _check_square(m: np.ndarray, basis: WeightKBasis) -> np.ndarray:
    m = np.asarray(m)
    if m.shape != (basis.dim, basis.dim):
        raise DimensionMismatch(f"matrix shape {m.shape} vs basis dimension {basis.dim}")
    return m


def full_twirl(m: np.ndarray, basis: WeightKBasis) -> np.ndarray:
    """Average ``m`` over all relabelings of the n bit positions.

    Equivalent to (1/n!) sum_pi U_pi m U_pi^*, computed by averaging over the
    overlap classes of index pairs instead of summing over permutations.
    """
    m = _check_square(m, basis)
    return _orbit_average(m, basis.overlaps)


def conditional_labels(basis: WeightKBasis, i: int) -> np.ndarray:
    xi = basis.bit(i)
    off = basis.overlaps - np.outer(xi, xi)
    return (2 * xi[:, None] + xi[None, :]) * (basis.k + 1) + off


def conditional_twirl(m: np.ndarray, basis: WeightKBasis, i: int) -> np.ndarray:
    """Average ``m`` over the relabelings that fix position ``i``."""
    m = _check_square(m, basis)
    return _orbit_average(m, conditional_labels(basis, i))


def permutation_matrix(basis: WeightKBasis, perm: Sequence[int]) -> np.ndarray:
    """Unitary U_pi with U_pi |x> = |pi(x)> on the weight-k input space."""
    d = basis.dim
    u = np.zeros((d, d))
    for r, x in enumerate(basis.strings):
        u[basis.rank(apply_permutation(x, perm)), r] = 1.0
    return u


def relabel_average(m: np.ndarray, basis: WeightKBasis, perms: Sequence[Sequence[int]]) -> np.ndarray:
    """Brute-force mean of U_pi m U_pi^* over ``perms``; with all n! permutations
    this equals :func:`full_twirl`."""
    m = _check_square(m, basis)
    out = np.zeros(m.shape, dtype=np.result_type(m.dtype, np.float64))
    for perm in perms:
        u = permutation_matrix(basis, perm)
        out += u @ m @ u.T
    return out / len(perms)
