"""Structural checks run by ``eigenadversary verify`` for one (N, K) cell.

Every check reduces to a single non-negative number (a residual, or the size
of an inequality violation) compared against a tolerance; exact checks use
rational arithmetic and pass only at exactly zero.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from itertools import combinations

import numpy as np

from .combinatorics import WeightKBasis, binomial, conditional_twirl, enumerate_weight_k, full_twirl
from .conditional import (
    block_structure,
    rotation_containment_residuals,
    conditional_pair,
    containment_chain_residuals,
    adjacent_containment_residual,
    coefficient_system_residual,
    overlap_closed_form,
    overlap_with_next,
    psi_split_residual,
    query_flip_check,
    tilde_matrix,
    tilde_norms_formula,
    tilde_transfer_residual,
    transfer_complement_residual,
    transfer_residual,
    tuples_avoiding,
)
from .johnson import decomposition, eigen_split

# Equalities at 1e-8, inequalities at 1e-9 additive slack, exact checks at 0.
DEFAULT_TOLERANCES = {
    "dimensions": 0.0,
    "orthogonality": 1e-8,
    "completeness": 1e-8,
    "eigen_uniformity": 1e-8,
    "twirled_weights": 1e-9,
    "tilde_block_structure": 1e-8,
    "containment_chain": 1e-8,
    "psi_split": 1e-8,
    "rotation_in_s_j": 1e-8,
    "rotation_in_s_next": 1e-8,
    "rotation_in_adjacent": 1e-8,
    "next_overlap_formula": 1e-8,
    "beta_fraction_bound": 1e-9,
    "query_flip": 1e-9,
    "coefficient_system": 0.0,
    "transfer_j0": 1e-8,
    "transfer_tilde": 1e-8,
    "transfer_complement": 1e-8,
    "tilde_norm_formula": 1e-8,
    "tilde_norm_symmetry": 1e-8,
}
EXACT_CHECKS = {"dimensions", "coefficient_system"}


@dataclass
class CheckResult:
    name: str
    n: int
    k: int
    worst: float
    tolerance: float
    instances: int

    @property
    def passed(self) -> bool:
        if self.name in EXACT_CHECKS:
            return self.worst == 0
        return self.worst <= self.tolerance

    def as_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (z + z.conj().T) / 2


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    z = rng.standard_normal((d, rank or d)) + 1j * rng.standard_normal((d, rank or d))
    rho = z @ z.conj().T
    return rho / np.trace(rho).real


def random_angles(rng: np.random.Generator, count: int) -> list[tuple[float, float]]:
    th = rng.uniform(0, 2 * np.pi, count)
    return list(zip(np.cos(th), np.sin(th)))


class _Collector:
    def __init__(self, n: int, k: int, tolerances: dict[str, float]):
        self.n, self.k, self.tol = n, k, tolerances
        self.worst: dict[str, float] = {}
        self.count: dict[str, int] = {}

    def add(self, name: str, value: float) -> None:
        self.worst[name] = max(self.worst.get(name, 0.0), float(value))
        self.count[name] = self.count.get(name, 0) + 1

    def results(self) -> list[CheckResult]:
        return [CheckResult(name, self.n, self.k, self.worst[name], self.tol[name], self.count[name]) for name in self.worst]


def verify_cell(
    n: int, k: int, trials: int = 10, seed: int = 0, tolerance: float | None = None
) -> list[CheckResult]:
    tol = dict(DEFAULT_TOLERANCES)
    if tolerance is not None:
        tol = {name: (0.0 if name in EXACT_CHECKS else tolerance) for name in tol}
    rng = np.random.default_rng([seed, n, k])
    basis = enumerate_weight_k(n, k)
    out = _Collector(n, k, tol)
    _johnson_checks(basis, rng, trials, out)
    _conditional_checks(basis, rng, trials, out)
    _exact_checks(n, k, out)
    return out.results()


def _johnson_checks(basis: WeightKBasis, rng, trials: int, out: _Collector) -> None:
    n, k = basis.n, basis.k
    dec = decomposition(basis)
    for j in range(k + 1):
        out.add("dimensions", abs(dec.T[j].dim - binomial(n, j)))
        out.add("dimensions", abs(dec.S[j].dim - (binomial(n, j) - binomial(n, j - 1))))
    ps = dec.s_projectors
    for a, b in combinations(range(k + 1), 2):
        out.add("orthogonality", np.abs(ps[a] @ ps[b]).max())
    out.add("completeness", np.abs(sum(ps) - np.eye(basis.dim)).max())
    dims = np.array([s.dim for s in dec.S])
    for _ in range(trials):
        m = full_twirl(random_hermitian(basis.dim, rng), basis)
        for comp in eigen_split(m, basis):
            out.add("eigen_uniformity", comp.residual)
        lam = np.array([c.eigenvalue for c in eigen_split(full_twirl(random_density(basis.dim, rng, 3), basis), basis)])
        out.add("twirled_weights", max(0.0, -lam.min()))
        out.add("twirled_weights", abs(lam @ dims - 1.0))


def _conditional_checks(basis: WeightKBasis, rng, trials: int, out: _Collector) -> None:
    n, k = basis.n, basis.k
    for i in range(1, n + 1):
        for j in range(k + 1):
            for r in containment_chain_residuals(basis, i, j):
                out.add("containment_chain", r)
        for j in range(k + 1):
            for tup in tuples_avoiding(basis, i, j)[:3]:
                out.add("psi_split", psi_split_residual(basis, i, tup))
        for j in range(k):
            r_in, r_out = rotation_containment_residuals(basis, i, j)
            out.add("rotation_in_s_j", r_in)
            out.add("rotation_in_s_next", r_out)
            for a, b in random_angles(rng, 2):
                out.add("rotation_in_adjacent", adjacent_containment_residual(basis, i, a, b, j))
                out.add("query_flip", query_flip_check(basis, i, a, b, j))
    i = 1
    rho_i = conditional_twirl(random_density(basis.dim, rng, 2), basis, i)
    for j in range(k):
        pair = conditional_pair(basis, i, j)
        for a, b in random_angles(rng, trials):
            out.add("next_overlap_formula", abs(overlap_with_next(basis, i, a, b, j) - overlap_closed_form(pair, a, b)))
        if 2 * j <= k:
            out.add("beta_fraction_bound", max(0.0, pair.beta_fraction() - pair.beta_bound()))
        blk = block_structure(rho_i, basis, i, j)
        out.add("tilde_block_structure", blk.span_residual)
        out.add("tilde_block_structure", blk.spread)
        out.add("transfer_complement", transfer_complement_residual(basis, i, j))
        for tup in tuples_avoiding(basis, i, j):
            out.add("transfer_tilde", tilde_transfer_residual(basis, i, tup))
            if j == 0:
                out.add("transfer_j0", transfer_residual(basis, i, tup))
        f0, f1 = tilde_norms_formula(n, k, j)
        for l, f in ((0, f0), (1, f1)):
            norms = np.linalg.norm(tilde_matrix(basis, i, l, j), axis=0)
            out.add("tilde_norm_formula", np.abs(norms - f).max())
            out.add("tilde_norm_symmetry", norms.max() - norms.min())


def _exact_checks(n: int, k: int, out: _Collector) -> None:
    for j in range(k + 1):
        if k > n - j - 1:
            continue
        for l in range(j):
            out.add("coefficient_system", abs(coefficient_system_residual(n, k, j, l)))
