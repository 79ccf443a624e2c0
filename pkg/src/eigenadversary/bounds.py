"""Quantitative bounds on the progress profile and on success probability,
each evaluated instance by instance and collected in a :class:`BoundReport`.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import floor, sqrt
from typing import Sequence

import numpy as np

from .combinatorics import binomial
from .errors import IncompleteMeasurement, NotAPOVM, ParameterOutOfRange, ProfileTooShort
from .johnson import ProgressProfile

INEQUALITY_SLACK = 1e-9
THRESHOLD_RATE = 0.03
THRESHOLD_BASE = 0.65
THEOREM_EPSILON = 0.04


def growth_rate(n: int, k: int) -> float:
    """4 sqrt(K) / sqrt(N)."""
    return 4.0 * sqrt(k / n)


@dataclass
class BoundInstance:
    params: dict
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


@dataclass
class BoundReport:
    name: str
    instances: list[BoundInstance] = field(default_factory=list)
    tolerance: float = INEQUALITY_SLACK
    note: str = ""

    def add(self, lhs: float, rhs: float, **params) -> None:
        self.instances.append(BoundInstance(params, float(lhs), float(rhs)))

    @property
    def worst_slack(self) -> float:
        return min((x.slack for x in self.instances), default=float("inf"))

    @property
    def passed(self) -> bool:
        return self.worst_slack >= -self.tolerance

    @property
    def violations(self) -> list[BoundInstance]:
        return [x for x in self.instances if x.slack < -self.tolerance]

    def summary(self) -> dict:
        worst = self.worst_slack
        return {
            "name": self.name,
            "instances": len(self.instances),
            "worst_slack": None if worst == float("inf") else worst,
            "passed": self.passed,
            "note": self.note,
        }

    def to_csv(self) -> str:
        keys = sorted({k for x in self.instances for k in x.params})
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bound", *keys, "lhs", "rhs", "slack"])
        for x in self.instances:
            w.writerow([self.name, *(x.params.get(k, "") for k in keys), *(f"{v:.12g}" for v in (x.lhs, x.rhs, x.slack))])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def recurrence_check(profile: ProgressProfile, tol: float = INEQUALITY_SLACK) -> BoundReport:
    """q[t+1][j+1] <= q[t][j+1] + 4 sqrt(K/N) q[t][j] for every t and j < K."""
    if profile.steps < 2:
        raise ProfileTooShort("recurrence needs at least one query")
    c = growth_rate(profile.n, profile.k)
    rep = BoundReport("recurrence", tolerance=tol)
    q = profile.q
    for t in range(profile.steps - 1):
        for j in range(profile.k):
            rep.add(q[t + 1, j + 1], q[t, j + 1] + c * q[t, j], t=t, j=j)
    return rep


def binomial_bound(n: int, k: int, t: int, j: int) -> float:
    """C(t, j) (4 sqrt(K/N))^j."""
    return binomial(t, j) * growth_rate(n, k) ** j


def binomial_bound_check(profile: ProgressProfile, tol: float = INEQUALITY_SLACK) -> BoundReport:
    if profile.steps < 1:
        raise ProfileTooShort("empty profile")
    rep = BoundReport("binomial_bound", tolerance=tol)
    for t in range(profile.steps):
        for j in range(profile.k + 1):
            rep.add(profile.q[t, j], binomial_bound(profile.n, profile.k, t, j), t=t, j=j)
    return rep


def threshold_steps(n: int, k: int) -> int:
    """Largest t with t <= 0.03 sqrt(NK)."""
    return floor(THRESHOLD_RATE * sqrt(n * k))


def threshold_check(profile: ProgressProfile, tol: float = INEQUALITY_SLACK) -> BoundReport:
    """p[t][j] < 0.65^j for j > K/2 at every step t <= 0.03 sqrt(NK)."""
    n, k = profile.n, profile.k
    rep = BoundReport("threshold", tolerance=tol)
    last = min(threshold_steps(n, k), profile.steps - 1)
    for t in range(last + 1):
        for j in range(k + 1):
            if 2 * j > k:
                rep.add(profile.p[t, j], THRESHOLD_BASE**j, t=t, j=j)
    if not rep.instances:
        rep.note = "vacuous: no step satisfies t <= 0.03 sqrt(NK)"
    return rep


@dataclass
class SuccessBound:
    j_star: int
    combinatorial_term: float
    tail: float
    bound: float

    @property
    def delta(self) -> float:
        return self.tail


def success_bound(profile: ProgressProfile, j_star: int | None = None) -> SuccessBound:
    """C(N, j*) / C(N, K) + 4 sqrt(q[T][j* + 1]), default j* = floor(K/2)."""
    n, k = profile.n, profile.k
    if j_star is None:
        j_star = k // 2
    if not 0 <= j_star <= k - 1:
        raise ParameterOutOfRange(f"j_star must lie in 0..K-1, got {j_star}")
    comb_term = float(Fraction(binomial(n, j_star), binomial(n, k)))
    tail = float(max(profile.q[-1, j_star + 1], 0.0))
    return SuccessBound(j_star, comb_term, tail, comb_term + 4.0 * sqrt(tail))


def success_bound_check(
    profile: ProgressProfile, success: float, j_star: int | None = None, tol: float = INEQUALITY_SLACK
) -> tuple[SuccessBound, float, bool]:
    sb = success_bound(profile, j_star)
    return sb, success, success <= sb.bound + tol


def _psd_violation(m: np.ndarray) -> float:
    return float(max(0.0, -np.linalg.eigvalsh((m + m.conj().T) / 2).min()))


def nayak_check(encoding: Sequence[np.ndarray], povm: Sequence[np.ndarray], tol: float = INEQUALITY_SLACK) -> tuple[float, bool]:
    """Average success (1/M) sum_x <psi_x|E_x|psi_x> against the d/M ceiling."""
    m = len(encoding)
    if len(povm) != m:
        raise NotAPOVM(f"{len(povm)} POVM elements for {m} encoded values")
    d = povm[0].shape[0]
    total = sum(povm)
    if np.abs(total - np.eye(d)).max() > 1e-9:
        raise NotAPOVM("POVM elements do not sum to the identity")
    if any(_psd_violation(e) > 1e-10 for e in povm):
        raise NotAPOVM("POVM element is not positive semidefinite")
    success = sum(float(np.vdot(v, e @ v).real) for v, e in zip(encoding, povm)) / m
    return success, success <= d / m + tol


def bv_check(psi: np.ndarray, psi_prime: np.ndarray, projectors: Sequence[np.ndarray], tol: float = INEQUALITY_SLACK) -> tuple[float, bool]:
    """Total variation sum_k | |P_k psi|^2 - |P_k psi'|^2 | against 2 |psi - psi'|."""
    d = psi.shape[0]
    if np.abs(sum(projectors) - np.eye(d)).max() > 1e-9:
        raise IncompleteMeasurement("projectors do not sum to the identity")
    dist = sum(abs(np.linalg.norm(p @ psi) ** 2 - np.linalg.norm(p @ psi_prime) ** 2) for p in projectors)
    return float(dist), dist <= 2.0 * np.linalg.norm(psi - psi_prime) + tol


@dataclass
class TheoremTerms:
    n: int
    k: int
    half: int
    k_even: bool
    combinatorial_term: float
    tail_term: float
    c_threshold: float
    epsilon: float
    threshold_rate: float
    threshold_steps: int
    query_budget: float

    def as_dict(self) -> dict:
        return asdict(self)


def theorem_terms(n: int, k: int) -> TheoremTerms:
    """Closed-form ingredients of the K-fold search lower bound at (N, K).

    Report only.  Odd K uses floor(K/2) and sets ``k_even`` to False.
    """
    half = k // 2
    return TheoremTerms(
        n=n,
        k=k,
        half=half,
        k_even=k % 2 == 0,
        combinatorial_term=float(Fraction(binomial(n, half), binomial(n, k))),
        tail_term=4.0 * sqrt(half * THRESHOLD_BASE**half),
        c_threshold=THRESHOLD_BASE**0.25,
        epsilon=THEOREM_EPSILON,
        threshold_rate=THRESHOLD_RATE,
        threshold_steps=threshold_steps(n, k),
        query_budget=THEOREM_EPSILON * sqrt(n * k),
    )
