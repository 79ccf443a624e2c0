"""Query algorithms run jointly with a superposition over all weight-K inputs.

The algorithm register is workspace (d_w) x query index (n + 1).  A joint
state is stored as an array of shape ``(d_w, n + 1, C(n, k))``; the combined
algorithm-register outcome ``a = w * (n + 1) + i`` indexes the rows of
``amplitudes.reshape(d_w * (n + 1), -1)``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .combinatorics import DEFAULT_DIMENSION_CAP, WeightKBasis, enumerate_weight_k
from .errors import DimensionCapExceeded, NormDrift, NotUnitary, ReadoutUndefined, UnsupportedK
from .johnson import ProgressProfile, profile_from_densities

UNITARY_TOL = 1e-9
NORM_TOL = 1e-9
NO_ANSWER = -1


def unitarity_error(u: np.ndarray) -> float:
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())


@dataclass(frozen=True)
class AlgorithmSpec:
    """U_0, O, U_1, ..., O, U_T acting on workspace x query-index registers.

    ``readout[a]`` is the rank (in the weight-K basis) of the subset announced
    when the algorithm register is measured in outcome ``a``, or ``NO_ANSWER``.
    """

    n: int
    k: int
    d_w: int
    unitaries: tuple[np.ndarray, ...]
    readout: np.ndarray | None
    name: str = "custom"

    def __post_init__(self):
        d_a = self.d_w * (self.n + 1)
        if not self.unitaries:
            raise ValueError("an algorithm needs at least U_0")
        for t, u in enumerate(self.unitaries):
            if u.shape != (d_a, d_a):
                raise NotUnitary(f"U_{t} has shape {u.shape}, expected {(d_a, d_a)}")
            err = unitarity_error(u)
            if err > UNITARY_TOL:
                raise NotUnitary(f"U_{t} deviates from unitarity by {err:.3g}")
        if self.readout is not None and len(self.readout) != d_a:
            raise ReadoutUndefined(f"readout covers {len(self.readout)} outcomes, register has {d_a}")

    @property
    def queries(self) -> int:
        return len(self.unitaries) - 1

    @property
    def d_a(self) -> int:
        return self.d_w * (self.n + 1)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.n},{self.k},{self.d_w};".encode())
        for u in self.unitaries:
            h.update(np.ascontiguousarray(u, dtype=np.complex128).tobytes())
        if self.readout is not None:
            h.update(np.asarray(self.readout, dtype=np.int64).tobytes())
        return h.hexdigest()


@dataclass
class JointState:
    amplitudes: np.ndarray

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.amplitudes.shape

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def as_matrix(self) -> np.ndarray:
        d_w, d_q, d_i = self.amplitudes.shape
        return self.amplitudes.reshape(d_w * d_q, d_i)


def _check_norm(state: JointState, where: str) -> JointState:
    drift = abs(state.norm() - 1.0)
    if drift > NORM_TOL:
        raise NormDrift(f"state norm drifted by {drift:.3g} after {where}")
    return state


def init_joint_state(spec: AlgorithmSpec, basis: WeightKBasis, cap: int = DEFAULT_DIMENSION_CAP) -> JointState:
    """|0>_W |0>_Q (x) uniform superposition over the weight-K inputs."""
    if basis.dim > cap:
        raise DimensionCapExceeded(f"input register dimension {basis.dim} exceeds cap {cap}")
    amp = np.zeros((spec.d_w, spec.n + 1, basis.dim), dtype=np.complex128)
    amp[0, 0, :] = 1.0 / np.sqrt(basis.dim)
    return JointState(amp)


def oracle_phases(basis: WeightKBasis) -> np.ndarray:
    """(n + 1, C(n,k)) array of (-1)^{x_i}, with row 0 (no query) all ones."""
    phases = np.ones((basis.n + 1, basis.dim))
    phases[1:, :] = 1 - 2 * basis.bits.T
    return phases


def apply_oracle(state: JointState, basis: WeightKBasis) -> JointState:
    return _check_norm(JointState(state.amplitudes * oracle_phases(basis)[None, :, :]), "oracle")


def apply_unitary(state: JointState, u: np.ndarray) -> JointState:
    err = unitarity_error(u)
    if err > UNITARY_TOL:
        raise NotUnitary(f"unitary deviates by {err:.3g}")
    d_w, d_q, d_i = state.dims
    out = (u @ state.as_matrix()).reshape(d_w, d_q, d_i)
    return _check_norm(JointState(out), "unitary")


def reduced_input_density(state: JointState) -> np.ndarray:
    """rho[x, y] = sum_a psi[a, x] conj(psi[a, y])."""
    a = state.as_matrix()
    return a.T @ a.conj()


@dataclass
class QueryComponents:
    """Split of the state by query-register value i, taken right before a query."""

    weights: np.ndarray
    densities: list[np.ndarray | None]

    def reconstruct(self) -> np.ndarray:
        d = next(r.shape[0] for r in self.densities if r is not None)
        out = np.zeros((d, d), dtype=np.complex128)
        for w, r in zip(self.weights, self.densities):
            if r is not None:
                out += w * r
        return out


def query_components(state: JointState, weight_floor: float = 1e-12) -> QueryComponents:
    amp = state.amplitudes
    weights = np.einsum("wix,wix->i", amp, amp.conj()).real
    dens: list[np.ndarray | None] = []
    for i, w in enumerate(weights):
        if w <= weight_floor:
            dens.append(None)
            continue
        block = amp[:, i, :]
        dens.append(block.T @ block.conj() / w)
    return QueryComponents(weights, dens)


@dataclass
class RunResult:
    spec: AlgorithmSpec
    basis: WeightKBasis
    densities: list[np.ndarray]
    components: list[QueryComponents]
    final: JointState
    _profile: ProgressProfile | None = field(default=None, repr=False)

    def profile(self) -> ProgressProfile:
        if self._profile is None:
            weights = np.array([c.weights for c in self.components]).reshape(len(self.components), self.spec.n + 1)
            self._profile = profile_from_densities(self.densities, self.basis, weights)
        return self._profile

    def success_probability(self) -> float:
        return success_probability(self.final, self.spec)


def run(spec: AlgorithmSpec, basis: WeightKBasis | None = None) -> RunResult:
    """Simulate U_0, O, U_1, ..., O, U_T on the joint state.

    ``densities[t]`` is the input-register state right after the t-th query
    (``densities[0]`` before any query); ``components[t]`` is captured right
    before query t + 1.
    """
    if basis is None:
        basis = enumerate_weight_k(spec.n, spec.k)
    state = init_joint_state(spec, basis)
    densities = [reduced_input_density(state)]
    components = []
    state = apply_unitary(state, spec.unitaries[0])
    for u in spec.unitaries[1:]:
        components.append(query_components(state))
        state = apply_oracle(state, basis)
        densities.append(reduced_input_density(state))
        state = apply_unitary(state, u)
    return RunResult(spec, basis, densities, components, state)


def success_probability(final: JointState, spec: AlgorithmSpec) -> float:
    """Probability that measuring the algorithm and input registers yields an
    announced subset equal to the support of the input."""
    if spec.readout is None:
        raise ReadoutUndefined("algorithm has no answer readout")
    a = final.as_matrix()
    rows = np.flatnonzero(np.asarray(spec.readout) != NO_ANSWER)
    cols = np.asarray(spec.readout)[rows]
    return float(np.sum(np.abs(a[rows, cols]) ** 2))


# ---------------------------------------------------------------- built-in algorithms


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Ginibre matrix with the R-phase fixed."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))[None, :]


def cyclic_readout(basis: WeightKBasis, d_a: int) -> np.ndarray:
    return np.arange(d_a) % basis.dim


def random_spec(n: int, k: int, d_w: int, queries: int, seed: int, cap: int = DEFAULT_DIMENSION_CAP) -> AlgorithmSpec:
    """Seeded random algorithm; outcome a announces the subset of rank a mod C(n,k)."""
    basis = enumerate_weight_k(n, k, cap)
    rng = np.random.default_rng(seed)
    d_a = d_w * (n + 1)
    us = tuple(haar_unitary(d_a, rng) for _ in range(queries + 1))
    return AlgorithmSpec(n, k, d_w, us, cyclic_readout(basis, d_a), name=f"random(seed={seed})")


def identity_spec(n: int, k: int, queries: int = 0, d_w: int = 1, answer: int = 0) -> AlgorithmSpec:
    """Does nothing and announces the subset of rank ``answer`` from outcome 0."""
    d_a = d_w * (n + 1)
    readout = np.full(d_a, NO_ANSWER)
    readout[0] = answer
    us = tuple(np.eye(d_a, dtype=np.complex128) for _ in range(queries + 1))
    return AlgorithmSpec(n, k, d_w, us, readout, name="identity")


def grover_spec(n: int, k: int = 1, iterations: int = 1) -> AlgorithmSpec:
    """Grover search on the query-index register (no workspace).

    U_0 prepares the uniform superposition over indices 1..n, each later U_t is
    the inversion about that superposition, and the answer is the measured index.
    """
    if k != 1:
        raise UnsupportedK(f"built-in Grover handles K = 1 only, got K = {k}")
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    d = n + 1
    uniform = np.zeros(d)
    uniform[1:] = 1.0 / np.sqrt(n)
    e0 = np.zeros(d)
    e0[0] = 1.0
    v = e0 - uniform
    prep = np.eye(d) - 2.0 * np.outer(v, v) / (v @ v)
    diffusion = np.eye(d)
    diffusion[1:, 1:] = 2.0 * np.outer(uniform[1:], uniform[1:]) - np.eye(n)
    basis = enumerate_weight_k(n, 1)
    readout = np.full(d, NO_ANSWER)
    for i in range(1, n + 1):
        readout[i] = basis.subset_rank([i])
    us = (prep.astype(np.complex128),) + tuple(diffusion.astype(np.complex128) for _ in range(iterations))
    return AlgorithmSpec(n, 1, 1, us, readout, name="grover")


def grover_closed_form(n: int, iterations: int) -> float:
    return float(np.sin((2 * iterations + 1) * np.arcsin(1.0 / np.sqrt(n))) ** 2)


def make_spec(algorithm: str, n: int, k: int, queries: int, seed: int = 0, d_w: int = 2) -> AlgorithmSpec:
    if algorithm == "grover":
        return grover_spec(n, k, queries)
    if algorithm == "identity":
        return identity_spec(n, k, queries)
    if algorithm == "random":
        return random_spec(n, k, d_w, queries, seed)
    raise ValueError(f"unknown algorithm {algorithm!r}")

