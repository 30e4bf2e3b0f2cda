"""Teleportation simulator.

Two independent routes compute Bob's conditional state:

* the fast path applies ``L_m = Q^T D_m^*`` to particle C alone;
* the tripartite path builds the full A (x) C (x) B state (or density
  operator), projects AC onto the basis vector and reads off B.

``run_protocol`` uses the fast path for reports; tests compare both.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import numerics as nx
from .channel import QuantumChannel
from .errors import DimensionError, NotFaithfulError, ValidationError, ZeroProbabilityError
from .measurement import MeasurementBasis, MeasurementOperator, extract_recovery

ZERO_PROBABILITY = 1e-14
DEFAULT_PROBES = 20
DEFAULT_SEED = 20240611


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    tol: float = nx.DEFAULT_TOL

    def __post_init__(self):
        c = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        norm2 = float(np.vdot(c, c).real)
        if c.size < 1 or abs(norm2 - 1.0) > self.tol:
            raise ValidationError(f"pure state is not normalized: |c|^2 = {norm2!r}")
        c.setflags(write=False)
        object.__setattr__(self, "amplitudes", c)

    @property
    def n(self) -> int:
        return self.amplitudes.size

    def density(self) -> np.ndarray:
        c = self.amplitudes
        return np.outer(c, c.conj())


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    rho: np.ndarray
    tol: float = nx.DEFAULT_TOL

    def __post_init__(self):
        rho = nx.as_matrix(self.rho)
        if rho.shape[0] != rho.shape[1]:
            raise DimensionError(f"density matrix must be square, got {rho.shape}")
        if not nx.is_hermitian(rho, self.tol):
            raise ValidationError("density matrix is not Hermitian")
        tr = nx.trace(rho).real
        if abs(tr - 1.0) > self.tol:
            raise ValidationError(f"density matrix trace is {tr!r}, expected 1")
        if np.linalg.eigvalsh(rho).min() < -self.tol:
            raise ValidationError("density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def n(self) -> int:
        return self.rho.shape[0]

    def density(self) -> np.ndarray:
        return self.rho


QuantumState = Union[PureState, DensityMatrix]


@dataclass(frozen=True, eq=False)
class OutcomeRecord:
    m: int
    probability: float
    recovered: Optional[QuantumState]
    fidelity: float
    faithful: bool
    fidelity_min_over_probes: float
    recovery_unitary: Optional[np.ndarray]


@dataclass(frozen=True, eq=False)
class TeleportationReport:
    outcomes: tuple[OutcomeRecord, ...]
    total_faithful_probability: float

    @property
    def total_probability(self) -> float:
        return float(sum(o.probability for o in self.outcomes))

    @property
    def faithful_indices(self) -> list[int]:
        return [o.m for o in self.outcomes if o.faithful]

    @property
    def eta(self) -> int:
        return len(self.faithful_indices)


def _check_dims(ch: QuantumChannel, m: MeasurementOperator, n: int) -> None:
    if not (ch.n == m.n == n):
        raise DimensionError(f"dimension mismatch: channel {ch.n}, operator {m.n}, state {n}")


def bob_operator(ch: QuantumChannel, m: MeasurementOperator) -> np.ndarray:
    """``L_m = Q^T D_m^*``, the unnormalized map from C to Bob's particle."""
    return ch.q.T @ m.d.conj()


def bob_state_pure(ch: QuantumChannel, m: MeasurementOperator, c: PureState) -> tuple[float, PureState]:
    _check_dims(ch, m, c.n)
    psi = bob_operator(ch, m) @ c.amplitudes
    p = float(np.vdot(psi, psi).real)
    if p < ZERO_PROBABILITY:
        raise ZeroProbabilityError(f"outcome probability {p:.3g} is zero")
    return p, PureState(psi / np.sqrt(p))


def bob_state_mixed(ch: QuantumChannel, m: MeasurementOperator, rho: DensityMatrix) -> tuple[float, DensityMatrix]:
    _check_dims(ch, m, rho.n)
    ell = bob_operator(ch, m)
    out = ell @ rho.rho @ nx.adjoint(ell)
    p = nx.trace(out).real
    if p < ZERO_PROBABILITY:
        raise ZeroProbabilityError(f"outcome probability {p:.3g} is zero")
    out = out / p
    return p, DensityMatrix((out + nx.adjoint(out)) / 2)


def bob_state(ch: QuantumChannel, m: MeasurementOperator, state: QuantumState):
    if isinstance(state, PureState):
        return bob_state_pure(ch, m, state)
    return bob_state_mixed(ch, m, state)


def _acb_permutation(n: int) -> np.ndarray:
    """Index map taking A (x) B (x) C ordering to A (x) C (x) B."""
    idx = np.arange(n**3).reshape(n, n, n)  # [a, b, c]
    return idx.transpose(0, 2, 1).reshape(-1)  # read back as [a, c, b]


def assemble_tripartite(ch: QuantumChannel, state: QuantumState) -> np.ndarray:
    """Joint state of A, C, B in that tensor order.

    Returns a length-N^3 vector for a pure input and an N^3 x N^3 density
    operator for a mixed one. Built as ``|Psi>_AB (x) input_C`` and then
    reordered, so AC occupy the leading N^2-dimensional factor.
    """
    n = ch.n
    if state.n != n:
        raise DimensionError(f"state dimension {state.n} does not match channel {n}")
    ab = ch.q.reshape(-1)
    perm = _acb_permutation(n)
    if isinstance(state, PureState):
        return nx.kron(ab.reshape(-1, 1), state.amplitudes.reshape(-1, 1)).reshape(-1)[perm]
    rho_ab = np.outer(ab, ab.conj())
    joint = nx.kron(rho_ab, state.rho)
    return joint[np.ix_(perm, perm)]


def project_tripartite(joint: np.ndarray, m: MeasurementOperator) -> tuple[float, np.ndarray]:
    """Project AC of an A (x) C (x) B object onto ``m``; return ``(p_m, B part)``.

    The B part is a normalized vector for a pure joint state and a unit-trace
    density matrix for a mixed one. Probabilities below the zero threshold
    raise ``ZeroProbabilityError``.
    """
    n = m.n
    bra = nx.kron(m.vec().conj().reshape(1, -1), np.eye(n))  # <psi^m_AC| (x) I_B
    if joint.ndim == 1:
        psi = bra @ joint
        p = float(np.vdot(psi, psi).real)
        if p < ZERO_PROBABILITY:
            raise ZeroProbabilityError(f"outcome probability {p:.3g} is zero")
        return p, psi / np.sqrt(p)
    out = bra @ joint @ nx.adjoint(bra)
    p = float(np.trace(out).real)
    if p < ZERO_PROBABILITY:
        raise ZeroProbabilityError(f"outcome probability {p:.3g} is zero")
    return p, out / p


PURITY_CUTOFF = 1e-12


def _as_pure_if_rank_one(state: QuantumState) -> QuantumState:
    if isinstance(state, PureState):
        return state
    w, v = np.linalg.eigh(state.rho)
    if w[-1] < 1.0 - PURITY_CUTOFF:
        return state
    return PureState(v[:, -1] / np.linalg.norm(v[:, -1]))


def fidelity(a: QuantumState, b: QuantumState) -> float:
    """Squared-overlap fidelity; Uhlmann form ``(Tr sqrt(sqrt(a) b sqrt(a)))^2`` for mixed pairs."""
    if a.n != b.n:
        raise DimensionError("states have different dimensions")
    # rank-1 density matrices go through the overlap formula; the matrix
    # square root of a rank-deficient rho is only accurate to ~sqrt(eps)
    a, b = _as_pure_if_rank_one(a), _as_pure_if_rank_one(b)
    if isinstance(a, PureState) and isinstance(b, PureState):
        val = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    elif isinstance(a, PureState):
        val = np.vdot(a.amplitudes, b.rho @ a.amplitudes).real
    elif isinstance(b, PureState):
        val = np.vdot(b.amplitudes, a.rho @ b.amplitudes).real
    else:
        sa = nx.psd_sqrt(a.rho)
        val = np.trace(nx.psd_sqrt(sa @ b.rho @ sa)).real ** 2
    return float(min(max(val, 0.0), 1.0))


def apply_unitary(u: np.ndarray, state: QuantumState) -> QuantumState:
    if isinstance(state, PureState):
        return PureState(u @ state.amplitudes)
    out = u @ state.rho @ nx.adjoint(u)
    return DensityMatrix((out + nx.adjoint(out)) / 2)


def random_pure_state(n: int, rng: np.random.Generator) -> PureState:
    c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureState(c / np.linalg.norm(c))


def random_density_matrix(n: int, rng: np.random.Generator) -> DensityMatrix:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ nx.adjoint(g)
    rho = rho / np.trace(rho).real
    return DensityMatrix((rho + nx.adjoint(rho)) / 2)


def _teleport_fidelity(ch, op, u, state) -> tuple[float, Optional[QuantumState], float]:
    try:
        p, out = bob_state(ch, op, state)
    except ZeroProbabilityError:
        return 0.0, None, 0.0
    out = apply_unitary(u, out)
    return p, out, fidelity(state, out)


def run_protocol(
    ch: QuantumChannel,
    basis: MeasurementBasis,
    state: QuantumState,
    probes: int = DEFAULT_PROBES,
    seed: int = DEFAULT_SEED,
    tol: float = nx.DEFAULT_TOL,
) -> TeleportationReport:
    """Teleport ``state`` through every outcome of ``basis``.

    For each outcome the recovery unitary is the basis' stored one, else the
    one :func:`extract_recovery` finds, else the identity. An outcome is
    flagged faithful only if its fidelity reaches ``1 - tol`` on the given
    input and on ``probes`` pseudo-random pure inputs from ``seed``; the same
    probe set is used for every outcome.
    """
    if basis.n != ch.n or state.n != ch.n:
        raise DimensionError("channel, basis and state dimensions differ")
    rng = np.random.default_rng(seed)
    probe_states = [random_pure_state(ch.n, rng) for _ in range(probes)]

    outcomes = []
    for m, op in enumerate(basis.operators):
        u = basis.recovery[m]
        if u is None:
            try:
                u = extract_recovery(ch, op, tol)
            except NotFaithfulError:
                u = None
        applied = u if u is not None else np.eye(ch.n, dtype=np.complex128)

        p, recovered, fid = _teleport_fidelity(ch, op, applied, state)
        fid_min = fid
        for probe in probe_states:
            fid_min = min(fid_min, _teleport_fidelity(ch, op, applied, probe)[2])
        outcomes.append(
            OutcomeRecord(
                m=m,
                probability=p,
                recovered=recovered,
                fidelity=fid,
                faithful=fid_min >= 1.0 - tol,
                fidelity_min_over_probes=fid_min,
                recovery_unitary=u,
            )
        )
    total = float(sum(o.probability for o in outcomes if o.faithful))
    return TeleportationReport(tuple(outcomes), total)
