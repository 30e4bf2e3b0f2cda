"""Local unitary changes of basis and the invariance checks built on them.

A frame ``(u_a, u_b, u_c)`` re-expresses every object in a new local basis:

* channel      ``Q'   = u_a Q u_b^T``
* operator     ``D'   = u_a D u_c^T``
* input state  ``c'   = u_c c``
* recovery     ``U'_m = u_c U_m u_b^dagger``  (``U_m u_b^dagger`` when ``u_c = I``)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import numerics as nx
from .channel import QuantumChannel, entanglement_entropy
from .errors import DimensionError, NotUnitaryError
from .measurement import MeasurementBasis, MeasurementOperator, classify_basis
from .simulator import DensityMatrix, PureState, QuantumState, run_protocol

FRAME_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LocalUnitaryFrame:
    u_a: np.ndarray
    u_b: np.ndarray
    u_c: Optional[np.ndarray] = None
    tol: float = FRAME_TOL

    def __post_init__(self):
        u_a, u_b = nx.as_matrix(self.u_a), nx.as_matrix(self.u_b)
        u_c = np.eye(u_a.shape[0], dtype=np.complex128) if self.u_c is None else nx.as_matrix(self.u_c)
        if not (u_a.shape == u_b.shape == u_c.shape):
            raise DimensionError("frame unitaries have different shapes")
        for name, u in (("u_a", u_a), ("u_b", u_b), ("u_c", u_c)):
            if not nx.is_unitary(u, self.tol):
                raise NotUnitaryError(f"frame component {name} is not unitary")
        object.__setattr__(self, "u_a", u_a)
        object.__setattr__(self, "u_b", u_b)
        object.__setattr__(self, "u_c", u_c)

    @property
    def n(self) -> int:
        return self.u_a.shape[0]

    @classmethod
    def identity(cls, n: int) -> "LocalUnitaryFrame":
        eye = np.eye(n, dtype=np.complex128)
        return cls(eye, eye, eye)

    @classmethod
    def real_rotations(cls, theta_a: float, theta_b: float, theta_c: float = 0.0) -> "LocalUnitaryFrame":
        """N = 2 frame of plane rotations ``[[cos t, -sin t], [sin t, cos t]]``."""
        return cls(rotation(theta_a), rotation(theta_b), rotation(theta_c))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, with_c: bool = True) -> "LocalUnitaryFrame":
        u_a = nx.random_unitary(n, rng)
        u_b = nx.random_unitary(n, rng)
        u_c = nx.random_unitary(n, rng) if with_c else None
        return cls(u_a, u_b, u_c)

    def inverse(self) -> "LocalUnitaryFrame":
        # Q = u_a^dag Q' (u_b^T)^-1 and (u_b^T)^-1 = (u_b^dag)^T
        return LocalUnitaryFrame(nx.adjoint(self.u_a), nx.adjoint(self.u_b), nx.adjoint(self.u_c))


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _check(f: LocalUnitaryFrame, n: int) -> None:
    if f.n != n:
        raise DimensionError(f"frame dimension {f.n} does not match object dimension {n}")


def transform_channel(ch: QuantumChannel, f: LocalUnitaryFrame) -> QuantumChannel:
    _check(f, ch.n)
    return QuantumChannel(f.u_a @ ch.q @ f.u_b.T)


def transform_measurement(m: MeasurementOperator, f: LocalUnitaryFrame) -> MeasurementOperator:
    _check(f, m.n)
    return MeasurementOperator(f.u_a @ m.d @ f.u_c.T, tol=m.tol)


def transform_state(state: QuantumState, f: LocalUnitaryFrame) -> QuantumState:
    _check(f, state.n)
    if isinstance(state, PureState):
        return PureState(f.u_c @ state.amplitudes)
    rho = f.u_c @ state.rho @ nx.adjoint(f.u_c)
    return DensityMatrix((rho + nx.adjoint(rho)) / 2)


def transform_recovery(u: np.ndarray, f: LocalUnitaryFrame) -> np.ndarray:
    """Recovery in the new frame: ``u_c U u_b^dagger``."""
    _check(f, u.shape[0])
    return f.u_c @ u @ nx.adjoint(f.u_b)


def transform_basis(basis: MeasurementBasis, f: LocalUnitaryFrame) -> MeasurementBasis:
    """Transform operators and carry flags/recoveries over by the frame rule."""
    ops = tuple(transform_measurement(op, f) for op in basis.operators)
    rec = tuple(None if u is None else transform_recovery(u, f) for u in basis.recovery)
    return MeasurementBasis(ops, basis.faithful, rec, tol=basis.tol)


@dataclass
class InvarianceReport:
    probabilities_before: list[float]
    probabilities_after: list[float]
    faithful_before: list[bool]
    faithful_after: list[bool]
    entropy_before: float
    entropy_after: float
    total_before: float
    total_after: float
    recovery_mismatch: list[float] = field(default_factory=list)
    tol: float = nx.DEFAULT_TOL

    @property
    def max_probability_diff(self) -> float:
        return max(abs(a - b) for a, b in zip(self.probabilities_before, self.probabilities_after))

    @property
    def probabilities_equal(self) -> bool:
        return self.max_probability_diff <= self.tol

    @property
    def flags_equal(self) -> bool:
        return self.faithful_before == self.faithful_after

    @property
    def entropy_equal(self) -> bool:
        return abs(self.entropy_before - self.entropy_after) <= self.tol

    @property
    def total_equal(self) -> bool:
        return abs(self.total_before - self.total_after) <= self.tol

    @property
    def recovery_equal(self) -> bool:
        return all(d <= self.tol for d in self.recovery_mismatch)

    @property
    def eta_equal(self) -> bool:
        return sum(self.faithful_before) == sum(self.faithful_after)

    @property
    def ok(self) -> bool:
        return (
            self.probabilities_equal
            and self.flags_equal
            and self.entropy_equal
            and self.total_equal
            and self.recovery_equal
        )


def verify_invariance(
    ch: QuantumChannel,
    basis: MeasurementBasis,
    f: LocalUnitaryFrame,
    state: QuantumState,
    tol: float = nx.DEFAULT_TOL,
    probes: int = 20,
    seed: int | None = None,
) -> InvarianceReport:
    """Run the protocol in both pictures and compare everything observable.

    The transformed basis is re-classified from scratch in the new picture,
    so its recovery unitaries are independently extracted; for every outcome
    faithful in the original picture they are compared with
    ``u_c U_m u_b^dagger`` up to global phase.
    """
    kwargs = {"probes": probes, "tol": tol}
    if seed is not None:
        kwargs["seed"] = seed
    basis = classify_basis(ch, basis.operators, tol)
    before = run_protocol(ch, basis, state, **kwargs)

    ch2 = transform_channel(ch, f)
    ops2 = [transform_measurement(op, f) for op in basis.operators]
    basis2 = classify_basis(ch2, ops2, tol)
    after = run_protocol(ch2, basis2, transform_state(state, f), **kwargs)

    mismatch = []
    for u, u2 in zip(basis.recovery, basis2.recovery):
        if u is None:
            continue
        if u2 is None:
            mismatch.append(np.inf)
            continue
        expected = transform_recovery(u, f)
        mismatch.append(nx.max_abs(nx.phase_aligned(u2, expected) - expected))

    return InvarianceReport(
        probabilities_before=[o.probability for o in before.outcomes],
        probabilities_after=[o.probability for o in after.outcomes],
        faithful_before=[o.faithful for o in before.outcomes],
        faithful_after=[o.faithful for o in after.outcomes],
        entropy_before=entanglement_entropy(ch),
        entropy_after=entanglement_entropy(ch2),
        total_before=before.total_faithful_probability,
        total_after=after.total_faithful_probability,
        recovery_mismatch=mismatch,
        tol=tol,
    )
