"""Measurement operators on AC: faithful synthesis, matching tests, completion.

A basis vector ``sum_ik d[i, k] |i>_A |k>_C`` is stored as the N x N matrix
``d`` (row = particle A, column = particle C). The inner product of two
basis vectors is ``Tr(a^dagger b)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import numerics as nx
from .channel import (
    QuantumChannel,
    faithful_probability,
    reduced_density,
    require_invertible,
    schmidt_decompose,
)
from .errors import (
    DimensionError,
    NotFaithfulError,
    NotOrthonormalError,
    NotUnitaryError,
    ValidationError,
)

# Recovery used by default for N = 2: identity and the real rotation by -pi/2.
DEFAULT_UNITARIES_N2 = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [-1, 0]], dtype=np.complex128),
)


@dataclass(frozen=True, eq=False)
class MeasurementOperator:
    d: np.ndarray
    tol: float = nx.DEFAULT_TOL

    def __post_init__(self):
        d = nx.as_matrix(self.d)
        if d.shape[0] != d.shape[1]:
            raise DimensionError(f"measurement operator must be square, got {d.shape}")
        norm2 = nx.trace(nx.adjoint(d) @ d).real
        if abs(norm2 - 1.0) > self.tol:
            raise ValidationError(f"measurement operator is not unit norm: Tr(D^dag D) = {norm2!r}")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def vec(self) -> np.ndarray:
        """Amplitudes on ``|ik>_AC`` in row-major order (index ``i*N + k``)."""
        return self.d.reshape(-1)


@dataclass(frozen=True)
class MatchReport:
    matched: bool
    p: float
    residual: float


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Complete orthonormal set of N^2 operators plus per-operator metadata.

    ``faithful[m]`` is True when operator ``m`` admits a state-independent
    recovery unitary over the channel it was classified against, in which
    case ``recovery[m]`` holds that unitary.
    """

    operators: tuple[MeasurementOperator, ...]
    faithful: tuple[bool, ...] = ()
    recovery: tuple[Optional[np.ndarray], ...] = ()
    tol: float = nx.DEFAULT_TOL

    def __post_init__(self):
        ops = tuple(self.operators)
        if not ops:
            raise ValidationError("basis is empty")
        n = ops[0].n
        if any(op.n != n for op in ops):
            raise DimensionError("basis operators have mixed dimensions")
        if len(ops) != n * n:
            raise ValidationError(f"basis needs {n * n} operators, got {len(ops)}")
        gram = _gram(ops)
        err = nx.max_abs(gram - np.eye(len(ops)))
        if err > self.tol:
            raise NotOrthonormalError(f"basis is not orthonormal (max deviation {err:.3g})")
        faithful = tuple(bool(f) for f in self.faithful) or (False,) * len(ops)
        recovery = tuple(self.recovery) or (None,) * len(ops)
        if len(faithful) != len(ops) or len(recovery) != len(ops):
            raise ValidationError("faithful/recovery lists must match the operator count")
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "faithful", faithful)
        object.__setattr__(self, "recovery", recovery)

    @property
    def n(self) -> int:
        return self.operators[0].n

    def __len__(self) -> int:
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    @property
    def eta(self) -> int:
        """Number of faithful operators in the set."""
        return sum(self.faithful)


def _gram(ops: Sequence[MeasurementOperator]) -> np.ndarray:
    vecs = np.array([op.vec() for op in ops])
    return vecs.conj() @ vecs.T


def _require_unitary(u: np.ndarray, tol: float) -> np.ndarray:
    u = nx.as_matrix(u)
    if not nx.is_unitary(u, tol):
        raise NotUnitaryError("recovery matrix is not unitary within tolerance")
    return u


def synthesize_faithful(
    ch: QuantumChannel, u: np.ndarray, tol: float = nx.DEFAULT_TOL
) -> MeasurementOperator:
    """Operator that teleports faithfully when Bob applies ``u``.

    ``D = sqrt(p) (Q^-1)^dagger u^T`` with ``p`` the faithful probability.
    """
    u = _require_unitary(u, tol)
    if u.shape != ch.q.shape:
        raise DimensionError(f"unitary shape {u.shape} does not match channel {ch.q.shape}")
    p = faithful_probability(ch)
    d = np.sqrt(p) * nx.adjoint(nx.inverse(ch.q)) @ u.T
    return MeasurementOperator(d, tol=tol)


def overlap(a: MeasurementOperator, b: MeasurementOperator) -> complex:
    """Inner product ``Tr(a^dagger b)`` of two basis vectors."""
    if a.n != b.n:
        raise DimensionError("operators have different dimensions")
    return nx.trace(nx.adjoint(a.d) @ b.d)


def check_orthogonal(a: MeasurementOperator, b: MeasurementOperator, tol: float = nx.DEFAULT_TOL) -> bool:
    """True iff ``|Tr(a^dagger b)| <= tol``; an operator is never orthogonal to itself."""
    return abs(overlap(a, b)) <= tol


def check_matching(ch: QuantumChannel, m: MeasurementOperator, tol: float = nx.DEFAULT_TOL) -> MatchReport:
    """Entanglement-matching test ``rho_m rho_q == p I``.

    ``p`` is always recomputed from the channel.
    """
    if m.n != ch.n:
        raise DimensionError("operator and channel dimensions differ")
    p = faithful_probability(ch)
    rho_m = m.d @ nx.adjoint(m.d)
    residual = nx.max_abs(rho_m @ reduced_density(ch) - p * np.eye(ch.n))
    return MatchReport(matched=residual <= tol, p=p, residual=residual)


def canonical_phase(u: np.ndarray, cutoff: float = 1e-8) -> np.ndarray:
    """Remove the global phase so the first non-negligible entry is real positive."""
    flat = u.reshape(-1)
    for z in flat:
        if abs(z) > cutoff:
            return u * (abs(z) / z)
    return u


def extract_recovery(ch: QuantumChannel, m: MeasurementOperator, tol: float = nx.DEFAULT_TOL) -> np.ndarray:
    """Recovery unitary for ``m`` over ``ch``, or ``NotFaithfulError``.

    Inverts the synthesis rule: ``u^T = Q^dagger D / sqrt(p)``. The result is
    canonicalized with :func:`canonical_phase`.
    """
    if m.n != ch.n:
        raise DimensionError("operator and channel dimensions differ")
    require_invertible(ch)
    p = faithful_probability(ch)
    candidate = (nx.adjoint(ch.q) @ m.d / np.sqrt(p)).T
    if not nx.is_unitary(candidate, tol):
        raise NotFaithfulError("operator has no state-independent recovery unitary over this channel")
    return canonical_phase(candidate)


def complete_basis(
    partial: Sequence[MeasurementOperator], n: int | None = None, tol: float = nx.DEFAULT_TOL
) -> MeasurementBasis:
    """Extend an orthonormal set to N^2 operators by Gram-Schmidt.

    Candidates are the matrix units ``E_ik`` in row-major order; each is
    orthogonalized twice against everything accepted so far. The input
    operators are kept verbatim as the prefix. Faithful flags are left unset;
    see :func:`classify_basis`.
    """
    partial = list(partial)
    if n is None:
        if not partial:
            raise ValidationError("dimension is required when the partial set is empty")
        n = partial[0].n
    if any(op.n != n for op in partial):
        raise DimensionError("partial set has mixed dimensions")
    if len(partial) > n * n:
        raise NotOrthonormalError(f"more than {n * n} operators supplied")
    if partial:
        err = nx.max_abs(_gram(partial) - np.eye(len(partial)))
        if err > tol:
            raise NotOrthonormalError(f"partial set is not orthonormal (max deviation {err:.3g})")

    vecs = [op.vec() for op in partial]
    out = list(partial)
    for idx in range(n * n):
        if len(out) == n * n:
            break
        w = np.zeros(n * n, dtype=np.complex128)
        w[idx] = 1.0
        for _ in range(2):
            for v in vecs:
                w = w - np.vdot(v, w) * v
        norm = np.linalg.norm(w)
        # a matrix unit inside the current span leaves only rounding noise
        if norm < 1e-6:
            continue
        w = w / norm
        vecs.append(w)
        out.append(MeasurementOperator(w.reshape(n, n), tol=tol))
    return MeasurementBasis(tuple(out), tol=tol)


def classify_basis(
    ch: QuantumChannel, operators: Sequence[MeasurementOperator], tol: float = nx.DEFAULT_TOL
) -> MeasurementBasis:
    """Attach faithful flags and recovery unitaries computed against ``ch``."""
    faithful, recovery = [], []
    for op in operators:
        try:
            u = extract_recovery(ch, op, tol)
        except NotFaithfulError:
            faithful.append(False)
            recovery.append(None)
        else:
            faithful.append(True)
            recovery.append(u)
    return MeasurementBasis(tuple(operators), tuple(faithful), tuple(recovery), tol=tol)


def weyl_unitaries(n: int) -> list[np.ndarray]:
    """Clock-and-shift operators ``X^a Z^b`` for ``a, b in range(n)``."""
    omega = np.exp(2j * np.pi / n)
    shift = np.roll(np.eye(n), 1, axis=0)
    clock = np.diag(omega ** np.arange(n))
    return [
        np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
        for a in range(n)
        for b in range(n)
    ]


def default_unitaries(ch: QuantumChannel, tol: float = nx.DEFAULT_TOL) -> list[np.ndarray]:
    """Recovery set used when the caller supplies none.

    N = 2 uses the identity and ``J = [[0, 1], [-1, 0]]`` when they give
    orthogonal operators (any channel with real ``rho_q``), and otherwise
    ``W J W^dagger`` with ``W`` diagonalizing ``K = ((Q^dagger Q)^-1)^T``,
    which makes ``Tr(U K) = 0``. Larger N greedily keeps every clock-and-shift
    unitary whose synthesized operator is orthogonal to the ones already kept.
    """
    if ch.n == 2:
        eye, j = (u.copy() for u in DEFAULT_UNITARIES_N2)
        if check_orthogonal(synthesize_faithful(ch, eye, tol), synthesize_faithful(ch, j, tol), tol):
            return [eye, j]
        k = nx.inverse(nx.adjoint(ch.q) @ ch.q).T
        _, w = np.linalg.eigh((k + nx.adjoint(k)) / 2)
        return [eye, w @ j @ nx.adjoint(w)]
    kept: list[np.ndarray] = []
    ops: list[MeasurementOperator] = []
    for u in weyl_unitaries(ch.n):
        op = synthesize_faithful(ch, u, tol)
        if all(check_orthogonal(op, o, tol) for o in ops):
            kept.append(u)
            ops.append(op)
    return kept


def synthesize_basis(
    ch: QuantumChannel,
    unitaries: Sequence[np.ndarray] | None = None,
    tol: float = nx.DEFAULT_TOL,
) -> MeasurementBasis:
    """Faithful operators for ``unitaries``, completed to a full basis.

    The complement is built by Gram-Schmidt in the channel's Schmidt frame
    (with particle C rotated like B) and mapped back, so for a real N = 2
    channel it comes out as the natural diagonal/anti-diagonal partners of
    the faithful pair. The synthesized operators form the prefix unchanged.
    """
    if unitaries is None:
        unitaries = default_unitaries(ch, tol)
    faithful_ops = [synthesize_faithful(ch, u, tol) for u in unitaries]
    for i, a in enumerate(faithful_ops):
        for b in faithful_ops[:i]:
            if not check_orthogonal(a, b, tol):
                raise NotOrthonormalError(
                    "recovery unitaries give non-orthogonal operators: "
                    "Tr(U_n rho_q^-1 U_m^dagger) != 0"
                )

    sf = schmidt_decompose(ch)
    u_a, u_c = sf.u_a, sf.u_b
    inv_c_t = nx.inverse(u_c.T)
    to_frame = [MeasurementOperator(u_a @ op.d @ u_c.T, tol=tol) for op in faithful_ops]
    completed = complete_basis(to_frame, n=ch.n, tol=tol)
    back = list(faithful_ops) + [
        MeasurementOperator(nx.adjoint(u_a) @ op.d @ inv_c_t, tol=tol)
        for op in completed.operators[len(faithful_ops):]
    ]
    return classify_basis(ch, back, tol)
