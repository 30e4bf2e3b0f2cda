"""Shared entangled pair AB and the quantities derived from it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics as nx
from .errors import SingularError, ValidationError


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """Pure bipartite state ``sum_ij q[i, j] |i>_A |j>_B``.

    Row index is Alice's particle A, column index is Bob's particle B. The
    coefficient matrix is validated to unit Frobenius norm within ``tol`` and
    then renormalized exactly.
    """

    q: np.ndarray
    tol: float = nx.DEFAULT_TOL

    def __post_init__(self):
        q = nx.as_matrix(self.q)
        if q.shape[0] != q.shape[1]:
            raise ValidationError(f"channel matrix must be square, got {q.shape}")
        if q.shape[0] < 2:
            raise ValidationError("channel dimension must be at least 2")
        if not np.all(np.isfinite(q)):
            raise ValidationError("channel matrix has non-finite entries")
        norm2 = float(np.sum(np.abs(q) ** 2))
        if abs(norm2 - 1.0) > self.tol:
            raise ValidationError(
                f"channel is not normalized: sum |q_ij|^2 = {norm2!r} (tol {self.tol:g})"
            )
        q = q / np.sqrt(norm2)
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @classmethod
    def diagonal(cls, coefficients) -> "QuantumChannel":
        return cls(np.diag(np.asarray(coefficients, dtype=np.complex128)))

    @classmethod
    def maximally_entangled(cls, n: int = 2) -> "QuantumChannel":
        return cls(np.eye(n) / np.sqrt(n))

    @classmethod
    def from_theta(cls, theta: float) -> "QuantumChannel":
        """``cos(theta)|00> + sin(theta)|11>``."""
        return cls.diagonal([np.cos(theta), np.sin(theta)])

    def __repr__(self) -> str:
        return f"QuantumChannel(n={self.n}, q={self.q.tolist()!r})"


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    """``u_a @ q @ u_b.T == diag(coefficients)`` with descending coefficients."""

    coefficients: np.ndarray
    u_a: np.ndarray
    u_b: np.ndarray

    @property
    def g(self) -> float:
        """Squared coefficient ratio ``(q1 / q0)**2``; N = 2 only."""
        q0, q1 = self.coefficients[:2]
        return float((q1 / q0) ** 2)


def reduced_density(ch: QuantumChannel) -> np.ndarray:
    """Alice's reduced density matrix ``Q Q^dagger``."""
    return ch.q @ nx.adjoint(ch.q)


def require_invertible(ch: QuantumChannel) -> None:
    if nx.is_singular(ch.q):
        raise SingularError(
            "channel has a zero Schmidt coefficient; faithful teleportation is impossible"
        )


def faithful_probability(ch: QuantumChannel) -> float:
    """Per-outcome probability of faithful teleportation, ``1 / Tr(rho_q^-1)``."""
    require_invertible(ch)
    rho_inv = nx.inverse(reduced_density(ch), cutoff=nx.SINGULAR_CUTOFF**2)
    return 1.0 / nx.trace(rho_inv).real


def schmidt_decompose(ch: QuantumChannel) -> SchmidtForm:
    res = nx.svd(ch.q)
    # q = L S R^dagger  =>  L^dagger q R = S, and R = (R^T)^T
    return SchmidtForm(
        coefficients=res.singular_values,
        u_a=nx.adjoint(res.left),
        u_b=res.right.T,
    )


def entanglement_entropy(ch: QuantumChannel, base: float = np.e) -> float:
    """Von Neumann entropy of ``rho_q``; natural log unless ``base`` is given."""
    lam = np.clip(np.linalg.eigvalsh(reduced_density(ch)), 0.0, None)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log(lam)) / np.log(base)) + 0.0


def is_maximally_entangled(ch: QuantumChannel, tol: float = nx.DEFAULT_TOL) -> bool:
    return nx.max_abs(reduced_density(ch) - np.eye(ch.n) / ch.n) <= tol
