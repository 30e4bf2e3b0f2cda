"""Small dense complex-matrix kernel.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``. The
functions here add the shape checks, error types and deterministic
conventions (SVD ordering and phases) the rest of the package relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError, SingularError

DEFAULT_TOL = 1e-9
SINGULAR_CUTOFF = 1e-12


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a 2-D complex array (copying)."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    return m


def _require_square(a: np.ndarray, what: str) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{what} requires a square matrix, got shape {a.shape}")


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def trace(a: np.ndarray) -> complex:
    _require_square(a, "trace")
    return complex(np.trace(a))


def max_abs(a: np.ndarray) -> float:
    """Max-entry norm, the norm used by every tolerance check here."""
    return float(np.max(np.abs(a))) if a.size else 0.0


def is_singular(a: np.ndarray, cutoff: float = SINGULAR_CUTOFF) -> bool:
    _require_square(a, "singularity test")
    s = np.linalg.svd(a, compute_uv=False)
    return bool(s[-1] <= cutoff * s[0]) if s[0] > 0 else True


def inverse(a: np.ndarray, cutoff: float = SINGULAR_CUTOFF) -> np.ndarray:
    """Matrix inverse; raises ``SingularError`` below the relative cutoff."""
    _require_square(a, "inverse")
    if is_singular(a, cutoff):
        raise SingularError(
            "matrix is singular (smallest singular value below "
            f"{cutoff:g} relative to the largest)"
        )
    return np.linalg.inv(a)


@dataclass(frozen=True)
class SvdResult:
    """``a == left @ diag(singular_values) @ adjoint(right)``.

    Equivalently ``adjoint(left) @ a @ right`` is diagonal.
    """

    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.left @ np.diag(self.singular_values) @ adjoint(self.right)


def svd(a: np.ndarray) -> SvdResult:
    """Singular value decomposition with a fixed phase convention.

    Singular values are descending. Each left singular vector is rotated so
    that its largest-magnitude entry is real and non-negative; the matching
    right vector gets the same phase, so the reconstruction is unchanged.
    Ties on magnitude go to the lowest index.
    """
    _require_square(a, "svd")
    try:
        u, s, vh = np.linalg.svd(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD did not converge: {exc}") from exc
    v = adjoint(vh)
    for k in range(u.shape[1]):
        col = u[:, k]
        mags = np.abs(col)
        # first index within rounding of the max, so near-ties are stable
        idx = int(np.flatnonzero(mags >= mags.max() - 1e-12)[0])
        ph = col[idx] / abs(col[idx]) if abs(col[idx]) > 0 else 1.0
        u[:, k] = col / ph
        v[:, k] = v[:, k] / ph
    return SvdResult(left=u, singular_values=s.copy(), right=v)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def is_unitary(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return max_abs(adjoint(a) @ a - np.eye(a.shape[0])) <= tol


def is_hermitian(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    return a.ndim == 2 and a.shape[0] == a.shape[1] and max_abs(a - adjoint(a)) <= tol


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Principal square root of a Hermitian positive-semidefinite matrix."""
    w, v = np.linalg.eigh((a + adjoint(a)) / 2)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ adjoint(v)


def phase_aligned(a: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Return ``a`` multiplied by the global phase that best matches ``ref``.

    The phase is read off the largest-magnitude entry of ``ref``.
    """
    idx = np.unravel_index(int(np.argmax(np.abs(ref))), ref.shape)
    if abs(a[idx]) == 0:
        return a
    ph = (ref[idx] / abs(ref[idx])) / (a[idx] / abs(a[idx]))
    return a * ph


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    if a.shape != b.shape:
        return False
    return max_abs(phase_aligned(a, b) - b) <= tol


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary (QR of a complex Ginibre matrix)."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
