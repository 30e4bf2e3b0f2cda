"""How many faithful operators fit in one orthonormal basis, N = 2.

Recovery unitaries are parametrized as

    U = e^{i phi} [[ cos t e^{i a},  sin t e^{i b}],
                   [-sin t e^{-i b}, cos t e^{-i a}]]

and two synthesized operators are orthogonal iff
``Tr(U_n rho^-1 U_m^dagger) = 0`` with ``rho = diag(q0^2, q1^2)``. The
magnitude of that trace does not depend on ``phi``, so searches run over
``(alpha, beta, theta)`` only.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import optimize

from . import numerics as nx
from .channel import QuantumChannel, schmidt_decompose
from .errors import UnsupportedDimensionError, ValidationError

log = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
ORTHOGONAL_TOL = 1e-9
CERTIFY_TOL = 1e-6
MAXIMAL_TOL = 1e-9


@dataclass(frozen=True)
class UnitaryParams:
    phi: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    theta: float = 0.0

    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        ea, eb = np.exp(1j * self.alpha), np.exp(1j * self.beta)
        return np.exp(1j * self.phi) * np.array(
            [[c * ea, s * eb], [-s * np.conj(eb), c * np.conj(ea)]], dtype=np.complex128
        )

    @classmethod
    def from_matrix(cls, u: np.ndarray, tol: float = nx.DEFAULT_TOL) -> "UnitaryParams":
        """Recover angles of a 2 x 2 unitary (``theta`` in ``[0, pi/2]``)."""
        u = nx.as_matrix(u)
        if u.shape != (2, 2):
            raise UnsupportedDimensionError("unitary parameters exist for 2 x 2 matrices only")
        if not nx.is_unitary(u, tol):
            raise ValidationError("matrix is not unitary")
        phi = float(np.angle(np.linalg.det(u))) / 2
        v = u * np.exp(-1j * phi)
        a, b = v[0, 0], v[0, 1]
        theta = math.atan2(abs(b), abs(a))
        alpha = float(np.angle(a)) if abs(a) > 1e-15 else 0.0
        beta = float(np.angle(b)) if abs(b) > 1e-15 else 0.0
        return cls(phi % TWO_PI, alpha % TWO_PI, beta % TWO_PI, theta)

    def as_list(self) -> list[float]:
        return [self.phi, self.alpha, self.beta, self.theta]


IDENTITY_PARAMS = UnitaryParams()
# [[0, 1], [-1, 0]]
ROTATION_PARAMS = UnitaryParams(theta=math.pi / 2)


@dataclass(frozen=True)
class ChannelShape2:
    """Schmidt coefficients of a two-qubit channel, normalized on construction."""

    q0: float
    q1: float

    def __post_init__(self):
        q0, q1 = abs(float(self.q0)), abs(float(self.q1))
        norm = math.hypot(q0, q1)
        if q0 <= 0 or q1 <= 0 or not math.isfinite(norm):
            raise ValidationError("both Schmidt coefficients must be positive")
        object.__setattr__(self, "q0", q0 / norm)
        object.__setattr__(self, "q1", q1 / norm)

    @property
    def g(self) -> float:
        return (self.q1 / self.q0) ** 2

    @property
    def rho_inv_diag(self) -> tuple[float, float]:
        return 1.0 / self.q0**2, 1.0 / self.q1**2

    @property
    def is_maximal(self) -> bool:
        return abs(self.g - 1.0) <= MAXIMAL_TOL

    @classmethod
    def from_g(cls, g: float) -> "ChannelShape2":
        return cls(1.0, math.sqrt(g))

    @classmethod
    def from_channel(cls, ch: QuantumChannel) -> "ChannelShape2":
        if ch.n != 2:
            raise UnsupportedDimensionError(f"eta analysis is only defined for N = 2, got N = {ch.n}")
        q0, q1 = schmidt_decompose(ch).coefficients
        return cls(q0, q1)


class CaseLabel(str, enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"
    CASE4 = "Case4"
    NOT_ORTHOGONAL = "NotOrthogonal"


def pair_function(a: UnitaryParams, b: UnitaryParams, shape: ChannelShape2) -> complex:
    """``Tr(U_b rho^-1 U_a^dagger)``; zero iff the two operators are orthogonal."""
    rho_inv = np.diag(shape.rho_inv_diag)
    return complex(np.trace(b.matrix() @ rho_inv @ nx.adjoint(a.matrix())))


def _pair_abs_vectorized(alpha, beta, theta, ref: UnitaryParams, r0: float, r1: float):
    """``|Tr(U(alpha, beta, theta) rho^-1 U_ref^dagger)|`` over broadcast arrays."""
    cc = np.cos(theta) * math.cos(ref.theta)
    ss = np.sin(theta) * math.sin(ref.theta)
    ea = np.exp(1j * (alpha - ref.alpha))
    eb = np.exp(1j * (beta - ref.beta))
    return np.abs(r0 * cc * ea + r1 * cc / ea + r1 * ss * eb + r0 * ss / eb)


def _wrap(x: float) -> float:
    """Angle difference mapped into ``(-pi, pi]``."""
    return math.remainder(x, TWO_PI)


def classify_pair(
    a: UnitaryParams,
    b: UnitaryParams,
    tol: float = ORTHOGONAL_TOL,
    shape: ChannelShape2 | None = None,
) -> CaseLabel:
    """Label the orthogonality solution a pair satisfies (``a`` plays ``m``, ``b`` plays ``n``).

    Without ``shape`` the decision uses the angle conditions alone, which are
    the complete solution set for any partially entangled channel. With
    ``shape`` the pair is first tested numerically and NotOrthogonal is
    returned whenever ``|pair_function| > tol``. A maximally entangled shape
    has orthogonal pairs outside the four cases; those are also labelled
    NotOrthogonal, so use ``pair_function`` directly for that shape.
    """
    if shape is not None and abs(pair_function(a, b, shape)) > tol:
        return CaseLabel.NOT_ORTHOGONAL
    ca, sa = math.cos(a.theta), math.sin(a.theta)
    cb, sb = math.cos(b.theta), math.sin(b.theta)
    if abs(ca) <= tol and abs(sb) <= tol:
        return CaseLabel.CASE1
    if abs(sa) <= tol and abs(cb) <= tol:
        return CaseLabel.CASE2
    d_alpha = b.alpha - a.alpha
    d_beta = b.beta - a.beta
    if abs(ca * cb) > tol:
        t = (sa * sb) / (ca * cb)
        # f = cc (g e^{ia} + e^{-ia}) + ss (e^{ib} + g e^{-ib}) vanishes for
        # g != 1 iff cos a = -t cos b and sin a = t sin b, i.e. |t| = 1 with
        # a + b = pi (t = 1) or a + b = 0 (t = -1)
        if abs(t - 1) <= tol and abs(_wrap(d_alpha + d_beta - math.pi)) <= tol:
            return CaseLabel.CASE3
        if abs(t + 1) <= tol and abs(_wrap(d_alpha + d_beta)) <= tol:
            return CaseLabel.CASE4
    return CaseLabel.NOT_ORTHOGONAL


@dataclass(frozen=True)
class SearchConfig:
    grid: int = 64
    refine_starts: int = 10
    orthogonal_tol: float = ORTHOGONAL_TOL
    certify_tol: float = CERTIFY_TOL
    max_iter: int = 4000


@dataclass
class SearchResult:
    found: bool
    min_violation: float
    best: UnitaryParams
    gray_zone: bool
    grid_min: float
    samples: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["best"] = self.best.as_list()
        return d


@lru_cache(maxsize=8)
def _grid_axes(k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    axis = np.arange(k) * (TWO_PI / k)
    return np.meshgrid(axis, axis, axis, indexing="ij")


def _violation(x: np.ndarray, constraints: Sequence[UnitaryParams], r0: float, r1: float) -> float:
    alpha, beta, theta = x
    return max(float(_pair_abs_vectorized(alpha, beta, theta, c, r0, r1)) for c in constraints)


def _residuals(x, constraints, r0, r1) -> np.ndarray:
    alpha, beta, theta = x
    out = []
    for c in constraints:
        u = UnitaryParams(0.0, alpha, beta, theta)
        z = np.trace(u.matrix() @ np.diag([r0, r1]) @ nx.adjoint(c.matrix()))
        out.extend([z.real, z.imag])
    return np.array(out)


def search_orthogonal(
    constraints: Sequence[UnitaryParams],
    shape: ChannelShape2,
    config: SearchConfig = SearchConfig(),
) -> SearchResult:
    """Look for a unitary whose operator is orthogonal to every constraint.

    Minimizes ``max_k |pair_function(c, constraint_k)|`` by an exhaustive
    grid of ``config.grid`` points per angle over ``(alpha, beta, theta)``,
    then Nelder-Mead from the best ``config.refine_starts`` cells (ties
    broken by grid index). A minimum below ``certify_tol`` is additionally
    polished by least squares on the real and imaginary parts.
    """
    if not constraints:
        raise ValidationError("at least one constraint is required")
    r0, r1 = shape.rho_inv_diag
    al, be, th = _grid_axes(config.grid)
    viol = np.zeros(al.shape)
    for c in constraints:
        np.maximum(viol, _pair_abs_vectorized(al, be, th, c, r0, r1), out=viol)
    flat = viol.reshape(-1)
    order = np.argsort(flat, kind="stable")[: config.refine_starts]
    grid_min = float(flat[order[0]])

    best_x = np.array([al.flat[order[0]], be.flat[order[0]], th.flat[order[0]]])
    best_v = grid_min
    step = TWO_PI / config.grid
    for idx in order:
        x0 = np.array([al.flat[idx], be.flat[idx], th.flat[idx]])
        simplex = np.vstack([x0, x0 + np.diag([step, step, step])])
        res = optimize.minimize(
            _violation,
            x0,
            args=(constraints, r0, r1),
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": 1e-13,
                "fatol": 1e-15,
                "maxiter": config.max_iter,
                "maxfev": 2 * config.max_iter,
            },
        )
        if res.fun < best_v:
            best_v, best_x = float(res.fun), np.asarray(res.x)

    if config.orthogonal_tol < best_v <= config.certify_tol:
        ls = optimize.least_squares(_residuals, best_x, args=(constraints, r0, r1), xtol=1e-15, ftol=1e-15, gtol=1e-15)
        v = _violation(ls.x, constraints, r0, r1)
        if v < best_v:
            best_v, best_x = v, ls.x

    found = best_v <= config.orthogonal_tol
    gray = (not found) and best_v <= config.certify_tol
    if gray:
        log.warning("orthogonality search ended in the gray zone: min violation %.3g", best_v)
    alpha, beta, theta = (float(v) % TWO_PI for v in best_x)
    return SearchResult(
        found=found,
        min_violation=best_v,
        best=UnitaryParams(0.0, alpha, beta, theta),
        gray_zone=gray,
        grid_min=grid_min,
        samples=int(flat.size),
    )


def search_third(
    a: UnitaryParams,
    b: UnitaryParams,
    shape: ChannelShape2,
    config: SearchConfig = SearchConfig(),
) -> SearchResult:
    """Search for a third unitary compatible with the orthogonal pair ``(a, b)``."""
    if abs(pair_function(a, b, shape)) > config.orthogonal_tol:
        raise ValidationError("witness pair is not orthogonal")
    return search_orthogonal([a, b], shape, config)


def p_max(shape: ChannelShape2) -> float:
    """Total faithful probability ``2 (q0 q1)^2`` for a partially entangled shape."""
    return 2.0 * (shape.q0 * shape.q1) ** 2


@dataclass
class EtaCertificate:
    shape: ChannelShape2
    witness_pair: tuple[UnitaryParams, UnitaryParams]
    third_search: SearchResult
    eta: int
    branch: str
    config: SearchConfig
    extra_witnesses: list[UnitaryParams] = field(default_factory=list)
    fourth_search: SearchResult | None = None

    @property
    def p_max(self) -> float:
        return 1.0 if self.branch == "maximal" else p_max(self.shape)

    def to_dict(self) -> dict:
        return {
            "shape": {"q0": self.shape.q0, "q1": self.shape.q1, "g": self.shape.g},
            "branch": self.branch,
            "eta": self.eta,
            "p_max": self.p_max,
            "witness_pair": [w.as_list() for w in self.witness_pair],
            "extra_witnesses": [w.as_list() for w in self.extra_witnesses],
            "grid": asdict(self.config),
            "found_third": self.third_search.found,
            "min_violation": self.third_search.min_violation,
            "gray_zone": self.third_search.gray_zone,
            "third_search": self.third_search.to_dict(),
            "fourth_search": None if self.fourth_search is None else self.fourth_search.to_dict(),
        }


def certify_eta(
    target: QuantumChannel | ChannelShape2,
    config: SearchConfig = SearchConfig(),
    witness_pair: tuple[UnitaryParams, UnitaryParams] = (IDENTITY_PARAMS, ROTATION_PARAMS),
) -> EtaCertificate:
    """Numerical evidence for the faithful count of an N = 2 channel.

    Arbitrary channels are reduced to their Schmidt shape first. For a
    partially entangled shape the certificate records that no third
    compatible unitary exists (eta = 2). For the maximally entangled shape it
    exhibits a third and a fourth one (eta = 4).
    """
    shape = target if isinstance(target, ChannelShape2) else ChannelShape2.from_channel(target)
    a, b = witness_pair
    if abs(pair_function(a, b, shape)) > config.orthogonal_tol:
        raise ValidationError("witness pair is not orthogonal over this channel")
    third = search_third(a, b, shape, config)

    if not shape.is_maximal:
        eta = 3 if third.found else 2
        return EtaCertificate(shape, (a, b), third, eta, "partial", config)

    extras: list[UnitaryParams] = []
    fourth = None
    if third.found:
        extras.append(third.best)
        fourth = search_orthogonal([a, b, third.best], shape, config)
        if fourth.found:
            extras.append(fourth.best)
    return EtaCertificate(shape, (a, b), third, 2 + len(extras), "maximal", config, extras, fourth)
