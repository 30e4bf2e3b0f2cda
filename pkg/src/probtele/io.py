"""JSON file formats.

Complex numbers are ``[re, im]`` pairs; a bare real number is accepted on
input as well. Matrices are row-major nested lists.

channel  ``{"n": N, "q": N x N}``
state    ``{"n": N, "amplitudes": [N]}`` or ``{"n": N, "rho": N x N}``
basis    ``{"n": N, "operators": [N^2 x (N x N)], "faithful": [bool],
           "recovery": [N x N | null]}``
frame    ``{"u_a": N x N, "u_b": N x N, "u_c": N x N}`` (``u_c`` optional)
unitaries ``{"unitaries": [N x N, ...]}`` or a bare list
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .channel import QuantumChannel
from .errors import ValidationError
from .frames import LocalUnitaryFrame
from .measurement import MeasurementBasis, MeasurementOperator
from .simulator import DensityMatrix, PureState, QuantumState, TeleportationReport


class ParseError(ValidationError):
    """Malformed input file; the message carries file and position."""


def complex_to_json(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_json(a: np.ndarray) -> list:
    return [[complex_to_json(z) for z in row] for row in np.asarray(a)]


def vector_to_json(v: np.ndarray) -> list:
    return [complex_to_json(z) for z in np.asarray(v).reshape(-1)]


def _complex(x: Any, where: str) -> complex:
    if isinstance(x, bool):
        raise ParseError(f"{where}: expected a number or [re, im], got {x!r}")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        return complex(x[0], x[1])
    raise ParseError(f"{where}: expected a number or [re, im], got {x!r}")


def matrix_from_json(data: Any, where: str = "matrix", n: int | None = None) -> np.ndarray:
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise ParseError(f"{where}: expected a non-empty list of rows")
    rows = len(data)
    cols = len(data[0])
    if any(len(r) != cols for r in data):
        raise ParseError(f"{where}: rows have different lengths")
    if n is not None and (rows, cols) != (n, n):
        raise ParseError(f"{where}: expected {n}x{n}, got {rows}x{cols}")
    return np.array(
        [[_complex(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(data)],
        dtype=np.complex128,
    )


def vector_from_json(data: Any, where: str = "vector", n: int | None = None) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise ParseError(f"{where}: expected a non-empty list")
    if n is not None and len(data) != n:
        raise ParseError(f"{where}: expected {n} entries, got {len(data)}")
    return np.array([_complex(x, f"{where}[{i}]") for i, x in enumerate(data)], dtype=np.complex128)


def load_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        line = text.splitlines()[exc.lineno - 1] if exc.lineno - 1 < len(text.splitlines()) else ""
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {line}") from exc


def _declared_n(data: Any, where: str) -> int | None:
    if not isinstance(data, dict):
        raise ParseError(f"{where}: expected a JSON object")
    n = data.get("n")
    if n is None:
        return None
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError(f"{where}: 'n' must be a positive integer")
    return n


def _with_context(where: str, build):
    try:
        return build()
    except ParseError:
        raise
    except ValidationError as exc:
        raise type(exc)(f"{where}: {exc}") from exc


# -- channel ---------------------------------------------------------------

def channel_from_json(data: Any, where: str = "channel") -> QuantumChannel:
    n = _declared_n(data, where)
    if "q" not in data:
        raise ParseError(f"{where}: missing key 'q'")
    q = matrix_from_json(data["q"], f"{where}.q", n)
    return _with_context(where, lambda: QuantumChannel(q))


def channel_to_json(ch: QuantumChannel) -> dict:
    return {"n": ch.n, "q": matrix_to_json(ch.q)}


def load_channel(path) -> QuantumChannel:
    return channel_from_json(load_json(path), str(path))


# -- state -------------------------------------------------------------------

def state_from_json(data: Any, where: str = "state") -> QuantumState:
    n = _declared_n(data, where)
    if "amplitudes" in data:
        c = vector_from_json(data["amplitudes"], f"{where}.amplitudes", n)
        return _with_context(where, lambda: PureState(c))
    if "rho" in data:
        rho = matrix_from_json(data["rho"], f"{where}.rho", n)
        return _with_context(where, lambda: DensityMatrix(rho))
    raise ParseError(f"{where}: expected key 'amplitudes' or 'rho'")


def state_to_json(state: QuantumState) -> dict:
    if isinstance(state, PureState):
        return {"n": state.n, "amplitudes": vector_to_json(state.amplitudes)}
    return {"n": state.n, "rho": matrix_to_json(state.rho)}


def load_state(path) -> QuantumState:
    return state_from_json(load_json(path), str(path))


# -- basis -------------------------------------------------------------------

def basis_from_json(data: Any, where: str = "basis") -> MeasurementBasis:
    n = _declared_n(data, where)
    ops_data = data.get("operators")
    if not isinstance(ops_data, list) or not ops_data:
        raise ParseError(f"{where}: 'operators' must be a non-empty list")
    mats = [matrix_from_json(d, f"{where}.operators[{i}]", n) for i, d in enumerate(ops_data)]
    faithful = data.get("faithful") or []
    if not isinstance(faithful, list) or not all(isinstance(f, bool) for f in faithful):
        raise ParseError(f"{where}: 'faithful' must be a list of booleans")
    rec_data = data.get("recovery") or []
    if not isinstance(rec_data, list):
        raise ParseError(f"{where}: 'recovery' must be a list")
    recovery = [
        None if r is None else matrix_from_json(r, f"{where}.recovery[{i}]", mats[0].shape[0])
        for i, r in enumerate(rec_data)
    ]
    return _with_context(
        where,
        lambda: MeasurementBasis(
            tuple(MeasurementOperator(m) for m in mats), tuple(faithful), tuple(recovery)
        ),
    )


def basis_to_json(basis: MeasurementBasis) -> dict:
    return {
        "n": basis.n,
        "operators": [matrix_to_json(op.d) for op in basis.operators],
        "faithful": list(basis.faithful),
        "recovery": [None if u is None else matrix_to_json(u) for u in basis.recovery],
    }


def load_basis(path) -> MeasurementBasis:
    return basis_from_json(load_json(path), str(path))


# -- frame / unitaries ---------------------------------------------------------

def frame_from_json(data: Any, where: str = "frame") -> LocalUnitaryFrame:
    if not isinstance(data, dict):
        raise ParseError(f"{where}: expected a JSON object")
    for key in ("u_a", "u_b"):
        if key not in data:
            raise ParseError(f"{where}: missing key {key!r}")
    u_a = matrix_from_json(data["u_a"], f"{where}.u_a")
    u_b = matrix_from_json(data["u_b"], f"{where}.u_b")
    u_c = None if data.get("u_c") is None else matrix_from_json(data["u_c"], f"{where}.u_c")
    return LocalUnitaryFrame(u_a, u_b, u_c)


def frame_to_json(f: LocalUnitaryFrame) -> dict:
    return {"u_a": matrix_to_json(f.u_a), "u_b": matrix_to_json(f.u_b), "u_c": matrix_to_json(f.u_c)}


def load_frame(path) -> LocalUnitaryFrame:
    return frame_from_json(load_json(path), str(path))


def unitaries_from_json(data: Any, where: str = "unitaries") -> list[np.ndarray]:
    if isinstance(data, dict):
        data = data.get("unitaries")
    if not isinstance(data, list) or not data:
        raise ParseError(f"{where}: expected a non-empty list of matrices")
    return [matrix_from_json(u, f"{where}[{i}]") for i, u in enumerate(data)]


def load_unitaries(path) -> list[np.ndarray]:
    return unitaries_from_json(load_json(path), str(path))


# -- report -------------------------------------------------------------------

def report_to_json(report: TeleportationReport) -> dict:
    outcomes = []
    for o in report.outcomes:
        rec = {
            "m": o.m,
            "p_m": o.probability,
            "faithful": o.faithful,
            "fidelity": o.fidelity,
            "fidelity_min_over_probes": o.fidelity_min_over_probes,
        }
        if o.recovery_unitary is not None:
            rec["recovery_unitary"] = matrix_to_json(o.recovery_unitary)
        outcomes.append(rec)
    return {
        "outcomes": outcomes,
        "eta": report.eta,
        "faithful_outcomes": report.faithful_indices,
        "total_faithful_probability": report.total_faithful_probability,
        "total_probability": report.total_probability,
    }
