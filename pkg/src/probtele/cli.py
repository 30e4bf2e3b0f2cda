"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 domain error (singular
channel, non-unitary input, unsupported dimension, ...).
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import io
from . import numerics as nx
from .channel import (
    QuantumChannel,
    entanglement_entropy,
    faithful_probability,
    is_maximally_entangled,
    reduced_density,
    schmidt_decompose,
)
from .errors import DomainError, ProbteleError, SingularError, UnsupportedDimensionError
from .eta_search import SearchConfig, certify_eta
from .frames import transform_basis, transform_channel
from .measurement import synthesize_basis
from .simulator import DEFAULT_PROBES, DEFAULT_SEED, PureState, run_protocol

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2

log = logging.getLogger("probtele")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _positive(kind):
    def parse(text):
        value = kind(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value

    return parse


def channel_branch(ch: QuantumChannel, tol: float) -> str:
    return "maximal" if is_maximally_entangled(ch, tol) else "partial"


def analyze(ch: QuantumChannel, tol: float = nx.DEFAULT_TOL) -> dict:
    """Headline quantities of a channel; raises ``SingularError`` for product-like channels."""
    p = faithful_probability(ch)
    branch = channel_branch(ch, tol)
    if branch == "maximal":
        p_max = 1.0
    elif ch.n == 2:
        p_max = 2.0 * p
    else:
        p_max = None
    return {
        "n": ch.n,
        "rho_q": io.matrix_to_json(reduced_density(ch)),
        "p": p,
        "p_max": p_max,
        "schmidt_coefficients": [float(x) for x in schmidt_decompose(ch).coefficients],
        "entropy_nats": entanglement_entropy(ch),
        "entropy_bits": entanglement_entropy(ch, base=2),
        "maximally_entangled": branch == "maximal",
        "branch": branch,
    }


def sweep_rows(thetas: Sequence[float], tol: float = nx.DEFAULT_TOL, seed: int = DEFAULT_SEED) -> list[dict]:
    """One row per angle of ``cos t |00> + sin t |11>``.

    ``p_max`` and ``eta`` come from simulating the synthesized basis, not the
    closed form.
    """
    rows = []
    probe = PureState(np.array([1.0, 1.0j]) / math.sqrt(2))
    for t in thetas:
        ch = QuantumChannel.from_theta(t)
        row = {"theta": t, "entropy": entanglement_entropy(ch)}
        try:
            p = faithful_probability(ch)
        except SingularError:
            row.update(p=None, p_max=None, eta=0, eta_branch="singular")
        else:
            report = run_protocol(ch, synthesize_basis(ch, tol=tol), probe, seed=seed, tol=tol)
            row.update(
                p=p,
                p_max=report.total_faithful_probability,
                eta=report.eta,
                eta_branch=channel_branch(ch, tol),
            )
        rows.append(row)
    return rows


def _render_csv(rows: list[dict], columns: Sequence[str]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow(
            [
                "" if r[c] is None else (_fmt(r[c]) if isinstance(r[c], float) else r[c])
                for c in columns
            ]
        )
    return buf.getvalue()


def _flatten_text(payload: dict) -> str:
    lines = []
    for key, value in payload.items():
        if isinstance(value, float):
            value = _fmt(value)
        elif isinstance(value, list) and all(isinstance(v, float) for v in value):
            value = "[" + ", ".join(_fmt(v) for v in value) + "]"
        elif isinstance(value, (list, dict)):
            value = json.dumps(value)
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def _emit(args, payload, csv_rows=None, csv_columns=None) -> None:
    fmt = args.format or ("csv" if csv_rows is not None else "json")
    if fmt == "csv":
        if csv_rows is None:
            raise argparse.ArgumentTypeError("csv output is only available for 'sweep'")
        text = _render_csv(csv_rows, csv_columns)
    elif fmt == "text":
        text = _flatten_text(payload)
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# -- commands ----------------------------------------------------------------

def cmd_analyze(args) -> int:
    ch = io.load_channel(args.channel)
    _emit(args, analyze(ch, args.tol))
    return EXIT_OK


def cmd_synthesize(args) -> int:
    ch = io.load_channel(args.channel)
    unitaries = io.load_unitaries(args.unitaries) if args.unitaries else None
    basis = synthesize_basis(ch, unitaries, tol=args.tol)
    payload = io.basis_to_json(basis)
    payload["p"] = faithful_probability(ch)
    payload["eta"] = basis.eta
    _emit(args, payload)
    return EXIT_OK


def cmd_simulate(args) -> int:
    ch = io.load_channel(args.channel)
    basis = io.load_basis(args.basis)
    state = io.load_state(args.state)
    report = run_protocol(ch, basis, state, probes=args.probes, seed=args.seed, tol=args.tol)
    _emit(args, io.report_to_json(report))
    return EXIT_OK


def cmd_eta(args) -> int:
    ch = io.load_channel(args.channel)
    if ch.n != 2:
        raise UnsupportedDimensionError(f"eta certificates are only defined for N = 2, got N = {ch.n}")
    config = SearchConfig(grid=args.grid, refine_starts=args.refine_starts)
    cert = certify_eta(ch, config)
    if cert.third_search.gray_zone:
        print(
            f"warning: min violation {cert.third_search.min_violation:.3g} is below "
            f"{config.certify_tol:g}; non-existence is not certified",
            file=sys.stderr,
        )
    _emit(args, cert.to_dict())
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.steps < 1:
        raise argparse.ArgumentTypeError("--steps must be at least 1")
    thetas = np.linspace(args.theta_min, args.theta_max, args.steps) if args.steps > 1 else [args.theta_min]
    rows = sweep_rows([float(t) for t in thetas], tol=args.tol, seed=args.seed)
    columns = ["theta", "p", "p_max", "entropy", "eta", "eta_branch"]
    _emit(args, {"rows": rows}, rows, columns)
    return EXIT_OK


def cmd_transform(args) -> int:
    ch = io.load_channel(args.channel)
    frame = io.load_frame(args.frame)
    payload = {"channel": io.channel_to_json(transform_channel(ch, frame))}
    if args.basis:
        payload["basis"] = io.basis_to_json(transform_basis(io.load_basis(args.basis), frame))
    _emit(args, payload)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive(float), default=nx.DEFAULT_TOL, help="numerical tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for random probe states")
    common.add_argument("--out", help="write output to FILE instead of stdout")
    # None resolves per command: csv for sweep, json elsewhere
    common.add_argument("--format", choices=["json", "csv", "text"], default=None)

    parser = _Parser(prog="probtele", description="Probabilistic teleportation over partially entangled channels.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="faithful probability, Schmidt form, entropy")
    p.add_argument("--channel", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synthesize", parents=[common], help="matching measurement basis for a channel")
    p.add_argument("--channel", required=True)
    p.add_argument("--unitaries", help="JSON list of recovery unitaries (default: I and [[0,1],[-1,0]])")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("simulate", parents=[common], help="teleport a state through every outcome")
    p.add_argument("--channel", required=True)
    p.add_argument("--basis", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--probes", type=_positive(int), default=DEFAULT_PROBES)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("eta", parents=[common], help="numerical certificate for the faithful count (N = 2)")
    p.add_argument("--channel", required=True)
    p.add_argument("--grid", type=_positive(int), default=64, help="grid points per angle")
    p.add_argument("--refine-starts", type=_positive(int), default=10)
    p.set_defaults(func=cmd_eta)

    p = sub.add_parser("sweep", parents=[common], help="p and p_max along cos t|00> + sin t|11>")
    p.add_argument("--theta-min", type=float, default=0.0)
    p.add_argument("--theta-max", type=float, default=math.pi / 2)
    p.add_argument("--steps", type=int, default=91)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("transform", parents=[common], help="re-express a channel (and basis) in a new local frame")
    p.add_argument("--channel", required=True)
    p.add_argument("--frame", required=True)
    p.add_argument("--basis")
    p.set_defaults(func=cmd_transform)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ProbteleError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
