"""Command-line front end.

Every command writes one table (CSV or JSON) to stdout or ``--output``.
Exit codes: 0 success, 1 validation error, 2 verification failure,
3 I/O failure. Errors are reported as a single ``error: <kind>: <message>``
line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import dirac2d as d2
from . import iontrap
from . import propagator as prop
from .fockspace import DOWN, FockSpace, SpinorState, TailTooLarge, chiral_number_state, coherent_state
from .verify import run_verification

__all__ = ["Table", "emit", "format_table", "trace_table", "build_parser", "run", "main"]

SCHEMA = "djc-1"
EXIT_OK, EXIT_VALIDATION, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3


@dataclass(frozen=True)
class Table:
    columns: tuple
    rows: list


def _cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return str(value)


def _json_value(value):
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def format_table(table: Table, fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([_cell(v) for v in row])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "schema": SCHEMA,
            "columns": list(table.columns),
            "rows": [[_json_value(v) for v in row] for row in table.rows],
        }
        return json.dumps(doc) + "\n"
    raise ValueError(f"unknown output format {fmt!r}")


def emit(table: Table, fmt: str = "csv", sink: Optional[str] = None) -> None:
    """Write ``table`` to the file ``sink``, or stdout when ``sink`` is None or ``-``."""
    text = format_table(table, fmt)
    if sink in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(sink, "w", newline="") as fh:
        fh.write(text)


def trace_table(trace: prop.ObservableTrace, *, jz: bool = True, shelving_hbar: Optional[float] = None) -> Table:
    columns = ["t", "lz", "sz"] + (["jz"] if jz else []) + (["P_e"] if shelving_hbar else [])
    rows = []
    for k in range(len(trace)):
        row = [trace.times[k], trace.lz[k], trace.sz[k]]
        if jz:
            row.append(trace.jz[k])
        if shelving_hbar:
            # clip rounding excursions at the ±ħ/2 endpoints
            sz = min(max(trace.sz[k], -shelving_hbar / 2), shelving_hbar / 2)
            row.append(iontrap.shelving_probability(sz, shelving_hbar))
        rows.append(row)
    return Table(tuple(columns), rows)


# argument handling


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: UsageError: {message}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def _add_physics(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("physical parameters (defaults m = c = hbar = 1)")
    g.add_argument("--m", type=float, default=1.0, help="rest mass")
    g.add_argument("--c", type=float, default=1.0, help="speed of light")
    g.add_argument("--hbar", type=float, default=1.0)
    freq = g.add_mutually_exclusive_group()
    freq.add_argument("--xi", type=float, help="dimensionless coupling hbar*omega/(m c^2)")
    freq.add_argument("--omega", type=float, help="oscillator frequency")


def _add_grid(p: argparse.ArgumentParser, t_end: float = 10.0, points: int = 201) -> None:
    g = p.add_argument_group("time grid (units of hbar/(m c^2) by default)")
    g.add_argument("--t-start", type=float, default=0.0)
    g.add_argument("--t-end", type=float, default=t_end)
    g.add_argument("--points", type=int, default=points)


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default="-", help="output path, '-' for stdout")


def _add_trap(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("trap parameters (file or flags)")
    g.add_argument("--trap-file", help="key = value parameter file")
    g.add_argument("--eta", type=float)
    g.add_argument("--omega-rabi", type=float)
    g.add_argument("--delta", type=float)
    g.add_argument("--delta-width", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="diracjc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="doublet energies and eigenvector amplitudes")
    _add_physics(p)
    p.add_argument("--n-l-max", type=int, default=5)
    _add_output(p)

    p = sub.add_parser("zitter", help="closed-form Zitterbewegung of one doublet")
    _add_physics(p)
    p.add_argument("--n-l", type=int, default=1)
    _add_grid(p)
    _add_output(p)

    p = sub.add_parser("revival", help="collapse/revival series from a circular coherent state")
    _add_physics(p)
    p.add_argument("--z", type=complex, default=complex(2.0), help="coherent amplitude, e.g. 2 or 1+1j")
    p.add_argument("--n-terms", type=int, help="series length (default: from the Poisson tail bound)")
    _add_grid(p, t_end=50.0, points=501)
    _add_output(p)

    p = sub.add_parser("evolve", help="numerical propagation on the two-mode Fock space")
    _add_physics(p)
    p.add_argument("--form", choices=("jc", "ajc", "cartesian"), default="jc")
    start = p.add_mutually_exclusive_group()
    start.add_argument("--n-l", type=int, help="start in |n_l - 1>|down> (default n_l = 1)")
    start.add_argument("--z", type=complex, help="start in the left coherent state |z>|down>")
    p.add_argument("--n-max", type=int, default=20)
    _add_grid(p)
    _add_output(p)

    p = sub.add_parser("map-trap", help="trap settings <-> Dirac parameters")
    _add_trap(p)
    p.add_argument("--hbar", type=float, default=1.0)
    inv = p.add_argument_group("inverse mapping (emits a trap parameter file)")
    inv.add_argument("--target-xi", type=float)
    inv.add_argument("--target-omega1", type=float)
    _add_output(p)

    p = sub.add_parser("pulses", help="sideband configurations building the Dirac oscillator")
    _add_trap(p)
    _add_output(p)

    p = sub.add_parser("verify", help="closed form vs numerical oracle")
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)
    return parser


def _params(args) -> d2.PhysParams:
    if args.omega is not None:
        return d2.PhysParams(m=args.m, c=args.c, omega=args.omega, hbar=args.hbar)
    xi = 0.0 if args.xi is None else args.xi
    return d2.PhysParams.from_xi(xi, m=args.m, c=args.c, hbar=args.hbar)


def _grid(args) -> np.ndarray:
    if args.points < 1:
        raise ValueError("--points must be >= 1")
    if args.t_end < args.t_start:
        raise ValueError("--t-end must not precede --t-start")
    return np.linspace(args.t_start, args.t_end, args.points)


def _trap(args) -> iontrap.IonTrapParams:
    if args.trap_file:
        return iontrap.read_trap_file(args.trap_file)
    missing = [f for f in ("eta", "omega_rabi", "delta") if getattr(args, f) is None]
    if missing:
        raise ValueError("need --trap-file or all of --eta, --omega-rabi, --delta")
    return iontrap.IonTrapParams(eta=args.eta, omega_rabi=args.omega_rabi, delta=args.delta,
                                 delta_width_motional=args.delta_width)


def _cmd_spectrum(args) -> Table:
    params = _params(args)
    if args.n_l_max < 1:
        raise ValueError("--n-l-max must be >= 1")
    rows = []
    for n_l in range(1, args.n_l_max + 1):
        s = d2.spectrum(params, n_l)
        rows.append([n_l, s.energy_plus, s.energy_minus, s.alpha, s.beta])
    return Table(("n_l", "E_plus", "E_minus", "alpha", "beta"), rows)


def _cmd_zitter(args) -> Table:
    params = _params(args)
    trace = d2.zitterbewegung_trace(params, args.n_l, _grid(args))
    return trace_table(trace, shelving_hbar=params.hbar)


def _cmd_revival(args) -> Table:
    params = _params(args)
    trace = d2.collapse_revival_trace(params, args.z, _grid(args), args.n_terms)
    return trace_table(trace, jz=False)


def _cmd_evolve(args) -> Table:
    params = _params(args)
    if args.n_max < 2:
        raise ValueError("--n-max must be >= 2")
    space = FockSpace(args.n_max)
    builders = {
        "jc": d2.build_hamiltonian_jc,
        "ajc": d2.build_hamiltonian_ajc,
        "cartesian": d2.build_hamiltonian_cartesian,
    }
    h = builders[args.form](params, space)
    if args.z is not None:
        bosonic = coherent_state(args.z, space, "left")
    else:
        n_l = 1 if args.n_l is None else args.n_l
        if n_l < 1:
            raise ValueError("--n-l must be >= 1")
        bosonic = chiral_number_state(space, n_l - 1)
    psi0 = SpinorState.product(bosonic, DOWN, space)
    decomp = prop.diagonalize(h)
    trace = prop.angular_momentum_trajectory(
        decomp, psi0, d2.orbital_lz(space, params.hbar), d2.spin_sz(space, params.hbar), _grid(args))
    return trace_table(trace)


def _cmd_map_trap(args) -> Table | str:
    inverse = args.target_xi is not None or args.target_omega1 is not None
    if inverse:
        if args.target_xi is None or args.target_omega1 is None or args.eta is None:
            raise ValueError("inverse mapping needs --target-xi, --target-omega1 and --eta")
        trap = iontrap.trap_from_dirac(args.target_xi, args.target_omega1, args.eta, args.delta_width)
        return iontrap.format_trap_file(trap)
    params = iontrap.dirac_from_trap(_trap(args), hbar=args.hbar)
    row = [params.xi, params.m, params.c, params.omega, params.hbar, params.delta_width,
           iontrap.zitterbewegung_frequency_hz(params)]
    return Table(("xi", "m", "c", "omega", "hbar", "delta_width", "omega1"), [row])


def _cmd_pulses(args) -> Table:
    rows = [[p.axis, p.detuning, p.phase_red, p.phase_blue, "+".join(p.produced_term)]
            for p in iontrap.pulse_table(_trap(args))]
    return Table(("axis", "detuning", "phase_red", "phase_blue", "produced_term"), rows)


def _cmd_verify(args) -> Table:
    results = run_verification(args.n_max, args.seed)
    rows = [[r.name, r.residual, r.tolerance, r.passed] for r in results]
    return Table(("check", "max_residual", "tolerance", "passed"), rows)


COMMANDS = {
    "spectrum": _cmd_spectrum,
    "zitter": _cmd_zitter,
    "revival": _cmd_revival,
    "evolve": _cmd_evolve,
    "map-trap": _cmd_map_trap,
    "pulses": _cmd_pulses,
    "verify": _cmd_verify,
}


def _fail(kind: str, exc: BaseException, code: int) -> int:
    message = " ".join(str(exc).split())
    print(f"error: {kind}: {message}", file=sys.stderr)
    return code


def run(args: argparse.Namespace) -> int:
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = COMMANDS[args.command](args)
        for w in caught:
            print(f"warning: {w.category.__name__}: {w.message}", file=sys.stderr)
    except TailTooLarge as exc:
        return _fail("TailTooLarge", exc, EXIT_VALIDATION)
    except OSError as exc:
        return _fail("IOError", exc, EXIT_IO)
    except ValueError as exc:
        return _fail("ValidationError", exc, EXIT_VALIDATION)
    try:
        if isinstance(result, str):
            if args.output in (None, "-"):
                sys.stdout.write(result)
            else:
                with open(args.output, "w") as fh:
                    fh.write(result)
        else:
            emit(result, args.format, args.output)
    except OSError as exc:
        return _fail("IOError", exc, EXIT_IO)
    if args.command == "verify":
        failed = [row[0] for row in result.rows if not row[3]]
        worst = max(row[1] for row in result.rows)
        print(f"verify: max residual {worst:.3e}, {len(failed)} failed", file=sys.stderr)
        if failed:
            print(f"error: VerificationFailed: {', '.join(failed)}", file=sys.stderr)
            return EXIT_VERIFY
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
