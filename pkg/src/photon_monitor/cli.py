"""Command-line entry point: write the simulation datasets as CSV.

Exit codes: 0 success, 2 usage error, 3 numerical failure (extinction or a
violated invariant), 4 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__
from .cavities import AMPLITUDE, LITERAL, CavityParams, fock_state, time_grid, unitary_scan
from .jc import PER_MEMBER, PRINTED, RWA, SHARED, JCEnsemble, JCParams, jc_entropy_scan
from .monitor import ExtinctionError, cavity_protocol, entropy_scan_unitary, run_trajectory

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4

TRACE_TOL = 1e-10
SURVIVAL_SLACK = 1e-12


class InvariantViolation(ArithmeticError):
    pass


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _nonneg_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(value) and value >= 0):
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _finite_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite, got {text}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def fmt(x, digits: int) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    s = f"{x:.{digits}g}"
    return "0" if s in ("-0", "0") else s


class CsvTable:
    """Rows collected in memory and written in one go."""

    def __init__(self, columns, digits: int):
        self.columns = list(columns)
        self.digits = digits
        self.meta: list[tuple[str, object]] = []
        self.lines: list[str] = []

    def note(self, key: str, value) -> None:
        self.meta.append((key, value))

    def row(self, *values) -> None:
        self.lines.append(",".join(fmt(v, self.digits) for v in values))

    def marker(self, text: str) -> None:
        self.lines.append(f"# {text}")

    def render(self) -> str:
        out = [f"# {k}: {v}" for k, v in self.meta]
        out.append(",".join(self.columns))
        out.extend(self.lines)
        return "\n".join(out) + "\n"


def _common_meta(table: CsvTable, args) -> None:
    table.note("program", f"photon_monitor {__version__}")
    table.note("command", args.command)
    table.note("units", "hbar = 1")


def cmd_unitary(args) -> tuple[CsvTable, int]:
    p = CavityParams(args.n, args.j, args.omega0, args.hopping)
    times = time_grid(args.t_max, args.dt)
    reports = unitary_scan(p, times=times)
    entropy = entropy_scan_unitary(p, times=times)[:, 1]
    table = CsvTable(
        ["t", "abs_c0", "abs_cN", "p_e", "fidelity_phi0", "fidelity_phipi", "delta", "renyi2"],
        args.precision,
    )
    _common_meta(table, args)
    for key in ("n", "j", "omega0", "hopping", "t_max", "dt"):
        table.note(key, getattr(args, key))
    table.note("time_unit", "1/J")
    table.note("fidelity_phipi", "overlap with (|N,0> - |0,N>)/sqrt(2)")
    for r, s2 in zip(reports, entropy):
        table.row(r.t, r.abs_c0, r.abs_cN, r.p_e, r.fidelity_phi0, r.fidelity_phipi, r.delta, s2)
    return table, EXIT_OK


def cmd_monitor(args) -> tuple[CsvTable, int]:
    p = CavityParams(args.n, args.j, args.omega0, args.hopping)
    proto = cavity_protocol(p, args.tau, args.steps)
    traj = run_trajectory(proto, targets=[fock_state(p, p.n_photons)])
    table = CsvTable(
        [
            "m",
            "survival_norm",
            "return_prob_unnorm",
            "return_prob_norm",
            "transition_prob_unnorm",
            "transition_prob_norm",
            "fidelity_phi0",
            "delta",
            "renyi2",
        ],
        args.precision,
    )
    _common_meta(table, args)
    for key in ("n", "j", "omega0", "hopping", "tau", "steps"):
        table.note(key, getattr(args, key))
    table.note("reference_state", "|N,0>")
    table.note("fidelity_delta_source", "unnormalized monitored state")

    diffs = np.diff(traj.survival)
    if np.any(diffs > SURVIVAL_SLACK):
        raise InvariantViolation(f"survival norm increased by {diffs.max():.3g}")
    if np.max(traj.post_projection_overlap) > 1e-12:
        raise InvariantViolation("projection left weight on the reference state")
    for i, m in enumerate(traj.steps):
        c0, cN = traj.states[i, 0], traj.states[i, -1]
        table.row(
            int(m),
            traj.survival[i],
            traj.return_prob_unnorm[i],
            traj.return_prob_norm[i],
            traj.target_prob_unnorm[i, 0],
            traj.target_prob_norm[i, 0],
            0.5 * abs(c0 + cN) ** 2,
            2.0 * float(np.real(np.conj(c0) * cN)),
            traj.renyi2[i],
        )
    if traj.extinct_at is not None:
        table.marker(f"EXTINCT m={traj.extinct_at}")
        return table, EXIT_NUMERICAL
    return table, EXIT_OK


def cmd_jc(args) -> tuple[CsvTable, int]:
    p = JCParams(args.nmax, args.omega, args.coupling, args.omega_a, args.convention)
    n_init = args.nmax if args.n_init is None else args.n_init
    if n_init > args.nmax:
        raise ValueError(f"--n-init {n_init} exceeds --nmax {args.nmax}")
    ens = JCEnsemble.uniform_mixture(n_init)
    table = CsvTable(["step_or_time", "renyi2", "trace_check", "mode"], args.precision)
    _common_meta(table, args)
    for key in ("nmax", "omega", "coupling", "omega_a", "convention", "n_init", "mode"):
        table.note(key, getattr(args, key) if key != "n_init" else n_init)
    table.note("initial_state", f"uniform mixture of |down,n>, n=1..{n_init}")
    table.note("block_pairing", "block n couples |up,n> and |down,n+1>; |down,1> uncoupled")
    table.note("photon_levels", f"1..{args.nmax + 1} (|down,{args.nmax + 1}> closes the top block)")
    if args.convention == PRINTED:
        table.note("omega_a_note", "not used by the printed block matrices")
    extinct_at = None
    if args.mode == "unitary":
        table.note("t_max", args.t_max)
        table.note("dt", args.dt)
        table.note("time_unit", "1/omega")
        rows = jc_entropy_scan(p, ens, "unitary", times=time_grid(args.t_max, args.dt))
    else:
        table.note("tau", args.tau)
        table.note("tau_meaning", "tau*omega (dimensionless step)")
        table.note("steps", args.steps)
        table.note("projector", args.projector)
        table.note("reference_state", "equal-amplitude superposition of the initial down states")
        try:
            rows = jc_entropy_scan(
                p, ens, "monitored", tau=args.tau, steps=args.steps, projector=args.projector
            )
        except ExtinctionError as exc:
            # replay the surviving prefix so the file still carries the data
            rows = jc_entropy_scan(
                p, ens, "monitored", tau=args.tau, steps=exc.step - 1, projector=args.projector
            ) if exc.step > 1 else np.empty((0, 3))
            extinct_at = exc.step
    for x, s2, tr in rows:
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvariantViolation(f"photon density trace {tr!r} at {x}")
        step_or_time = int(round(x)) if args.mode == "monitored" else x
        table.row(step_or_time, s2, tr, args.mode)
    if extinct_at is not None:
        table.marker(f"EXTINCT m={extinct_at}")
        return table, EXIT_NUMERICAL
    return table, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photon-monitor",
        description="Monitored photon dynamics in coupled cavities and the Jaynes-Cummings model.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-o", "--output", default="-", help="CSV path, '-' for stdout")
        p.add_argument("--precision", type=_positive_int, default=12, help="significant digits")

    def cavity(p):
        p.add_argument("--n", type=_positive_int, default=2, help="photon number N")
        p.add_argument("--j", type=_positive_float, default=1.0, help="hopping J")
        p.add_argument("--omega0", type=_finite_float, default=0.0, help="cavity frequency")
        p.add_argument("--hopping", choices=[AMPLITUDE, LITERAL], default=AMPLITUDE)

    u = sub.add_parser("unitary", help="unitary N00N measures and entropy versus time")
    cavity(u)
    u.add_argument("--t-max", type=_positive_float, default=2 * math.pi)
    u.add_argument("--dt", type=_positive_float, default=0.01)
    common(u)

    m = sub.add_parser("monitor", help="monitored return/transition probabilities versus m")
    cavity(m)
    m.add_argument("--tau", type=_positive_float, default=0.5)
    m.add_argument("--steps", type=_positive_int, default=100)
    common(m)

    j = sub.add_parser("jc", help="photon entropy of the Jaynes-Cummings model")
    j.add_argument("--nmax", type=_positive_int, default=15)
    j.add_argument("--omega", type=_positive_float, default=1.0)
    j.add_argument("--coupling", type=_nonneg_float, default=0.1)
    j.add_argument("--omega-a", type=_finite_float, default=None)
    j.add_argument("--convention", choices=[PRINTED, RWA], default=PRINTED)
    j.add_argument("--n-init", type=_positive_int, default=None, help="initial down states (default nmax)")
    j.add_argument("--mode", choices=["unitary", "monitored"], default="unitary")
    j.add_argument("--t-max", type=_positive_float, default=200.0)
    j.add_argument("--dt", type=_positive_float, default=0.1)
    j.add_argument("--tau", type=_positive_float, default=1.0)
    j.add_argument("--steps", type=_positive_int, default=300)
    j.add_argument("--projector", choices=[SHARED, PER_MEMBER], default=SHARED)
    common(j)
    return parser


COMMANDS = {"unitary": cmd_unitary, "monitor": cmd_monitor, "jc": cmd_jc}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        table, status = COMMANDS[args.command](args)
    except ValueError as exc:
        parser.error(str(exc))  # exits with status 2
    except (ExtinctionError, InvariantViolation) as exc:
        print(f"photon-monitor: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = table.render()
    try:
        if args.output == "-":
            sys.stdout.write(text)
        else:
            with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"photon-monitor: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_IO
    return status


if __name__ == "__main__":
    sys.exit(main())
