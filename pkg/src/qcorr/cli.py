"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 inconsistent data (output is still
written, with a warning on stderr).
"""

from __future__ import annotations

import argparse
import cmath
import io
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .correlations import format_float, product_mean
from .errors import InconsistentTableError, QCorrError
from .hardy import hardy_joint_tables, hardy_state, maximize_paradox, paradox_report
from .io import StateFile, complex_pairs, dumps, load_state, load_table, write_table
from .linalg import DEFAULT_TOL, validate_density
from .measurement import build_setup, decoherence_trace, final_state, specimen_post_state
from .operators import pauli_matrix, singlet_ket, singlet_projector_matrix
from .sampling import PRNG_NAME, make_rng, random_density
from .ssc import correlation_table, purity_witness, reconstruct, singlet_from_anticorrelations
from .states import purity, schmidt

EXIT_OK, EXIT_INPUT, EXIT_INCONSISTENT = 0, 2, 3


class InputError(Exception):
    pass


def _tol(text: str) -> float:
    value = float(text)
    if not 0.0 < value <= 1e-2:
        raise argparse.ArgumentTypeError("tol must lie in (0, 1e-2]")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be a non-negative integer")
    return value


def _dims(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must look like 2,2 (got {text!r})") from None


def _metadata(args) -> dict:
    return {"tool": f"qcorr {__version__}", "prng": PRNG_NAME, "seed": args.seed, "tol": args.tol}


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _flat_csv(obj, prefix: str = "") -> list[tuple[str, str]]:
    rows = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            rows += _flat_csv(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            rows += _flat_csv(v, f"{prefix}[{i}]")
    elif isinstance(obj, bool) or obj is None or isinstance(obj, str):
        rows.append((prefix, str(obj).lower() if isinstance(obj, bool) else str(obj)))
    else:
        rows.append((prefix, format_float(obj) if isinstance(obj, float) else str(obj)))
    return rows


def _to_csv(obj) -> str:
    buf = io.StringIO()
    buf.write("key,value\n")
    for k, v in _flat_csv(obj):
        buf.write(f"{k},{v}\n")
    return buf.getvalue()


def _render(args, obj: dict) -> str:
    return _to_csv(obj) if args.format == "csv" else dumps(obj)


# demos ---------------------------------------------------------------------

def _demo_singlet(args) -> int:
    mean, certified = singlet_from_anticorrelations(-1.0, -1.0, -1.0, tol=args.tol)
    w = np.outer(singlet_ket(), singlet_ket().conj())
    measured = {
        f"c{a}{a}": product_mean(w, [pauli_matrix(a), pauli_matrix(a)]) for a in "xyz"
    }
    rec = reconstruct(correlation_table(w, (2, 2)))
    s = singlet_ket()
    rng = make_rng(args.seed)
    worst = 0.0
    for _ in range(args.samples):
        rho = random_density(rng, 4)
        back = reconstruct(correlation_table(rho, (2, 2))).density
        worst = max(worst, float(np.linalg.norm(back - rho)))
    report = {
        "demo": "singlet",
        "metadata": _metadata(args),
        "anticorrelations": {"cxx": -1.0, "cyy": -1.0, "czz": -1.0},
        "singlet_mean": mean,
        "verdict": "singlet-certified" if certified else "not certified",
        "measured_correlations": measured,
        "reconstruction": {
            "table_entries": 16,
            "frobenius_error": float(np.linalg.norm(rec.density - singlet_projector_matrix())),
            "fidelity": float(np.vdot(s, rec.density @ s).real),
            "trace": rec.trace,
            "min_eigenvalue": rec.min_eigenvalue,
        },
        "round_trip": {
            "dims": [2, 2],
            "samples": args.samples,
            "max_frobenius_error": worst,
        },
    }
    _emit(args, _render(args, report))
    return EXIT_OK if certified else EXIT_INCONSISTENT


def _tables_csv(tables) -> str:
    buf = io.StringIO()
    buf.write("table,unprimed,primed,probability\n")
    for name, jd in tables.items():
        for labels, p in jd.rows():
            buf.write(f"{name},{labels[0]},{labels[1]},{format_float(p)}\n")
    return buf.getvalue()


def _demo_hardy(args) -> int:
    out = {"demo": "hardy", "metadata": _metadata(args)}
    if args.maximize:
        tu, tp, pmax = maximize_paradox(args.grid)
        out["maximize"] = {"grid": args.grid, "theta": tu, "theta_prime": tp, "p_max": pmax}
    else:
        tu = args.theta
        tp = args.theta if args.theta_prime is None else args.theta_prime
    h = hardy_state(tu, tp)
    report = paradox_report(h, tol=args.tol)
    tables = hardy_joint_tables(h)
    out["report"] = report.to_dict()
    out["tables"] = {name: jd.to_dict() for name, jd in tables.items()}
    if args.format == "csv":
        _emit(args, _tables_csv(tables))
    else:
        _emit(args, dumps(out))
        if args.output:
            out_path = Path(args.output)
            out_path.with_name(out_path.stem + ".tables.csv").write_text(_tables_csv(tables))
    return EXIT_OK


def _parse_alpha(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _demo_measurement(args) -> int:
    if args.alpha:
        alphas = list(args.alpha)
    else:
        alphas = [1 / math.sqrt(2), cmath.exp(1j * args.phase) / math.sqrt(2)]
    setup = build_setup(len(alphas), args.apparatus_dim or len(alphas), args.ready)
    rows = decoherence_trace(setup, alphas, args.steps)
    final = final_state(setup, alphas)
    if args.format == "json":
        obj = {
            "demo": "measurement",
            "metadata": _metadata(args),
            "alphas": [[a.real, a.imag] for a in map(complex, alphas)],
            "final_specimen_purity": purity(specimen_post_state(final, setup)),
            "trace": [{"t": t, "purity": p, "cross_phase_correlation": c} for t, p, c in rows],
        }
        _emit(args, dumps(obj))
    else:
        buf = io.StringIO()
        buf.write("t,purity,cross_phase_correlation\n")
        for t, p, c in rows:
            buf.write(f"{format_float(t)},{format_float(p)},{format_float(c)}\n")
        _emit(args, buf.getvalue())
    return EXIT_OK


def cmd_demo(args) -> int:
    if args.format is None:
        args.format = "csv" if args.name == "measurement" else "json"
    return {"singlet": _demo_singlet, "hardy": _demo_hardy, "measurement": _demo_measurement}[args.name](args)


# file commands --------------------------------------------------------------

def cmd_reconstruct(args) -> int:
    table = load_table(args.table)
    status = EXIT_OK
    try:
        rec = reconstruct(table)
        w = rec.density
    except InconsistentTableError as exc:
        w = exc.density
        status = EXIT_INCONSISTENT
        print(f"warning: {exc}", file=sys.stderr)
    report = validate_density(w, args.tol)
    if status == EXIT_OK and not report.ok:
        status = EXIT_INCONSISTENT
        print("warning: reconstructed matrix fails validation: " + "; ".join(report.failures()),
              file=sys.stderr)
    text = dumps(StateFile(table.dims, "density", w).to_dict())
    summary = dumps({
        "trace": float(np.trace(w).real),
        "min_eigenvalue": report.min_eigenvalue,
        "hermiticity": report.hermiticity,
        "ok": report.ok,
    })
    if args.output:
        Path(args.output).write_text(text)
        sys.stdout.write(summary)
    else:
        sys.stdout.write(text)
        sys.stderr.write(summary)
    return status


def cmd_table(args) -> int:
    state = load_state(args.state, args.tol)
    table = correlation_table(state.density(), state.dims)
    if args.output:
        write_table(args.output, table)
    else:
        sys.stdout.write(dumps(table.to_dict()))
    return EXIT_OK


def cmd_schmidt(args) -> int:
    state = load_state(args.state, args.tol)
    if state.kind != "ket":
        raise InputError("schmidt needs a ket state file, got a density")
    dims = args.dims or state.dims
    if len(dims) != 2:
        raise InputError(f"schmidt needs exactly two factors, got dims {list(dims)}")
    if int(np.prod(dims)) != state.data.size:
        raise InputError(f"dims {list(dims)} do not match state dimension {state.data.size}")
    psi = state.data / np.linalg.norm(state.data)
    form = schmidt(psi, dims)
    coeffs = [float(c) for c in form.coefficients]
    # both reduced states share the spectrum {c_k^2}
    reduced_purity = float(np.sum(np.asarray(coeffs) ** 4))
    obj = {
        "dims": list(dims),
        "coefficients": coeffs,
        "reduced_purity": [reduced_purity, reduced_purity],
    }
    if args.format == "csv":
        lines = ["index,coefficient"] + [f"{i},{format_float(c)}" for i, c in enumerate(coeffs)]
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit(args, dumps(obj))
    return EXIT_OK


def cmd_witness(args) -> int:
    state = load_state(args.state, args.tol)
    wit = purity_witness(state.density(), tol=args.tol)
    if wit is None:
        obj = {"verdict": "pure", "message": "pure state: no witness exists"}
    else:
        obj = {
            "verdict": "mixed",
            "extension_state": StateFile(wit.extension_dims, "ket", wit.extension_state).to_dict(),
            "obs_a": complex_pairs(wit.obs_a.matrix),
            "obs_b": complex_pairs(wit.obs_b.matrix),
            "weights": list(wit.weights),
            "predicted_mean": wit.predicted_mean,
            "predicted_singles": list(wit.predicted_singles),
        }
    _emit(args, _render(args, obj))
    return EXIT_OK


# parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_tol, default=DEFAULT_TOL,
                        help="validation tolerance in (0, 1e-2] (default 1e-10)")
    common.add_argument("--seed", type=_seed, default=0, help="PRNG seed (default 0)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("-o", "--output", help="write output to this path")

    parser = argparse.ArgumentParser(prog="qcorr", description="Subsystem-correlation toolkit.")
    parser.add_argument("--version", action="version", version=f"qcorr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demo", parents=[common], help="run a built-in demonstration")
    demo.add_argument("name", choices=("singlet", "hardy", "measurement"))
    demo.add_argument("--theta", type=float, default=math.pi / 4)
    demo.add_argument("--theta-prime", type=float, default=None)
    demo.add_argument("--maximize", action="store_true")
    demo.add_argument("--grid", type=int, default=256, help="grid size for --maximize")
    demo.add_argument("--samples", type=int, default=10,
                      help="random densities in the singlet round-trip check")
    demo.add_argument("--alpha", type=_parse_alpha, action="append",
                      help="specimen amplitude (repeat per basis state)")
    demo.add_argument("--phase", type=float, default=0.0,
                      help="relative phase of the default two-state superposition")
    demo.add_argument("--apparatus-dim", type=int, default=None)
    demo.add_argument("--ready", type=int, default=0)
    demo.add_argument("--steps", type=int, default=100, help="time steps in the trace")
    demo.set_defaults(func=cmd_demo)

    rec = sub.add_parser("reconstruct", parents=[common], help="state from a correlation table")
    rec.add_argument("table")
    rec.set_defaults(func=cmd_reconstruct)

    tab = sub.add_parser("table", parents=[common], help="correlation table of a state file")
    tab.add_argument("state")
    tab.set_defaults(func=cmd_table)

    sch = sub.add_parser("schmidt", parents=[common], help="Schmidt coefficients of a ket")
    sch.add_argument("state")
    sch.add_argument("--dims", type=_dims, default=None)
    sch.set_defaults(func=cmd_schmidt)

    wit = sub.add_parser("witness", parents=[common], help="external-correlation witness")
    wit.add_argument("state")
    wit.set_defaults(func=cmd_witness)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, QCorrError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
