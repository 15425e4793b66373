"""Command-line interface: analyze | optimize | certify | simulate | sweep.

Machine-readable JSON goes to stdout (or --output); human-readable progress
and tables go to stderr.  Exit codes: 0 success, 2 unreadable or invalid
input, 3 domain error (wrong arity, no convergence, enumeration guard).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import advantage, circuit, families, gram, process as proc, sweep as sweep_mod
from .errors import InvalidProcessError, QmemoptError

SCHEMA_VERSION = sweep_mod.SCHEMA_VERSION


def _emit(doc: dict, output: str | None) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    text = json.dumps(doc, sort_keys=True, indent=2)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_process(path: str) -> proc.StochasticProcess:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InvalidProcessError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidProcessError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return proc.process_from_dict(data)


def _load_phases(
    path: str | None, process: proc.StochasticProcess
) -> gram.PhaseAssignment:
    if path is None:
        return gram.PhaseAssignment.zero(process)
    with open(path) as fh:
        return gram.PhaseAssignment.from_json_dict(process, json.load(fh))


def _alpha_beta_pairs(args) -> tuple[tuple[float, float], ...]:
    if args.alpha_beta_set:
        values = sorted({float(v) for v in args.alpha_beta_set.split(",")})
    else:
        values = list(advantage.DEFAULT_ALPHA_BETA_VALUES)
    if getattr(args, "alpha_beta_extended", 0):
        values.extend(float(v) for v in np.geomspace(0.125, 8.0, args.alpha_beta_extended))
        values = sorted(set(values))
    return tuple((a, b) for a in values for b in values)


def _word_str(word: tuple[int, ...]) -> str:
    return ",".join(str(x) for x in word)


# -- analyze -------------------------------------------------------------------


def cmd_analyze(args) -> int:
    process = _load_process(args.input)
    report = proc.validate(process)
    if not report.valid:
        for violation in report.violations:
            print(f"invalid process: {violation}", file=sys.stderr)
        return 2
    spectrum = advantage.zero_phase_spectrum(process, args.rank_tol)
    sync = {
        str(L): proc.synchronization_entropy(process, L)
        for L in range(1, args.sync_depth + 1)
    }
    doc = {
        "c_mu_bits": proc.c_mu(process),
        "d_mu_bits": proc.d_mu(process),
        "cq_bits": spectrum.cq_bits,
        "dq_bits": spectrum.dq_bits,
        "gram_eigenvalues": [float(v) for v in spectrum.eigenvalues],
        "sync_entropy_bits": sync,
        "is_markov": process.is_markov,
        "num_states": process.num_states,
        "alphabet_size": process.alphabet_size,
        "process_sha256": proc.process_sha256(process),
    }
    print(
        f"states {process.num_states}  alphabet {process.alphabet_size}\n"
        f"C_mu {doc['c_mu_bits']:.6f}  D_mu {doc['d_mu_bits']:.6f}\n"
        f"C_q  {doc['cq_bits']:.6f}  D_q  {doc['dq_bits']:.6f}",
        file=sys.stderr,
    )
    _emit(doc, args.output)
    return 0


# -- optimize -----------------------------------------------------------------


def cmd_optimize(args) -> int:
    if args.quasi_p_sweep:
        return _optimize_p_sweep(args)
    process = _load_process(args.input)
    proc.require_valid(process)
    if args.pair_scan:
        return _optimize_pair_scan(args, process)
    result = advantage.minimize_cq(process, args.phase_grid, args.refine, args.fp_tol)
    cq_zero = advantage.zero_phase_spectrum(process, args.rank_tol).cq_bits
    doc = result.to_json_dict(process)
    doc["cq_zero_bits"] = cq_zero
    print(
        f"C_q {cq_zero:.6f} -> C_min {result.cq_min_bits:.6f} "
        f"(grid {result.grid_resolution}, {result.refinement_iterations} refinement sweeps)",
        file=sys.stderr,
    )
    _emit(doc, args.output)
    return 0


def _optimize_p_sweep(args) -> int:
    start, stop, count = args.quasi_p_sweep
    if not args.csv:
        print("--quasi-p-sweep requires --csv", file=sys.stderr)
        return 2
    rows = []
    for p in np.linspace(start, stop, int(count)):
        process = families.quasi_cycle(float(p))
        cq_zero = advantage.zero_phase_spectrum(process).cq_bits
        result = advantage.minimize_cq(process, args.phase_grid, args.refine)
        rows.append(
            [
                SCHEMA_VERSION,
                f"{p:.12g}",
                f"{proc.c_mu(process):.12g}",
                f"{cq_zero:.12g}",
                f"{result.cq_min_bits:.12g}",
            ]
        )
        print(f"p={p:.3f} cq={cq_zero:.4f} cq_min={result.cq_min_bits:.4f}", file=sys.stderr)
    with open(args.csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["schema_version", "p", "c_mu_bits", "cq_bits", "cq_min_bits"])
        writer.writerows(rows)
    _emit({"csv": args.csv, "rows": len(rows)}, args.output)
    return 0


def _optimize_pair_scan(args, process: proc.StochasticProcess) -> int:
    if not args.csv:
        print("--pair-scan requires --csv", file=sys.stderr)
        return 2
    try:
        key_a, key_b = (
            tuple(int(v) for v in part.split(",")) for part in args.pair_scan.split(";")
        )
    except ValueError:
        print("--pair-scan expects 'symbol,state;symbol,state'", file=sys.stderr)
        return 2
    angles, grid = advantage.phase_pair_scan(process, key_a, key_b, args.phase_grid)
    with open(args.csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["schema_version", "phi_1", "phi_2", "cq_bits"])
        for i, a in enumerate(angles):
            for j, b in enumerate(angles):
                writer.writerow([SCHEMA_VERSION, f"{a:.12g}", f"{b:.12g}", f"{grid[i, j]:.12g}"])
    _emit(
        {
            "csv": args.csv,
            "phase_a": list(key_a),
            "phase_b": list(key_b),
            "resolution": args.phase_grid,
        },
        args.output,
    )
    return 0


# -- certify ------------------------------------------------------------------


def cmd_certify(args) -> int:
    process = _load_process(args.input)
    proc.require_valid(process)
    certificate = advantage.find_certificate(process, _alpha_beta_pairs(args), args.rank_tol)
    if certificate is None:
        print("no dimensional certificate", file=sys.stderr)
        _emit({"certificate": None}, args.output)
        return 0
    print(
        f"dependent state {certificate.dependent_state}, rank {certificate.achieved_rank}, "
        f"residual {certificate.residual:.2e}",
        file=sys.stderr,
    )
    _emit({"certificate": certificate.to_json_dict(process)}, args.output)
    return 0


# -- simulate -----------------------------------------------------------------


def cmd_simulate(args) -> int:
    process = _load_process(args.input)
    proc.require_valid(process)
    phases = _load_phases(args.phases, process)
    verification = circuit.verify_model(process, phases, args.word_length, args.fp_tol)
    overlaps = gram.fixed_point_overlaps(process, phases, tol=args.fp_tol)
    states = circuit.embed_states(overlaps)
    model = circuit.build_unitary(process, phases, states)
    rng = np.random.default_rng(args.seed)
    trajectories = [
        _word_str(circuit.sample_trajectory(model, args.start_state, args.length, rng))
        for _ in range(args.samples)
    ]
    doc = {
        "verification": verification.to_json_dict(),
        "trajectories": trajectories,
        "start_state": args.start_state,
        "length": args.length,
        "seed": args.seed,
        "process_sha256": proc.process_sha256(process),
    }
    if args.export_unitary:
        with open(args.export_unitary, "w") as fh:
            json.dump(model.to_json_dict(), fh, sort_keys=True)
    print(
        f"unitarity {verification.unitarity_residual:.2e}  step {verification.step_residual:.2e}  "
        f"TV {verification.tv_distance:.2e}  ({'pass' if verification.passed else 'FAIL'})",
        file=sys.stderr,
    )
    _emit(doc, args.output)
    return 0


# -- sweep --------------------------------------------------------------------


def cmd_sweep(args) -> int:
    if args.mode in ("dimensional", "entropic"):
        config = sweep_mod.SweepConfig(
            steps_per_edge=args.steps,
            alpha_beta_pairs=_alpha_beta_pairs(args),
            entropic_samples=args.samples,
            phase_grid=args.phase_grid,
            seed=args.seed,
            workers=args.workers,
            placement=args.placement,
            sampling=args.sampling,
            refine=args.refine,
        )
        if args.mode == "dimensional":
            report = sweep_mod.sweep_dimensional(config, args.csv)
        else:
            report = sweep_mod.sample_entropic(config, args.csv)
        _emit(report.to_json_dict(), args.output)
        return 0
    if args.mode == "region":
        return _sweep_region(args)
    if args.mode == "ambiguity":
        return _sweep_ambiguity(args)
    print(f"unknown sweep mode {args.mode}", file=sys.stderr)
    return 2


def _sweep_region(args) -> int:
    """Entropic/dimensional advantage map over the slippage family's (p, delta) plane."""
    if not args.csv:
        print("--mode region requires --csv", file=sys.stderr)
        return 2
    steps = args.steps
    p_values = np.linspace(0.05, 0.95, steps)
    d_values = np.linspace(0.0, 0.9, steps)
    rows = []
    for p in p_values:
        line_delta = families.slippage_line_delta(float(p))
        for d in d_values:
            physical = p + d <= 1.0 - 1e-9
            if physical:
                process = families.slippage_cycle(float(p), float(d))
                cq_zero = advantage.zero_phase_spectrum(process).cq_bits
                result = advantage.minimize_cq(process, args.phase_grid, args.refine)
                cq_min = result.cq_min_bits
                adv = int(cq_min < cq_zero - sweep_mod.ENTROPIC_ADVANTAGE_MARGIN)
                cq_s, cqm_s = f"{cq_zero:.12g}", f"{cq_min:.12g}"
            else:
                adv, cq_s, cqm_s = 0, "", ""
            rows.append(
                [
                    SCHEMA_VERSION,
                    f"{p:.12g}",
                    f"{d:.12g}",
                    int(physical),
                    cq_s,
                    cqm_s,
                    adv,
                    f"{line_delta:.12g}" if line_delta is not None else "",
                ]
            )
        print(f"region sweep: p={p:.3f} done", file=sys.stderr)
    with open(args.csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "schema_version",
                "p",
                "delta",
                "physical",
                "cq_bits",
                "cq_min_bits",
                "entropic_advantage",
                "line_delta",
            ]
        )
        writer.writerows(rows)
    _emit({"csv": args.csv, "rows": len(rows)}, args.output)
    return 0


def _sweep_ambiguity(args) -> int:
    """Scan contaminated quasi-cycles; emit comparison curves and the first witness."""
    found = advantage.search_ambiguity(phase_grid=args.phase_grid)
    if found is None:
        print("no ambiguous process found in the scan", file=sys.stderr)
        return 3
    process, certificate, report = found
    doc = {
        "process": proc.process_to_dict(process),
        "certificate": certificate.to_json_dict(process),
        "report": report.to_json_dict(),
    }
    if args.csv:
        # hold the witness's contamination fixed, trace the curves over p
        T = process.markov_matrix()
        eps = float(T.min())
        rows = []
        for p in np.linspace(0.30, 0.55, args.steps):
            scan_proc = families.mixed_cycle(float(p), eps)
            cert = advantage.find_certificate(scan_proc)
            rep = advantage.ambiguity_report(
                scan_proc, certificate=cert, phase_grid=args.phase_grid
            )
            rows.append(
                [
                    SCHEMA_VERSION,
                    f"{p:.12g}",
                    f"{eps:.12g}",
                    f"{rep.cq_zero:.12g}",
                    f"{rep.cq_at_dim_cert:.12g}" if rep.cq_at_dim_cert is not None else "",
                    f"{rep.cq_min:.12g}",
                    int(rep.ambiguous),
                ]
            )
            print(f"ambiguity scan: p={p:.3f}", file=sys.stderr)
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["schema_version", "p", "eps", "cq_zero", "cq_cert", "cq_min", "ambiguous"]
            )
            writer.writerows(rows)
        doc["csv"] = args.csv
    _emit(doc, args.output)
    return 0


# -- parser --------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--output", help="write the JSON result here instead of stdout")
    sub.add_argument("--rank-tol", type=float, default=gram.DEFAULT_RANK_TOL)
    sub.add_argument("--fp-tol", type=float, default=gram.DEFAULT_FP_TOL)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmemopt",
        description="Classical and quantum memory costs of stochastic processes, "
        "with phase optimisation of unitary models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="memory metrics and sync-entropy profile")
    p_an.add_argument("--input", required=True)
    p_an.add_argument("--sync-depth", type=int, default=4)
    _add_common(p_an)
    p_an.set_defaults(func=cmd_analyze)

    p_opt = sub.add_parser("optimize", help="minimize the entropic memory over phases")
    p_opt.add_argument("--input")
    p_opt.add_argument("--phase-grid", type=int, default=24)
    p_opt.add_argument("--refine", action=argparse.BooleanOptionalAction, default=True)
    p_opt.add_argument(
        "--quasi-p-sweep",
        nargs=3,
        type=float,
        metavar=("START", "STOP", "COUNT"),
        help="optimize the quasi-cycle family over p and emit curve CSV",
    )
    p_opt.add_argument(
        "--pair-scan",
        help="evaluate a 2-phase grid 'symbol,state;symbol,state' and emit heatmap CSV",
    )
    p_opt.add_argument("--csv", help="CSV path for --quasi-p-sweep / --pair-scan")
    _add_common(p_opt)
    p_opt.set_defaults(func=cmd_optimize)

    p_cert = sub.add_parser("certify", help="search for a dimensional certificate")
    p_cert.add_argument("--input", required=True)
    p_cert.add_argument("--alpha-beta-set", help="comma-separated coefficient magnitudes")
    p_cert.add_argument("--alpha-beta-extended", type=int, default=0)
    _add_common(p_cert)
    p_cert.set_defaults(func=cmd_certify)

    p_sim = sub.add_parser("simulate", help="build the unitary model, verify, and sample")
    p_sim.add_argument("--input", required=True)
    p_sim.add_argument("--phases", help="JSON phase file; defaults to zero phases")
    p_sim.add_argument("-L", "--length", type=int, default=10)
    p_sim.add_argument("--samples", type=int, default=1)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--start-state", type=int, default=0)
    p_sim.add_argument("--word-length", type=int, default=4, help="verification word length")
    p_sim.add_argument("--export-unitary", help="write the unitary matrix JSON here")
    _add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_sw = sub.add_parser("sweep", help="advantage statistics over process families")
    p_sw.add_argument(
        "--mode", required=True, choices=["dimensional", "entropic", "region", "ambiguity"]
    )
    p_sw.add_argument("--steps", type=int, default=20)
    p_sw.add_argument("--samples", type=int, default=2000)
    p_sw.add_argument("--phase-grid", type=int, default=16)
    p_sw.add_argument("--seed", type=int, default=0)
    p_sw.add_argument("--alpha-beta-set", help="comma-separated coefficient magnitudes")
    p_sw.add_argument("--alpha-beta-extended", type=int, default=0)
    p_sw.add_argument(
        "--workers",
        type=int,
        default=int(os.environ.get("QMEMOPT_WORKERS", "1")),
    )
    p_sw.add_argument("--placement", choices=["midpoint", "endpoint"], default="midpoint")
    p_sw.add_argument("--sampling", choices=["simplex", "angles", "sphere"], default="simplex")
    p_sw.add_argument("--refine", action=argparse.BooleanOptionalAction, default=True)
    p_sw.add_argument("--csv", help="per-cell/per-sample CSV path")
    _add_common(p_sw)
    p_sw.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidProcessError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except QmemoptError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
