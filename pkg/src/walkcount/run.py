import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .circuit import plan_matrix, qft, qft_circuit, qft_inverse, qft_inverse_circuit
from .config import SCHEMAS, ExperimentConfig, load_experiment_config, render_template
from .counters import BipartiteCounter, Counter, GroverCounter
from .errors import ConfigError, WalkCountError
from .fourier import EIGHT_OVER_PI_SQ, appendix_a_suite, boundary_prob, f_curve, f_of_w, fourier_amplitude_table
from .graph import ColoredGraph, complete_bipartite, edge_color_bipartite, load_graph, save_graph
from .grover import (
    MarkedSet,
    angle_table,
    count_outcome_table,
    grover_angles,
    grover_trajectory,
    marked_probability,
    plane_states,
    search_bound_applies,
    search_iterations,
)
from .metrics import TRIAL_HEADER
from .qstate import inner
from .walk import (
    BipartiteMarking,
    WalkAngles,
    WalkSpace,
    count_distribution,
    eigen_table,
    predicted_count_distribution,
    projection_probabilities,
    reduced_operator,
    walk_angles,
)

logger = logging.getLogger(__name__)

QFT_TOLERANCE = 1e-12
ROTATION_TOLERANCE = 1e-10
ROTATION_STEPS = 10
LIST_ITEM_TYPES: dict[str, type] = {"omegas": float, "curves": int, "P_values": int}


@dataclass
class CommandResult:
    passed: bool
    summary: str


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Header row, '.' decimals and 17 significant digits"""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    logger.debug("wrote %s", path)
    return path


def write_json(path: Path, data: dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def _status(passed: bool) -> str:
    return "PASS" if passed else "FAIL"


def cmd_qft_verify(cfg: ExperimentConfig, out: Path) -> CommandResult:
    if cfg["p_max"] < 1:
        raise ConfigError("qft-verify: p_max must be >= 1")
    rows = []
    for p in range(1, cfg["p_max"] + 1):
        deviation = float(np.max(np.abs(plan_matrix(qft_circuit(p)).entries - qft(p).entries)))
        inverse = float(np.max(np.abs(plan_matrix(qft_inverse_circuit(p)).entries - qft_inverse(p).entries)))
        rows.append((p, deviation, inverse, deviation < QFT_TOLERANCE and inverse < QFT_TOLERANCE))
        logger.info("qft p=%d: deviation %.3e, inverse %.3e", p, deviation, inverse)
    path = write_csv(out / "qft_verify.csv", ("p", "max_abs_dev", "inverse_max_abs_dev", "pass"), rows)
    passed = all(r[3] for r in rows)
    summary = render_template(
        "qft_verify", p_max=cfg["p_max"], path=str(path), status=_status(passed),
        rows=[{"p": p, "deviation": f"{d:.3e}", "inverse_deviation": f"{i:.3e}", "status": _status(ok)}
              for p, d, i, ok in rows])
    return CommandResult(passed, summary)


def cmd_fourier_figures(cfg: ExperimentConfig, out: Path) -> CommandResult:
    P = cfg["P"]
    amplitudes = []
    for omega in cfg["omegas"]:
        path = write_csv(out / f"fourier_P{P}_omega{omega:g}.csv", ("l", "re", "im"),
                         fourier_amplitude_table(P, float(omega)))
        amplitudes.append({"omega": f"{omega:g}", "boundary": f"{boundary_prob(P, float(omega)):.6f}", "path": str(path)})

    passed = True
    curves = []
    for curve_P in cfg["curves"]:
        curve = f_curve(curve_P, cfg["resolution"])
        argmin = curve.argmin
        path = write_csv(out / f"f_curve_P{curve_P}.csv", ("w", "f", "is_min"),
                         ((w, f, w == argmin) for w, f in zip(curve.w, curve.f)))
        if curve_P >= 3:
            passed &= abs(argmin - 0.5) <= cfg["resolution"]
        curves.append({"P": curve_P, "minimum": f"{curve.minimum:.6f}", "argmin": f"{argmin:g}", "path": str(path)})

    summary = render_template("fourier_fig", P=P, amplitudes=amplitudes, curves=curves, status=_status(passed))
    return CommandResult(passed, summary)


def cmd_fw_min(cfg: ExperimentConfig, out: Path) -> CommandResult:
    res = cfg["resolution"]
    rows = []
    for P in cfg["P_values"]:
        curve = f_curve(P, res)
        f_half = f_of_w(P, 0.5)
        ok = curve.minimum >= EIGHT_OVER_PI_SQ - 1e-12 and (P <= 2 or abs(curve.argmin - 0.5) <= res)
        rows.append((P, curve.argmin, curve.minimum, f_half, EIGHT_OVER_PI_SQ, ok))
    path = write_csv(out / "fw_min.csv", ("P", "argmin", "min_f", "f_half", "bound", "pass"), rows)
    passed = all(r[-1] for r in rows)
    summary = render_template(
        "fw_min", resolution=res, bound=f"{EIGHT_OVER_PI_SQ:.6f}", path=str(path), status=_status(passed),
        rows=[{"P": P, "argmin": f"{a:g}", "minimum": f"{m:.6f}", "f_half": f"{h:.6f}", "status": _status(ok)}
              for P, a, m, h, _, ok in rows])
    return CommandResult(passed, summary)


def cmd_appendix_a(cfg: ExperimentConfig, out: Path) -> CommandResult:
    if cfg["P_min"] < 1 or cfg["P_max"] < cfg["P_min"]:
        raise ConfigError("appendix-a: need 1 <= P_min <= P_max")
    report = appendix_a_suite(list(range(cfg["P_min"], cfg["P_max"] + 1)), cfg["resolution"])
    header = ("P", "check", "x", "lhs", "rhs", "pass")
    path = write_csv(out / "appendix_a.csv", header, report.csv_rows())
    write_csv(out / "appendix_a_violations.csv", header,
              ((r.P, r.check, r.x, r.lhs, r.rhs, r.passed) for r in report.violations))
    summary = render_template(
        "appendix_a", P_min=cfg["P_min"], P_max=cfg["P_max"], resolution=cfg["resolution"],
        checks=len(report.rows), violations=len(report.violations), path=str(path),
        failures=[{"P": r.P, "check": r.check, "x": f"{r.x:g}", "lhs": r.lhs, "rhs": r.rhs}
                  for r in report.violations[:10]],
        status=_status(report.passed))
    return CommandResult(report.passed, summary)


def cmd_grover(cfg: ExperimentConfig, out: Path) -> CommandResult:
    rows = []
    worst_rotation = 0.0
    n4_success = float("nan")
    for n in range(1, cfg["n_max"] + 1):
        N = 2 ** n
        for k in range(1, N):
            m = MarkedSet.first(N, k)
            t = search_iterations(N, k)
            theta = grover_angles(N, k).theta
            x0, x1 = plane_states(m)
            states = grover_trajectory(m, max(t, ROTATION_STEPS))
            rotation = max(
                max(abs(inner(x0, s).real - math.cos((2 * j + 1) * theta)),
                    abs(inner(x1, s).real - math.sin((2 * j + 1) * theta)))
                for j, s in enumerate(states[:ROTATION_STEPS + 1]))
            worst_rotation = max(worst_rotation, rotation)
            success = marked_probability(m, states[t])
            applies = search_bound_applies(N, k)
            ok = rotation <= ROTATION_TOLERANCE and (not applies or success >= 1 - k / N - 1e-12)
            if (N, k) == (4, 1):
                n4_success = success
            rows.append((N, k, t, success, 1 - k / N, applies, rotation, ok))
    n4_ok = cfg["n_max"] < 2 or abs(n4_success - 1.0) <= 1e-12
    path = write_csv(out / "grover_search.csv",
                     ("N", "k", "t", "success_probability", "bound", "bound_applies", "rotation_dev", "pass"), rows)
    angle_path = write_csv(out / f"grover_angles_N{cfg['angle_N']}.csv",
                           ("k", "theta", "two_theta", "delta_theta"), angle_table(cfg["angle_N"]))
    passed = all(r[-1] for r in rows) and n4_ok
    covered = sum(1 for r in rows if r[5])
    summary = render_template(
        "grover", N_max=2 ** cfg["n_max"], pairs=len(rows), rotation_deviation=f"{worst_rotation:.3e}",
        covered=covered, violations=sum(1 for r in rows if r[5] and not r[-1]),
        n4_success=f"{n4_success:.12f}", angle_N=cfg["angle_N"], angle_path=str(angle_path),
        path=str(path), status=_status(passed))
    return CommandResult(passed, summary)


def _run_counter(counter: Counter, cfg: ExperimentConfig, out: Path, name: str,
                 db: str | None, extra: dict[str, Any]) -> CommandResult:
    metrics = counter.run(cfg["trials"], cfg["seed"], commit_to=db)
    path = write_csv(out / f"{name}_trials.csv", TRIAL_HEADER, metrics.rows)
    write_json(out / f"{name}_summary.json", metrics.to_dict() | extra)
    summary = render_template(
        "count", algorithm=counter.algorithm,
        params=[{"key": k, "value": v} for k, v in metrics.params.items()],
        trials=metrics.trials, successes=metrics.successes,
        success_frequency=f"{metrics.success_frequency:.4f}",
        required_probability=f"{metrics.required_probability:.4f}", threshold=f"{metrics.threshold:.4f}",
        k_mean=f"{metrics.k_mean:.4f}", k_std=f"{metrics.k_std:.4f}", exact_branches=metrics.exact_branches,
        mean_queries=f"{metrics.mean_queries:.2f}", path=str(path), status=_status(metrics.passed))
    return CommandResult(metrics.passed, summary)


def cmd_count(cfg: ExperimentConfig, out: Path, db: str | None = None) -> CommandResult:
    marked = MarkedSet.first(cfg["N"], cfg["k"])
    outcomes = count_outcome_table(marked, cfg["p"])
    write_csv(out / "count_outcomes.csv", ("outcome", "probability", "theta_prime", "k_est", "within_bound"),
              ((o.outcome, o.probability, o.theta_prime, o.k_est, o.within_bound) for o in outcomes))
    within = sum(o.probability for o in outcomes if o.within_bound)
    return _run_counter(GroverCounter(marked, cfg["p"]), cfg, out, "count", db,
                        {"exact_within_bound_probability": within})


def _walk_graph(path: str | None, n: int) -> ColoredGraph:
    """The edge-colored K_{n,n} read from `path`, or the round-robin one"""
    if path is None:
        return edge_color_bipartite(complete_bipartite(n, n))
    try:
        g = load_graph(path)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Could not read graph {path}: {e}") from e
    if not isinstance(g, ColoredGraph):
        raise ConfigError(f"Graph {path} carries no edge coloring")
    if g.graph.edges != complete_bipartite(n, n).edges or g.graph.parts != (n, n):
        raise ConfigError(f"Graph {path} is not K_{{{n},{n}}} with parts ({n}, {n})")
    return g


def cmd_walk_count(cfg: ExperimentConfig, out: Path, db: str | None = None) -> CommandResult:
    n, k1 = cfg["n1"], cfg["k1"]
    colored = _walk_graph(cfg["graph"], n)
    out.mkdir(parents=True, exist_ok=True)
    save_graph(colored, out / "walk_count_graph.json")
    ws = WalkSpace(colored)
    marking = BipartiteMarking.first(n, k1)
    extra: dict[str, Any] = {}
    if marking.nondegenerate:
        simulated = count_distribution(ws, marking, cfg["p"])
        predicted = predicted_count_distribution(WalkAngles.of(marking), cfg["p"])
        extra["predicted_distribution_deviation"] = float(np.max(np.abs(simulated - predicted)))
        write_csv(out / "walk_count_distribution.csv", ("outcome", "simulated", "predicted"),
                  ((m, s, q) for m, (s, q) in enumerate(zip(simulated, predicted))))
    return _run_counter(BipartiteCounter(ws, marking, cfg["p"], cfg["t"]), cfg, out, "walk_count", db, extra)


def cmd_spectrum(cfg: ExperimentConfig, out: Path) -> CommandResult:
    angles = walk_angles(cfg["n1"], cfg["k1"], cfg["n2"], cfg["k2"])
    system = reduced_operator(angles)
    probabilities = {label: prob for label, _, prob in projection_probabilities(angles)}
    rows = [(label, angle, re, im, probabilities[label]) for label, angle, re, im in eigen_table(angles)]
    residual = max(float(np.linalg.norm(system.u_prime @ pair.vector - pair.eigenvalue * pair.vector))
                   for pair in system.eigenpairs)
    total = math.fsum(probabilities.values())
    g = complete_bipartite(cfg["n1"], cfg["n2"])
    out.mkdir(parents=True, exist_ok=True)
    save_graph(edge_color_bipartite(g) if cfg["n1"] == cfg["n2"] else g, out / "spectrum_graph.json")
    passed = abs(total - 1.0) <= 1e-12 and residual < 1e-10
    path = write_csv(out / "spectrum.csv", ("label", "angle", "re", "im", "probability"), rows)
    summary = render_template(
        "spectrum", n1=cfg["n1"], n2=cfg["n2"], k1=cfg["k1"], k2=cfg["k2"],
        theta1=f"{angles.theta1:.6f}", theta2=f"{angles.theta2:.6f}",
        Sigma=f"{angles.Sigma:.6f}", Delta=f"{angles.Delta:.6f}",
        rows=[{"label": r[0], "angle": f"{r[1]:.6f}", "probability": f"{r[4]:.6f}"} for r in rows],
        total=f"{total:.15f}", residual=f"{residual:.3e}", path=str(path), status=_status(passed))
    return CommandResult(passed, summary)


COMMANDS: dict[str, Callable[..., CommandResult]] = {
    "qft-verify": cmd_qft_verify,
    "fourier-fig": cmd_fourier_figures,
    "fw-min": cmd_fw_min,
    "appendix-a": cmd_appendix_a,
    "grover": cmd_grover,
    "count": cmd_count,
    "walk-count": cmd_walk_count,
    "spectrum": cmd_spectrum,
}
PERSISTED = {"count", "walk-count"}


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="unsigned 64-bit seed of the random streams")
    common.add_argument("--out", type=str, help="directory receiving the CSV/JSON artifacts")
    common.add_argument("--config", type=str, help="JSON file with the command's parameters")
    common.add_argument("--trials", type=int, help="number of Monte Carlo trials")
    common.add_argument("--db", type=str, help="sqlite database receiving Monte Carlo summaries")
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="walkcount")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, schema in SCHEMAS.items():
        cmd = sub.add_parser(name, parents=[common])
        for key, (kind, _) in schema.items():
            if kind is list:
                cmd.add_argument(f"--{key}", type=LIST_ITEM_TYPES[key], nargs="+")
            else:
                cmd.add_argument(f"--{key}", type=kind)
    return parser.parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(asctime)s - %(levelname)s - %(message)s')

    overrides = {key: getattr(args, key, None) for key in SCHEMAS[args.command]}
    overrides |= {"seed": args.seed, "out": args.out, "trials": args.trials}
    try:
        cfg = load_experiment_config(args.command, args.config, overrides)
        out = Path(cfg["out"])
        command = COMMANDS[args.command]
        if args.command in PERSISTED:
            result = command(cfg, out, db=args.db)
        else:
            result = command(cfg, out)
    except WalkCountError as e:
        logger.error("%s: %s", args.command, e)
        return 2

    print(result.summary)
    if not result.passed:
        logger.warning("%s: embedded assertions failed", args.command)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
