"""Command-line front end.

Subcommands:
  solve           solve a problem file, write strategy report + bounds CSV
  tables          reproduce the scenario cost tables (both game variants)
  simulate        Monte Carlo check of a saved strategy report
  quantize-solve  bin a sample file onto a grid, solve, certify the value

Exit codes: 0 success, 1 input error, 2 iteration/resource limit.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dnn, solver, strategy
from .quantize import GridQuantizer, OutOfBoxError, certify, quantize, read_samples
from .model import (
    CostVariant,
    FixedMean,
    FullPrior,
    ProblemFormatError,
    SignalingProblem,
    build_problem,
    full_signaling_value,
    load_problem,
    null_signaling_value,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_LIMIT = 2

SCENARIO_FILES = {1: "scenario1.json", 2: "scenario2.json", 3: "scenario3.json"}


def _data_path(name: str) -> Path:
    return Path(__file__).parent / "data" / name


def _round_sig(obj):
    """Round every float in a JSON-ready document to 12 significant digits."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round_sig(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_sig(v) for v in obj]
    return obj


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(_round_sig(doc), indent=1) + "\n")


def _rebuild(problem: SignalingProblem, variant: str | None, mode_name: str | None,
             mu: str | None) -> SignalingProblem:
    """Apply --variant/--mode/--mu overrides on top of a loaded problem."""
    new_variant = variant or problem.variant
    mode = problem.mode
    if mode_name == "full_prior":
        mode = FullPrior()
    elif mode_name == "fixed_mean":
        if mu is not None:
            mode = FixedMean(np.array([float(t) for t in mu.split(",")]))
        else:
            mode = FixedMean(problem.Z @ problem.p_o)  # keep the prior mean
    if new_variant == problem.variant and mode is problem.mode:
        return problem
    return build_problem(problem.pmf, new_variant, mode)


def cmd_solve(args) -> int:
    try:
        problem = load_problem(args.problem)
        problem = _rebuild(problem, args.variant, args.mode, args.mu)
    except (ProblemFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    out_prefix = Path(args.out) if args.out else Path(Path(args.problem).stem)
    exit_code = EXIT_OK

    if args.method in ("polyhedral", "both"):
        sol = solver.solve(problem, tol=args.tol, max_iters=args.max_iters,
                           all_pairs=args.all_pairs, keep_certificates=True,
                           keep_partition=bool(args.dump_partition))
        sol.trace.write_csv(Path(str(out_prefix) + ".bounds.csv"))
        if args.dump_partition and sol.partition is not None:
            sol.partition.dump_json(args.dump_partition)
        sig = strategy.extract_strategy(sol.factor_columns, problem.p_o)
        sig = strategy.merge_duplicate_signals(sig, problem.pmf)
        if sig.signal_count > problem.n:
            print(f"note: strategy uses {sig.signal_count} signals for "
                  f"{problem.n} states (not reduced to k <= n)")
        report = strategy.strategy_report(sig, problem.pmf, problem.variant, sol.value)
        _write_json(Path(str(out_prefix) + ".strategy.json"), report)
        print(f"value={sol.value:.12g} gap={sol.gap:.12g} method=polyhedral")
        if not sol.converged:
            print(f"warning: iteration limit after {sol.iterations} iterations "
                  f"(gap {sol.gap:.3g} > tol {args.tol:.3g})", file=sys.stderr)
            exit_code = EXIT_LIMIT
    if args.method in ("dnn", "both"):
        dsol = dnn.solve_dnn(problem, tol=args.dnn_tol)
        print(f"value={dsol.value:.12g} gap={max(dsol.residuals):.3g} method=dnn")
        if not dsol.converged:
            print("warning: splitting iteration limit; residuals "
                  f"{dsol.residuals}", file=sys.stderr)
            exit_code = EXIT_LIMIT
    return exit_code


def cmd_tables(args) -> int:
    wanted = sorted(int(t) for t in args.scenarios.split(","))
    for s in wanted:
        if s not in SCENARIO_FILES:
            print(f"error: unknown scenario {s}", file=sys.stderr)
            return EXIT_INPUT
    headers = {CostVariant.DECEPTION: "deceptive signaling game",
               CostVariant.PRIVACY: "persuasive privacy game"}
    limited = False
    for variant, title in headers.items():
        rows = {"Null Signaling": [], "Full Signaling": [],
                "Optimal Signaling": [], "SDP-relaxation": []}
        sizes = []
        for s in wanted:
            base = load_problem(_data_path(SCENARIO_FILES[s]))
            problem = build_problem(base.pmf, variant, FullPrior())
            sizes.append(problem.n)
            rows["Null Signaling"].append(null_signaling_value(problem))
            rows["Full Signaling"].append(full_signaling_value(problem))
            tol = args.tol if problem.n <= 4 else max(args.tol, 1e-2)
            sol = solver.solve(problem, tol=tol, max_iters=args.max_iters)
            limited |= not sol.converged
            rows["Optimal Signaling"].append(sol.value)
            dsol = dnn.solve_dnn(problem, tol=args.dnn_tol)
            limited |= not dsol.converged
            rows["SDP-relaxation"].append(dsol.value)
        print(f"Sender's cost, {title} (scenarios {', '.join(map(str, wanted))})")
        label_w = max(len(k) for k in rows)
        print(f"{'Scenario':<{label_w}} " + " ".join(f"{s:>10}" for s in wanted))
        print(f"{'State space':<{label_w}} " + " ".join(f"{n:>10}" for n in sizes))
        for label, vals in rows.items():
            print(f"{label:<{label_w}} " + " ".join(f"{v:>10.4f}" for v in vals))
        print()
    return EXIT_LIMIT if limited else EXIT_OK


def cmd_simulate(args) -> int:
    try:
        problem = load_problem(args.problem)
        problem = _rebuild(problem, args.variant, None, None)
        doc = json.loads(Path(args.strategy).read_text())
        pi = np.asarray(doc["pi"], dtype=np.float64)
        sig = strategy.SignalingStrategy(pi)
    except (ProblemFormatError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    res = strategy.simulate(sig, problem.pmf, args.samples, args.seed,
                            variant=problem.variant)
    report = {
        "objective": res.objective,
        "objective_se": res.objective_se,
        "sender_cost": res.sender_cost,
        "sender_se": res.sender_se,
        "receiver_cost": res.receiver_cost,
        "receiver_se": res.receiver_se,
        "samples": res.samples,
        "seed": res.seed,
    }
    if args.out:
        _write_json(Path(args.out), report)
    print(f"objective={res.objective:.12g} se={res.objective_se:.12g} "
          f"samples={res.samples} seed={res.seed}")
    return EXIT_OK


def _parse_box(text: str, dim: int) -> tuple[np.ndarray, np.ndarray]:
    parts = text.split(",")
    if len(parts) == 1:
        parts = parts * dim
    if len(parts) != dim:
        raise ValueError(f"--box needs {dim} lo:hi entries, got {len(parts)}")
    lo, hi = [], []
    for p in parts:
        a, b = p.split(":")
        lo.append(float(a))
        hi.append(float(b))
    return np.array(lo), np.array(hi)


def _parse_grid(text: str, dim: int) -> np.ndarray:
    parts = text.split(",")
    if len(parts) == 1:
        parts = parts * dim
    if len(parts) != dim:
        raise ValueError(f"--grid needs {dim} entries, got {len(parts)}")
    return np.array([int(p) for p in parts])


def cmd_quantize_solve(args) -> int:
    try:
        samples = read_samples(args.samples)
        grid = GridQuantizer(*_parse_box(args.box, samples.dim),
                             _parse_grid(args.grid, samples.dim))
        variant = args.variant or CostVariant.DECEPTION
        pmf, budget = quantize(samples, grid, variant)
    except (OutOfBoxError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    problem = build_problem(pmf, variant, FullPrior())
    exit_code = EXIT_OK
    if args.method == "polyhedral":
        sol = solver.solve(problem, tol=args.tol, max_iters=args.max_iters)
        value = sol.value
        exit_code = EXIT_OK if sol.converged else EXIT_LIMIT
    else:
        dsol = dnn.solve_dnn(problem, tol=args.dnn_tol)
        value = dsol.value
        exit_code = EXIT_OK if dsol.converged else EXIT_LIMIT
    interval = certify(value, value, budget)
    report = {
        "value": value,
        "epsilon": budget.epsilon,
        "e_norm": budget.e_norm,
        "zq_norm": budget.zq_norm,
        "v_spectral": budget.v_spectral,
        "interval": [interval.lower, interval.upper],
        "states": problem.n,
        "method": args.method,
        "variant": variant,
    }
    if args.out:
        _write_json(Path(args.out), report)
    print(f"value={value:.12g} epsilon={budget.epsilon:.12g} "
          f"interval=[{interval.lower:.12g}, {interval.upper:.12g}] states={problem.n}")
    return exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpsignal",
                                     description="Hierarchical signaling-game solver")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--variant", choices=["deception", "privacy"], default=None)
        p.add_argument("--tol", type=float, default=1e-3)
        p.add_argument("--dnn-tol", type=float, default=1e-7)
        p.add_argument("--max-iters", type=int, default=500)

    p = sub.add_parser("solve", help="solve a problem file")
    p.add_argument("problem")
    common(p)
    p.add_argument("--mode", choices=["full_prior", "fixed_mean"], default=None)
    p.add_argument("--mu", default=None, help="comma-separated fixed mean (with --mode fixed_mean)")
    p.add_argument("--method", choices=["polyhedral", "dnn", "both"], default="both")
    p.add_argument("--all-pairs", action="store_true",
                   help="outer cone over all vertex pairs instead of common-simplex pairs")
    p.add_argument("--out", default=None, help="output prefix for report and trace files")
    p.add_argument("--dump-partition", default=None,
                   help="write the final simplicial partition as JSON (debug)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("tables", help="reproduce the scenario cost tables")
    common(p)
    p.add_argument("--scenarios", default="1,2,3")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("simulate", help="Monte Carlo check of a strategy report")
    p.add_argument("problem")
    p.add_argument("strategy")
    p.add_argument("--variant", choices=["deception", "privacy"], default=None)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("quantize-solve", help="quantize a sample file and solve")
    p.add_argument("samples")
    common(p)
    p.add_argument("--box", required=True, help="lo:hi per dimension, comma separated")
    p.add_argument("--grid", required=True, help="bins per dimension, comma separated")
    p.add_argument("--method", choices=["polyhedral", "dnn"], default="dnn")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_quantize_solve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ProblemFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
