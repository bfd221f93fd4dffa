"""Command-line entry point.

    choiceprinciples metagame  --mode exact --N 10 --format csv
    choiceprinciples derive    --p 0.01 --mode exact --N 10 -o derived.json
    choiceprinciples stability --input derived.json
    choiceprinciples dynamics  --eps 0.001 --init random:200 --seed 1
    choiceprinciples threshold --grid-step 0.001

Exit status: 0 on success, 2 on usage errors, 1 on runtime errors.
"""
from __future__ import annotations

import argparse
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .choice import ALL_TYPES
from .dynamics import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    KERNEL_SCHEMES,
    mutation_kernel,
    run_batch,
    run_dynamics,
    sample_initial_states,
    write_trajectory_csv,
)
from .games import make_rng
from .metagame import (
    MetaGame,
    correlated_pref_metagame,
    find_regret_threshold,
    full_metagame,
    uncorrelated_pref_metagame,
)
from .stability import DEFAULT_ETA, stability_reports

logger = logging.getLogger("choiceprinciples")


class UsageError(Exception):
    pass


def _add_source_args(parser: argparse.ArgumentParser, allow_input: bool = True):
    group = parser.add_argument_group("meta-game source")
    if allow_input:
        group.add_argument("--input", "-i", type=Path,
                           help="read the 8-type meta-game from a JSON/CSV file instead of building it")
    group.add_argument("--mode", choices=("exact", "mc"), default="exact")
    group.add_argument("--N", type=int, default=10, help="payoffs range over {0..N} (default 10)")
    group.add_argument("--samples", type=int, default=50000, help="games sampled in mc mode")
    group.add_argument("--seed", type=int, default=0)
    group.add_argument("--workers", type=int, default=1)


def _add_output_args(parser: argparse.ArgumentParser):
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--output", "-o", type=Path, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="choiceprinciples",
        description="Meta-games between subjective-preference x epistemic player types.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metagame", help="build the full 8-type meta-game")
    _add_source_args(p, allow_input=False)
    _add_output_args(p)

    p = sub.add_parser("stability", help="ESS report for every type of a meta-game")
    _add_source_args(p)
    p.add_argument("--types", help="comma-separated labels to restrict the meta-game to")
    p.add_argument("--eta", type=float, help=f"tie tolerance (default {DEFAULT_ETA}; required for mc input)")
    _add_output_args(p)

    p = sub.add_parser("derive", help="preference-type meta-game for variable epistemic types")
    _add_source_args(p)
    mix = p.add_mutually_exclusive_group(required=True)
    mix.add_argument("--p", type=float, help="uncorrelated: P(full-simplex belief) per player")
    mix.add_argument("--q", type=float, help="correlated: P(both players hold full-simplex beliefs)")
    _add_output_args(p)

    p = sub.add_parser("dynamics", help="replicator(-mutator) dynamics on a meta-game")
    _add_source_args(p)
    p.add_argument("--eps", type=float, default=0.001, help="mutation rate (0 = pure replicator)")
    p.add_argument("--kernel", choices=KERNEL_SCHEMES, default="per-target")
    p.add_argument("--init", default="random:200",
                   help="random:COUNT, vertex:INDEX, or comma-separated frequencies")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument("--record-every", type=int, default=1,
                   help="trajectory thinning for a single initial state")
    _add_output_args(p)

    p = sub.add_parser("threshold", help="smallest p from which Regret is the unique ESS")
    _add_source_args(p)
    p.add_argument("--grid-step", type=float, default=0.001)
    p.add_argument("--eta", type=float)
    _add_output_args(p)
    return parser


def _load_metagame(args) -> MetaGame:
    if getattr(args, "input", None) is not None:
        return MetaGame.read(args.input)
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    logger.info("building %s meta-game, N=%d", args.mode, args.N)
    return full_metagame(args.N, args.mode, args.samples, args.seed, args.workers)


def _eta(args, m: MetaGame) -> float:
    if args.eta is not None:
        return args.eta
    if m.info.get("mode") == "mc" or m.info.get("source", {}).get("mode") == "mc":
        raise UsageError("sampled meta-games need an explicit --eta")
    return DEFAULT_ETA


def _write(args, text: str):
    if args.output is None:
        sys.stdout.write(text)
    else:
        args.output.write_text(text)


def _emit_metagame(args, m: MetaGame):
    _write(args, m.to_csv() if args.format == "csv" else m.to_json() + "\n")


def cmd_metagame(args):
    _emit_metagame(args, _load_metagame(args))


def cmd_derive(args):
    full = _load_metagame(args)
    if args.p is not None:
        derived = uncorrelated_pref_metagame(full, args.p)
    else:
        derived = correlated_pref_metagame(full, args.q)
    _emit_metagame(args, derived)


def cmd_stability(args):
    m = _load_metagame(args)
    if args.types:
        m = m.submatrix([label.strip() for label in args.types.split(",")])
    eta = _eta(args, m)
    reports = stability_reports(m, eta)
    if args.format == "csv":
        buf = io.StringIO()
        buf.write("type,is_ess,is_neutrally_stable,violating_invaders\n")
        for r in reports:
            invaders = ";".join(f"{m.labels[j]}:{cond}" for j, cond in r.violating_invaders)
            buf.write(f"{m.labels[r.index]},{str(r.is_ess).lower()},"
                      f"{str(r.is_neutrally_stable).lower()},{invaders}\n")
        _write(args, buf.getvalue())
        return
    out = {
        "labels": list(m.labels),
        "eta": eta,
        "ess": [m.labels[r.index] for r in reports if r.is_ess],
        "reports": [r.to_dict(m.labels) for r in reports],
    }
    _write(args, json.dumps(out, indent=2) + "\n")


def _initial_states(spec: str, dim: int, seed: int) -> np.ndarray:
    kind, _, value = spec.partition(":")
    try:
        if kind == "random" and value:
            return sample_initial_states(int(value), dim, make_rng(seed))
        if kind == "vertex" and value:
            i = int(value)
            if not 0 <= i < dim:
                raise UsageError(f"vertex index {i} out of range for {dim} types")
            x = np.zeros((1, dim))
            x[0, i] = 1.0
            return x
        x = np.array([[float(v) for v in spec.split(",")]])
    except ValueError:
        raise UsageError(f"cannot parse --init {spec!r}") from None
    if x.shape[1] != dim:
        raise ValueError(f"--init has {x.shape[1]} frequencies, meta-game has {dim} types")
    if np.any(x < 0) or x.sum() <= 0:
        raise ValueError("--init frequencies must be non-negative with a positive sum")
    return x


def cmd_dynamics(args):
    m = _load_metagame(args)
    kernel = None
    if args.eps > 0:
        if set(m.labels) != {t.label for t in ALL_TYPES}:
            raise ValueError("mutation needs a meta-game over the 8 player types")
        kernel = mutation_kernel(m.labels, args.eps, args.kernel)
    x0 = _initial_states(args.init, len(m), args.seed)
    if args.format == "csv" and len(x0) == 1:
        traj = run_dynamics(m, x0[0], kernel, args.tol, args.max_iter, args.record_every)
        buf = io.StringIO()
        write_trajectory_csv(buf, [traj], m.labels)
        _write(args, buf.getvalue())
        return
    result = run_batch(m, x0, kernel, args.tol, args.max_iter, args.workers)
    result.info = {"eps": args.eps, "kernel": args.kernel if kernel else None,
                   "tol": args.tol, "max_iter": args.max_iter, "init": args.init,
                   "seed": args.seed, "workers": args.workers, "source": m.info}
    if args.format == "csv":
        buf = io.StringIO()
        buf.write(",".join(["run", "iteration", "converged", *m.labels]) + "\n")
        for r, (x, n, ok) in enumerate(zip(result.final, result.iterations, result.converged)):
            buf.write(",".join([str(r), str(n), str(bool(ok)).lower(),
                                *(f"{v:.6f}" for v in x)]) + "\n")
        _write(args, buf.getvalue())
    else:
        _write(args, result.to_json() + "\n")


def cmd_threshold(args):
    full = _load_metagame(args)
    eta = _eta(args, full)
    threshold = find_regret_threshold(full, args.grid_step, eta)
    never = threshold > 1.0
    if args.format == "csv":
        _write(args, f"grid_step,threshold,never\n{args.grid_step},{threshold:.6f},{str(never).lower()}\n")
    else:
        out = {"grid_step": args.grid_step, "threshold": threshold, "never": never,
               "eta": eta, "source": full.info}
        _write(args, json.dumps(out, indent=2) + "\n")


COMMANDS = {
    "metagame": cmd_metagame,
    "derive": cmd_derive,
    "stability": cmd_stability,
    "dynamics": cmd_dynamics,
    "threshold": cmd_threshold,
}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OverflowError, OSError) as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run_cli())
