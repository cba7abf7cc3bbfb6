"""Command-line entry point: ``matsec {run,exact,check,gen}``.

Exit codes: 0 success, 2 invalid input, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from .errors import InvariantViolation, SizeLimitExceeded, ValidationError
from .exact import TOL, axiom_check, exact_free_order, exact_laminar
from .harness import ALGORITHMS, GENERATORS, ExperimentConfig, emit_report, generate_instance, run_trials
from .instance import load_instance, save_instance
from .laminar import PHASE2_ORDERS
from .suite import reference_suite

log = logging.getLogger("matsec")

EXIT_OK, EXIT_INVALID, EXIT_VIOLATION = 0, 2, 3

BOUNDS = {
    "free-order": 4.0,
    "laminar-simple": 27 * math.e / 2,
    "laminar-improved": 3 * math.sqrt(3) * math.e,
}


def _gen_params(args) -> dict:
    keys = ("n", "k", "parts", "capacity", "vertices", "depth", "branching", "root_capacity", "cluster", "b")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _instance_from_args(args):
    if args.instance:
        return load_instance(args.instance)
    if getattr(args, "kind", None):
        return generate_instance(args.kind, _gen_params(args), args.gen_seed)
    raise ValidationError("give --instance PATH or --kind KIND")


def _emit(results, args):
    text = emit_report(results, args.format, args.output)
    if args.output is None:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    inst = _instance_from_args(args)
    config = ExperimentConfig(
        instance=inst,
        algorithm=args.algorithm,
        trials=args.trials,
        seed=args.seed,
        q=args.q,
        phase2_order=args.phase2_order,
        output=args.output,
        format=args.format,
        workers=args.workers,
    )
    stats = run_trials(config, config.resolve_instance())
    log.info("%s on %s: mean %.6g, ratio %.4g (bound %.4g), %.2fs", stats.algorithm, stats.instance,
             stats.mean_weight, stats.ratio, BOUNDS[stats.algorithm], stats.wall_time)
    _emit(stats, args)
    return EXIT_OK


def cmd_exact(args) -> int:
    inst = _instance_from_args(args)
    if args.algorithm == "free-order":
        report = exact_free_order(inst, workers=args.workers)
    else:
        if args.q is not None and args.algorithm != "laminar-improved":
            raise ValidationError("q only applies to laminar-improved")
        if not inst.is_laminar:
            raise ValidationError(f"{args.algorithm} needs a laminar instance")
        report = exact_laminar(inst, args.algorithm.split("-")[1], args.q, workers=args.workers)
    _emit(report, args)
    return EXIT_VIOLATION if report.violations else EXIT_OK


def check_instance(inst, lines: list[str]) -> bool:
    """Axioms, the free-order selection and symmetry checks and, for laminar instances, partition feasibility and constants."""
    ok = True

    def record(name, passed, detail=""):
        nonlocal ok
        ok &= passed
        lines.append(f"{'PASS' if passed else 'FAIL'} {inst.name} {name}{': ' + detail if detail else ''}")

    if inst.n <= 12:
        ax = axiom_check(inst.matroid)
        record("axioms", ax.passed, "" if ax.passed else f"{ax.axiom} fails at {ax.witness}")
    fo = exact_free_order(inst)
    worst = min((fo.selection_prob[f] for f in inst.opt), default=1.0)
    record("free-order selection checks", not fo.violations, "; ".join(fo.violations[:3]))
    record("free-order per-element >= 1/4", worst >= 0.25 - TOL, f"min {worst:.6f}")
    if inst.is_laminar:
        simple = exact_laminar(inst, "simple")
        improved = exact_laminar(inst, "improved")
        record("laminar feasibility", not simple.violations and not improved.violations,
               "; ".join((simple.violations + improved.violations)[:3]))
        sol = min(simple.solitary_prob.values(), default=1.0)
        record("solitary >= 2/27", sol >= 2 / 27 - TOL, f"min {sol:.6f}")
        z = min(improved.z_expectation.values(), default=1.0)
        record("E[Z] >= 1/(3 sqrt 3)", z >= 1 / (3 * math.sqrt(3)) - TOL, f"min {z:.6f}")
    return ok


def cmd_check(args) -> int:
    if args.instance:
        instances = [load_instance(args.instance)]
    else:
        instances = reference_suite()
    too_big = [i.name for i in instances if i.n > 14]
    if too_big:
        raise SizeLimitExceeded(f"check enumerates all samples; instances too large: {too_big}")
    lines: list[str] = []
    ok = all([check_instance(inst, lines) for inst in instances])
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_gen(args) -> int:
    inst = generate_instance(args.kind, _gen_params(args), args.seed)
    if args.output:
        save_instance(inst, args.output)
    else:
        sys.stdout.write(json.dumps(inst.to_dict(), indent=2) + "\n")
    return EXIT_OK


def _add_generator_args(p, seed_flag):
    p.add_argument("--kind", choices=GENERATORS)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, help="uniform rank")
    p.add_argument("--parts", type=int)
    p.add_argument("--capacity", type=int)
    p.add_argument("--vertices", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--branching", type=int)
    p.add_argument("--root-capacity", dest="root_capacity", type=int)
    p.add_argument("--cluster", type=int)
    p.add_argument("--b", type=int, help="capacity of the clustered set")
    p.add_argument(seed_flag, dest="gen_seed" if seed_flag != "--seed" else "seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matsec", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Monte Carlo trials", parents=[common])
    run.add_argument("--instance")
    run.add_argument("--algorithm", choices=ALGORITHMS, default="free-order")
    run.add_argument("--trials", type=int, default=10_000)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--q", type=float)
    run.add_argument("--phase2-order", dest="phase2_order", choices=("schedule",) + PHASE2_ORDERS)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--output")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    _add_generator_args(run, "--gen-seed")
    run.set_defaults(func=cmd_run)

    exact = sub.add_parser("exact", help="exact expectations by enumeration", parents=[common])
    exact.add_argument("--instance")
    exact.add_argument("--algorithm", choices=ALGORITHMS, default="free-order")
    exact.add_argument("--q", type=float)
    exact.add_argument("--workers", type=int, default=1)
    exact.add_argument("--output")
    exact.add_argument("--format", choices=("csv", "json"), default="json")
    _add_generator_args(exact, "--gen-seed")
    exact.set_defaults(func=cmd_exact)

    check = sub.add_parser("check", help="axiom, selection and partition checks (default: built-in suite)", parents=[common])
    check.add_argument("--instance")
    check.set_defaults(func=cmd_check)

    gen = sub.add_parser("gen", help="write a generated instance file", parents=[common])
    _add_generator_args(gen, "--seed")
    gen.add_argument("--output")
    gen.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "gen" and args.kind is None:
        parser.error("gen needs --kind")
    try:
        return args.func(args)
    except (ValidationError, SizeLimitExceeded, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
