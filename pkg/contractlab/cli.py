"""
Command-line harness for the contract toolkit.

Solves instance files, generates gadget instances, runs the property suites, estimates
successful-query rates and approximates clique sizes. JSON and CSV results go to
stdout or to --out (a local path or gs://bucket/blob); logs go to stderr.

Usage:
    # Solve an instance file
    python -m contractlab.cli solve instance.json

    # Generate a hidden-set instance with 27 agents
    python -m contractlab.cli generate hidden-set --n 27 --seed 7 --out hidden.json

    # Run one property suite, CSV to a bucket
    python -m contractlab.cli verify clique-best-response --out gs://my-bucket/runs/clique.csv

    # Monte Carlo estimate at n = 512
    python -m contractlab.cli estimate-success --n 512 --trials 100000

    # Approximate the clique number of a graph file
    python -m contractlab.cli clique approx --graph tri.json --beta 1/2

Exit codes: 0 success, 1 property violation, 2 input error, 3 cap exceeded.
"""
import argparse
import logging
import sys
from fractions import Fraction
from typing import List, Optional

from .config.settings import settings
from .core.exceptions import CapExceededError, ContractLabError, InstanceParseError, PropertyViolationError
from .core.logging import setup_logging
from .core.numeric import parse_number
from .gadgets.clique import clique_xos_instance
from .gadgets.hidden_set import cube_root, hidden_set_instance
from .gadgets.kprover import Formula3CNF5, KProverParams, kprover_coverage
from .gadgets.pseudosymmetric import pseudosymmetric_instance
from .gadgets.submodular import multiaction_submodular_gadget, multiagent_submodular_gadget, planted_cover_coverage
from .models.itemset import ItemSet
from .models.multiagent import MultiAgentInstance
from .services.clique_service import CliqueService, clique_report_document, degraded_oracle, exact_oracle
from .services.estimation_service import EstimationService
from .services.instance_service import InstanceService
from .services.solver_service import SolverService
from .services.verification_service import SuiteSizes, VerificationService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_CAP = 3

GADGET_KINDS = ("hidden-set", "clique-xos", "planted-cover", "anchored-cover", "kprover", "pseudo-symmetric")


def _number(text: str):
    try:
        return parse_number(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _index_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"Expected comma-separated indices, got {text!r}") from e


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Parse command-line arguments.

    Returns:
        argparse.Namespace: Parsed arguments
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="Seed for every random draw (defaults to CONTRACTLAB_SEED or 0)")
    common.add_argument("--trials", type=int, default=None, help="Monte Carlo trial count")
    common.add_argument("--cap-n", type=int, default=None,
                        help="Override the exhaustive enumeration cap for this run")
    common.add_argument("--out", type=str, default=None,
                        help="Output path, local or gs://bucket/blob (defaults to stdout)")
    common.add_argument("--log-level", type=str, default=None, help="DEBUG, INFO, WARNING or ERROR")

    parser = argparse.ArgumentParser(
        prog="contractlab",
        description="Linear contract solvers, reduction gadgets and property suites",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", parents=[common], help="Solve an instance file")
    solve.add_argument("instance", help="Instance JSON path (local or gs://)")
    solve.add_argument("--model", choices=("multi-agent", "multi-action"), default=None,
                       help="Expected model; the file's model is used when omitted")
    solve.add_argument("--size-cap", type=int, default=None, help="Multi-agent: only sets with |S| <= cap")
    solve.add_argument("--ptas-epsilon", type=_number, default=None,
                       help="Multi-agent pseudo-symmetric instances: run the PTAS with this epsilon")

    generate = commands.add_parser("generate", parents=[common], help="Generate a gadget instance")
    generate.add_argument("kind", choices=GADGET_KINDS)
    generate.add_argument("--n", type=int, default=None, help="Agent count (hidden-set, pseudo-symmetric)")
    generate.add_argument("--good", type=_index_list, default=None, help="Hidden set G as 1-based indices")
    generate.add_argument("--graph", type=str, default=None, help="Graph JSON path (clique-xos)")
    generate.add_argument("--delta", type=int, default=1, help="Added clique size (clique-xos)")
    generate.add_argument("--beta", type=_number, default=None,
                          help="Gadget beta (clique-xos default 1/2, anchored-cover default 1/20)")
    generate.add_argument("--normalize", action="store_true", help="Normalize the clique gadget by f(V')")
    generate.add_argument("--k", type=int, default=2, help="Cover size k, or prover count for kprover")
    generate.add_argument("--copies", type=int, default=1, help="Decoy rounds per block (planted covers)")
    generate.add_argument("--formula", type=str, default=None, help="Formula JSON path (kprover)")
    generate.add_argument("--n-vars", type=int, default=3,
                          help="Variables of a random planted formula when --formula is omitted")
    generate.add_argument("--ell", type=int, default=2, help="Question split length (kprover)")
    generate.add_argument("--symmetric", action="store_true", help="Pseudo-symmetric without a bonus")

    verify = commands.add_parser("verify", parents=[common], help="Run property suites, CSV report")
    verify.add_argument("suite", nargs="?", default="all", help="Suite name or 'all'")
    verify.add_argument("--reduced", action="store_true", help="Use small batteries")

    estimate = commands.add_parser("estimate-success", parents=[common],
                                   help="Monte Carlo successful-query rate on hidden-set instances")
    estimate.add_argument("--n", type=int, required=True, help="Agent count, a perfect cube")
    estimate.add_argument("--set-size", type=int, default=None, help="|S|, defaults to floor(m^1.5)")

    clique = commands.add_parser("clique", parents=[common], help="Clique classification and approximation")
    clique.add_argument("action", choices=("approx", "distinguish"))
    clique.add_argument("--graph", type=str, required=True, help="Graph JSON path")
    clique.add_argument("--delta", type=int, default=1, help="Threshold for distinguish")
    clique.add_argument("--beta", type=_number, default=Fraction(1, 2), help="Oracle ratio in (0, 1)")
    clique.add_argument("--oracle", choices=("exact", "degraded"), default="exact")
    clique.add_argument("--normalize", action="store_true", help="Normalize gadget values by f(V')")

    return parser.parse_args(argv)


def _emit(instance_service: InstanceService, out: Optional[str], text: str) -> None:
    if out:
        instance_service.write_text(out, text)
    else:
        sys.stdout.write(text)


def run_solve(args: argparse.Namespace, instance_service: InstanceService) -> None:
    document = instance_service.read_instance_document(args.instance)
    if args.model is not None and args.model != document.model:
        raise InstanceParseError(f"{args.instance} holds a {document.model} instance, not {args.model}")
    solution = SolverService(instance_service).solve_document(
        document, size_cap=args.size_cap, ptas_epsilon=args.ptas_epsilon
    )
    _emit(instance_service, args.out, instance_service.dump_json(solution))


def build_gadget(args: argparse.Namespace, instance_service: InstanceService):
    """The requested gadget instance and its metadata."""
    seed = settings.default_seed if args.seed is None else args.seed
    metadata = {"kind": args.kind, "seed": seed}

    if args.kind == "hidden-set":
        if args.n is None:
            raise InstanceParseError("hidden-set needs --n")
        good = None if args.good is None else ItemSet.from_one_based(args.good, args.n)
        metadata["m"] = cube_root(args.n)
        return hidden_set_instance(args.n, good=good, seed=seed), metadata

    if args.kind == "clique-xos":
        if args.graph is None:
            raise InstanceParseError("clique-xos needs --graph")
        beta = Fraction(1, 2) if args.beta is None else args.beta
        instance, gadget = clique_xos_instance(instance_service.read_graph(args.graph), args.delta, beta,
                                               normalize=args.normalize)
        metadata.update(delta=args.delta, epsilon=str(gadget.epsilon), M=str(gadget.M))
        return instance, metadata

    if args.kind in ("planted-cover", "anchored-cover"):
        cover = planted_cover_coverage(args.k, args.copies)
        metadata.update(k=args.k, planted=cover.planted.one_based())
        if args.kind == "planted-cover":
            return multiagent_submodular_gadget(args.k, cover.function), metadata
        beta = Fraction(1, 20) if args.beta is None else args.beta
        metadata["beta"] = str(beta)
        return multiaction_submodular_gadget(args.k, cover.function, beta), metadata

    if args.kind == "kprover":
        if args.formula is not None:
            formula = instance_service.read_formula(args.formula)
        else:
            formula, assignment = Formula3CNF5.random_planted(args.n_vars, seed=seed)
            metadata["assignment"] = [int(bit) for bit in assignment]
        cov = kprover_coverage(formula, KProverParams.with_greedy_codebook(args.k, args.ell))
        cost = Fraction(1, 2 * cov.k_prime ** 2)
        metadata.update(k_prime=cov.k_prime, universe_size=cov.function.universe_size)
        return MultiAgentInstance(costs=tuple(cost for _ in range(cov.function.n)), f=cov.function), metadata

    if args.n is None:
        raise InstanceParseError("pseudo-symmetric needs --n")
    return pseudosymmetric_instance(args.n, seed=seed, symmetric=args.symmetric), metadata


def run_generate(args: argparse.Namespace, instance_service: InstanceService) -> None:
    instance, metadata = build_gadget(args, instance_service)
    document = instance_service.instance_to_document(instance, metadata)
    logger.info(f"Generated {args.kind} {document.model} instance with {instance.n} items")
    _emit(instance_service, args.out, instance_service.dump_json(document))


def run_verify(args: argparse.Namespace, instance_service: InstanceService) -> None:
    sizes = SuiteSizes.reduced() if args.reduced else SuiteSizes()
    if args.trials is not None:
        sizes = sizes.model_copy(update={"mc_trials": args.trials})
    service = VerificationService(seed=args.seed, sizes=sizes, instance_service=instance_service)
    frame = service.run(args.suite)
    if args.out:
        service.write_csv(frame, args.out)
    else:
        sys.stdout.write(service.to_csv(frame))
    failed = service.failures(frame)
    if len(failed):
        raise PropertyViolationError(
            f"{len(failed)} of {len(frame)} checks failed: " + ", ".join(failed["check"].head(5))
        )
    logger.info(f"All {len(frame)} checks passed")


def run_estimate(args: argparse.Namespace, instance_service: InstanceService) -> None:
    trials = 100_000 if args.trials is None else args.trials
    report = EstimationService().estimate_success(args.n, set_size=args.set_size, trials=trials, seed=args.seed)
    _emit(instance_service, args.out, instance_service.dump_json(report))


def run_clique(args: argparse.Namespace, instance_service: InstanceService) -> None:
    graph = instance_service.read_graph(args.graph)
    oracle = exact_oracle() if args.oracle == "exact" else degraded_oracle(args.beta)
    service = CliqueService(oracle, args.beta, normalize=args.normalize)
    if args.action == "approx":
        document = clique_report_document(service.approximate(graph), oracle, args.beta)
    else:
        result = service.run(graph, args.delta)
        document = {"delta": result.delta, "verdict": result.verdict.value,
                    "alpha": str(result.alpha), "M": str(result.M), "oracle": oracle.name}
    _emit(instance_service, args.out, instance_service.dump_json(document))


COMMANDS = {
    "solve": run_solve,
    "generate": run_generate,
    "verify": run_verify,
    "estimate-success": run_estimate,
    "clique": run_clique,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand.

    Returns:
        int: process exit code
    """
    args = parse_arguments(argv)
    setup_logging(args.log_level)
    previous_cap = settings.enumeration_cap_n
    if args.cap_n is not None:
        settings.enumeration_cap_n = args.cap_n
    try:
        COMMANDS[args.command](args, InstanceService())
        return EXIT_OK
    except PropertyViolationError as e:
        logger.error(str(e))
        return EXIT_VIOLATION
    except CapExceededError as e:
        logger.error(f"Cap exceeded: {str(e)}")
        return EXIT_CAP
    except ContractLabError as e:
        logger.error(f"{type(e).__name__}: {str(e)}")
        return EXIT_INPUT
    finally:
        settings.enumeration_cap_n = previous_cap


if __name__ == "__main__":
    sys.exit(main())
