# probfem/cli.py
"""Command-line interface.

Examples:
  probfem run --preset pullout --method bfem --out results/bfem
  probfem run --config experiment.json --paper-scale --seed 3
  probfem compare results/exact results/fem results/bfem
  probfem mesh --problem three_point --h 0.2 --out mesh.txt
"""
import argparse
import logging
import sys
from typing import List, Optional

from probfem import __version__
from probfem.config import Config, available_presets
from probfem.errors import ProbFemError
from probfem.experiments.compare import compare_directories, format_metrics_markdown
from probfem.experiments.runner import ExperimentRunner, generate_mesh
from probfem.mesh.io import write_mesh
from probfem.models import MethodKind, ProblemKind

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="probfem",
        description="Bayesian inverse problems with finite element discretization error models",
        epilog=__doc__.split("\n\n", 1)[1],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"probfem {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Sample one posterior and write its result bundle")
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", help="Experiment JSON file")
    source.add_argument("--preset", choices=available_presets(), help="Built-in experiment preset")
    run.add_argument("--method", choices=[m.value for m in MethodKind], help="Override the likelihood model")
    run.add_argument("--paper-scale", action="store_true",
                     help="Merge the paper-scale preset of the problem (long running)")
    run.add_argument("--seed", type=int, help="Chain seed")
    run.add_argument("--out", help="Output directory of the result bundle")

    compare = commands.add_parser("compare", help="Compare result bundles sampled on the same data")
    compare.add_argument("bundles", nargs="+", help="Result bundle directories")
    compare.add_argument("--out", help="Directory receiving metrics.json and metrics.md")

    mesh = commands.add_parser("mesh", help="Write the computational mesh of a problem")
    mesh.add_argument("--problem", choices=[p.value for p in ProblemKind], default=ProblemKind.THREE_POINT.value)
    mesh.add_argument("--h", type=float, default=0.2, help="Element size (default: 0.2)")
    mesh.add_argument("--out", required=True, help="Plain-text mesh file")
    return parser


def _run(args: argparse.Namespace) -> int:
    config = Config.load(args.config) if args.config else Config.load_preset(args.preset)
    config = config.with_overrides(paper_scale=args.paper_scale, seed=args.seed,
                                   output_dir=args.out, method=args.method)
    result = ExperimentRunner(config).run()
    print(f"{result.problem.value}/{result.method.value} h={result.h:g}: "
          f"acceptance {result.acceptance_rate:.3f}, {result.runtime_seconds:.1f}s")
    for name, stats in result.parameters.items():
        print(f"  {name:>8} mean {stats.mean:.5g}  std {stats.std:.3g}  "
              f"95% [{stats.q025:.5g}, {stats.q975:.5g}]")
    print(f"Results written to {result.output_dir}")
    return 0


def _compare(args: argparse.Namespace) -> int:
    metrics = compare_directories(args.bundles, output=args.out)
    print(format_metrics_markdown(metrics))
    return 0


def _mesh(args: argparse.Namespace) -> int:
    mesh = generate_mesh(ProblemKind(args.problem), args.h)
    path = write_mesh(mesh, args.out)
    print(f"{mesh.n_nodes} nodes, {mesh.n_elements} elements written to {path}")
    return 0


COMMANDS = {"run": _run, "compare": _compare, "mesh": _mesh}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (ProbFemError, ValueError, FileNotFoundError) as e:
        print(f"probfem {args.command}: error: {e}", file=sys.stderr)
        return 1
