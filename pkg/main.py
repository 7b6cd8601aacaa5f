import argparse
import logging
import sys

logger = logging.getLogger("qp_engine")

SUITE_CHOICES = ("relations", "appendix", "oracle", "triangularity", "topterms", "counts", "generation", "irreps", "all")


def _positive(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return number


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qp-engine", description="Exact computations in the quasi-partition algebra")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads (0 = all cores)")
    parser.add_argument("--cache-dir", default=None, help="Directory for cached structure tables")
    parser.add_argument("--log-level", default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dims", help="P and QP dimensions, by formula and by enumeration")
    p.add_argument("--k", type=_positive, required=True)

    p = sub.add_parser("basis", help="List the diagram basis")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--algebra", choices=["P", "QP"], default="QP")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("mul", help="Multiply two basis diagrams")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--algebra", choices=["P", "QP"], default="QP")
    p.add_argument("--d1", required=True, help="Diagram text like {1,2|1',2'} or @file")
    p.add_argument("--d2", required=True)
    p.add_argument("--loop", choices=["x", "x-1"], default="x", help="Loop weight for P products")
    p.add_argument("--n", type=int, default=None, help="Evaluate coefficients at this n")
    p.add_argument("--verify", action="store_true", help="Check the bracket residual of a QP product")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("expand-bar", help="Expand a bar element in bracket diagrams")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--d", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.add_argument("--dump-matrix", default=None, metavar="PATH", help="With --n, write the bar matrix on W^k in Matrix Market form")

    p = sub.add_parser("bratteli", help="Emit the Bratteli graph")
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--format", choices=["dot", "json"], default="dot")

    p = sub.add_parser("irreps", help="Irreducible module dimensions three ways")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--n", type=int, default=None, help="Also print the barred partitions of n")

    p = sub.add_parser("factor", help="Write a singleton-free diagram as a generator word")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--d", required=True)

    p = sub.add_parser("verify", help="Run verification suites")
    p.add_argument("--suite", choices=SUITE_CHOICES, default="all")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--n", type=int, default=None, help="Oracle dimension (default 2k+1)")
    p.add_argument("--verbose", action="store_true", help="Also list passing entries")

    p = sub.add_parser("table", help="Build and export the structure table as JSON")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--out", default=None, help="Output directory (default: the cache directory)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    from core.settings import apply_overrides, get_settings
    from interfaces.cli import configure_logging, run_command

    try:
        apply_overrides(threads=args.threads, cache_dir=args.cache_dir, log_level=args.log_level)
        configure_logging(get_settings().log_level)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    args.threads = get_settings().threads or None

    try:
        return run_command(args)
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        logger.debug("%s failed", args.command, exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        logger.error("unexpected failure in %s", args.command, exc_info=True)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
