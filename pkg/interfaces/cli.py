"""Command handlers for ``main.py``.

Results go to stdout through a rich Console, diagnostics to stderr through
logging. Every handler returns an exit code.
"""
import json
import logging
import sys
from pathlib import Path

from rich.console import Console
from rich.table import Table

from core.diagrams import (
    DiagramError,
    diagram_from_json,
    diagram_text,
    diagram_to_json,
    enumerate_basis_P,
    enumerate_basis_QP,
    parse_diagram,
)
from core.settings import get_settings

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Enumeration beyond this k is skipped by `dims`; the formulas still run.
DIMS_ENUMERATION_K = 5


def make_console() -> Console:
    # Fixed width keeps table output identical across terminals.
    return Console(highlight=False, soft_wrap=True, width=120)


def configure_logging(level: str) -> None:
    logging.basicConfig(format=LOG_FORMAT, level=level.upper(), stream=sys.stderr)
    logging.getLogger().setLevel(level.upper())


def read_diagram(value: str, k: int):
    """Diagram flag value: brace text, or ``@path`` to a text or JSON file."""
    if value.startswith("@"):
        path = Path(value[1:])
        try:
            body = path.read_text(encoding="utf-8").strip()
        except OSError as exc:
            raise DiagramError(f"cannot read {path}: {exc}") from exc
        if body.startswith("{") and '"blocks"' in body:
            d = diagram_from_json(body)
            if d.k != k:
                raise DiagramError(f"{path} holds a k={d.k} diagram, expected k={k}")
            return d
        value = body
    return parse_diagram(value, k)


# ---------- Commands ----------


def cmd_dims(args, console: Console) -> int:
    from core.rep_theory import bell, no_singleton_count_alternating, no_singleton_count_recurrence

    k = args.k
    table = Table(title=f"Dimensions at k={k}")
    for column in ("algebra", "formula", "recurrence", "enumeration"):
        table.add_column(column, justify="right")
    enumerate_ok = k <= DIMS_ENUMERATION_K
    p_enum = str(len(enumerate_basis_P(k))) if k <= 4 else "-"
    q_enum = str(len(enumerate_basis_QP(k))) if enumerate_ok else "-"
    table.add_row(f"P_{k}", str(bell(2 * k)), "-", p_enum)
    table.add_row(
        f"QP_{k}",
        str(no_singleton_count_alternating(2 * k)),
        str(no_singleton_count_recurrence(2 * k)),
        q_enum,
    )
    console.print(table)
    return 0


def cmd_basis(args, console: Console) -> int:
    diagrams = enumerate_basis_P(args.k) if args.algebra == "P" else enumerate_basis_QP(args.k)
    if args.json:
        console.out(json.dumps([diagram_to_json(d) for d in diagrams], indent=1))
    else:
        for d in diagrams:
            console.out(diagram_text(d))
    return 0


def _emit_lincomb(result, args, console: Console) -> None:
    if args.json:
        console.out(json.dumps(result.to_json(), indent=1))
    elif args.n is not None:
        values = result.specialize(args.n)
        console.out(" + ".join(f"{c} * {diagram_text(d)}" for d, c in values.items()) or "0")
    else:
        console.out(result.text())


def cmd_mul(args, console: Console) -> int:
    from core.partition_algebra import LOOP_X, LOOP_X_MINUS_ONE, BasisTag, LinComb, p_multiply
    from core.quasi_partition import qp_multiply

    d1 = read_diagram(args.d1, args.k)
    d2 = read_diagram(args.d2, args.k)
    if args.algebra == "QP":
        result = qp_multiply(d1, d2, verify=args.verify)
    else:
        loop = LOOP_X_MINUS_ONE if args.loop == "x-1" else LOOP_X
        result = p_multiply(LinComb.of(d1, BasisTag.P_DIAGRAM), LinComb.of(d2, BasisTag.P_DIAGRAM), loop)
    _emit_lincomb(result, args, console)
    return 0


def cmd_expand_bar(args, console: Console) -> int:
    from core.quasi_partition import bar_expand

    d = read_diagram(args.d, args.k)
    if args.dump_matrix and args.n is None:
        raise ValueError("--dump-matrix needs --n")
    _emit_lincomb(bar_expand(d), args, console)
    if args.dump_matrix:
        dump_bar_matrix(d, args.n, Path(args.dump_matrix))
    return 0


def dump_bar_matrix(d, n, path: Path) -> None:
    from core.tensor_oracle import bar_matrix

    matrix = bar_matrix(d, n)
    try:
        path.write_text(matrix.to_matrix_market(comment=f"bar matrix of {diagram_text(d)} at n={n}"), encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"cannot write {path}: {exc}") from exc
    logger.info("wrote %dx%d bar matrix to %s", matrix.rows, matrix.cols, path)


def cmd_bratteli(args, console: Console) -> int:
    from core.rep_theory import bratteli_graph

    graph = bratteli_graph(args.levels)
    if args.format == "dot":
        console.out(graph.to_dot(), end="")
    else:
        console.out(graph.to_json_text())
    return 0


def cmd_irreps(args, console: Console) -> int:
    from core.rep_theory import barred, dimensions, irrep_dim_formula, kron_tableaux, level_nodes

    k = args.k
    dims = dimensions(k)
    table = Table(title=f"Irreducible QP_{k} modules")
    columns = ["λ", "formula", "paths", "tableaux", "agree"]
    if args.n is not None:
        columns.insert(1, f"barred (n={args.n})")
    for column in columns:
        table.add_column(column)
    all_agree = True
    for lam in level_nodes(k):
        formula = irrep_dim_formula(lam, k)
        paths = dims.get(lam, 0)
        tableaux = len(kron_tableaux(lam, k))
        agree = formula == paths == tableaux
        all_agree = all_agree and agree
        row = [str(lam), str(formula), str(paths), str(tableaux), "yes" if agree else "NO"]
        if args.n is not None:
            row.insert(1, str(barred(lam, args.n)))
        table.add_row(*row)
    console.print(table)
    return 0 if all_agree else 1


def cmd_factor(args, console: Console) -> int:
    from core.factorization import evaluate_word, factor, has_suffix_property

    d = read_diagram(args.d, args.k)
    word = factor(d)
    console.out(f"word: {word or '(empty)'}")
    console.out(f"length: {len(word)}")
    console.out(f"evaluates to: {diagram_text(evaluate_word(word).diagram)}")
    console.out(f"suffix property: {'yes' if has_suffix_property(word) else 'no'}")
    return 0


def cmd_verify(args, console: Console) -> int:
    from core.verification import run_suite

    reports = run_suite(args.suite, args.k, n=args.n, threads=args.threads)
    summary = Table(title=f"Verification at k={args.k}")
    for column in ("suite", "entries", "failures", "status"):
        summary.add_column(column)
    failed = False
    for report in reports:
        failures = report.failures()
        failed = failed or bool(failures)
        summary.add_row(report.suite, str(len(report.entries)), str(len(failures)), "ok" if not failures else "FAIL")
    console.print(summary)
    for report in reports:
        for entry in report.failures():
            console.out(f"FAIL [{report.suite}] {entry.name}: {entry.detail}")
        if args.verbose:
            for entry in report.entries:
                if entry.passed:
                    console.out(f"ok [{report.suite}] {entry.name}: {entry.detail}")
    return 1 if failed else 0


def cmd_table(args, console: Console) -> int:
    from core.quasi_partition import qp_structure_table
    from core.structure_cache import export_table_json

    table = qp_structure_table(args.k, threads=args.threads)
    out_dir = Path(args.out) if args.out else get_settings().cache_path
    path = export_table_json(table, out_dir)
    problems = table.problems()
    console.out(f"{len(table)} products written to {path}")
    for line in problems:
        console.out(f"support problem: {line}")
    return 1 if problems else 0


COMMANDS = {
    "dims": cmd_dims,
    "basis": cmd_basis,
    "mul": cmd_mul,
    "expand-bar": cmd_expand_bar,
    "bratteli": cmd_bratteli,
    "irreps": cmd_irreps,
    "factor": cmd_factor,
    "verify": cmd_verify,
    "table": cmd_table,
}


def run_command(args) -> int:
    return COMMANDS[args.command](args, make_console())
