"""
cable-concordance command-line interface.

Every subcommand validates its inputs before computing. Exit codes: 0 for a
successful computation or an asserted certificate, 1 for a sound refusal
(Unknown verdict or failed certificate), 2 for input errors.
"""

import json
from functools import wraps
from pathlib import Path
from typing import Annotated, Optional

import typer

from app.celery.tasks import coprimality_cell, robust_cell, run_cells
from app.services.certificates import (
    cable_family,
    filtration_certify,
    independence_report,
    kauffman_suite,
    theorem_a_family,
)
from app.services.facts import FactBook, load_facts
from app.services.knot_expr import KnotExpr, eval_invariants, from_seifert, invariant_report
from app.services.knot_expr import parse_knot_expr
from app.services.legendrian import (
    builtin_front,
    front_invariants,
    iterate_satellite,
    parse_front,
    tau_bounds,
    tau_lower_bound,
)
from app.services.primality import catalan_solutions, is_irreducible, strongly_coprime
from app.services.primality import strongly_prime
from app.services.rho_ledger import DEFAULT_COMPANION_J, operator_by_name
from app.services.seifert import parse_seifert
from app.services.signature_fn import profile_table
from app.utils.constants import EXIT_INPUT_ERROR, EXIT_OK, EXIT_REFUSED
from app.utils.errors import BudgetExceededError, ConcordanceError
from app.utils.global_logging import get_logger, set_level
from app.utils.helpers import (
    render_certificate,
    render_legendrian,
    render_model,
    render_report,
    render_tsv,
)
from app.utils.parsers import parse_laurent, parse_range
from app.utils.types import (
    Certificate,
    CoprimalityStatus,
    LegInvariants,
    StrongPrimalityStatus,
)

logger = get_logger(__name__)

app = typer.Typer(
    name="cable-concordance",
    help="Exact invariants and certificates for satellite and cable concordance.",
    no_args_is_help=True,
    add_completion=False,
)

FactsOption = Annotated[
    Optional[Path],
    typer.Option("--facts", help="Facts file; the shipped published facts when omitted"),
]
NoFactsOption = Annotated[
    bool, typer.Option("--no-facts", help="Assume nothing: use an empty fact book")
]
JsonOption = Annotated[bool, typer.Option("--json", help="Print the JSON model instead of text")]
JobsOption = Annotated[
    int, typer.Option("--jobs", min=1, help="Dispatch independent cells as a Celery group")
]
SeifertOption = Annotated[
    Optional[Path], typer.Option("--seifert", help="Seifert matrix file instead of an expression")
]


def handle_errors(command):
    """Turn toolkit errors into a stderr message and the matching exit code."""

    @wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except BudgetExceededError as exc:
            typer.echo(f"refused: {exc}", err=True)
            raise typer.Exit(EXIT_REFUSED)
        except ConcordanceError as exc:
            typer.echo(f"error: {exc}", err=True)
            raise typer.Exit(EXIT_INPUT_ERROR)

    return wrapper


def _fact_book(path: Optional[Path], no_facts: bool) -> FactBook:
    if no_facts:
        return FactBook.empty()
    return load_facts(path)


def _knot(expression: Optional[str], seifert: Optional[Path]) -> KnotExpr:
    if (expression is None) == (seifert is None):
        raise typer.BadParameter("give either an expression or --seifert FILE")
    if seifert is not None:
        try:
            text = seifert.read_text(encoding="utf-8")
        except OSError as exc:
            raise typer.BadParameter(f"cannot read {seifert}: {exc.strerror}")
        return from_seifert(seifert.stem, parse_seifert(text))
    return parse_knot_expr(expression)


def _emit_certificate(cert: Certificate, as_json: bool) -> int:
    if as_json:
        typer.echo(json.dumps(cert.model_dump(mode="json"), indent=2))
    else:
        typer.echo(render_certificate(cert))
    return EXIT_OK if cert.asserted else EXIT_REFUSED


@app.callback()
def main(
    log_level: Annotated[
        Optional[str], typer.Option("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    ] = None,
):
    if log_level is not None:
        try:
            set_level(log_level)
        except ValueError as exc:
            raise typer.BadParameter(str(exc), param_hint="--log-level")


@app.command()
@handle_errors
def invariants(
    expression: Annotated[Optional[str], typer.Argument(help="Knot expression")] = None,
    seifert: SeifertOption = None,
    facts: FactsOption = None,
    no_facts: NoFactsOption = False,
    as_json: JsonOption = False,
):
    """Alexander polynomial, Arf, signature profile, rho0 and tau bounds."""
    knot = _knot(expression, seifert)
    report = invariant_report(knot, _fact_book(facts, no_facts))
    if as_json:
        typer.echo(report.model_dump_json(indent=2))
    else:
        typer.echo(render_report(report))


@app.command()
@handle_errors
def prime(polynomial: Annotated[str, typer.Argument(help="Laurent polynomial in t")]):
    """Irreducibility over Q[t, t^-1]."""
    typer.echo(render_model(is_irreducible(parse_laurent(polynomial))))


@app.command("strongly-prime")
@handle_errors
def strongly_prime_command(
    polynomial: Annotated[str, typer.Argument(help="Laurent polynomial in t")],
    search_bound: Annotated[Optional[int], typer.Option("--search-bound", min=1)] = None,
):
    """Irreducibility of f(t^k) for every nonzero k."""
    verdict = strongly_prime(parse_laurent(polynomial), search_bound)
    typer.echo(render_model(verdict))
    if verdict.status == StrongPrimalityStatus.UNKNOWN:
        raise typer.Exit(EXIT_REFUSED)


@app.command("strongly-coprime")
@handle_errors
def strongly_coprime_command(
    f: Annotated[str, typer.Argument(help="First polynomial")],
    g: Annotated[str, typer.Argument(help="Second polynomial")],
):
    """Coprimality of f(t^k) and g(t^l) for every nonzero k, l."""
    verdict = strongly_coprime(parse_laurent(f), parse_laurent(g))
    typer.echo(render_model(verdict))
    if verdict.status == CoprimalityStatus.UNKNOWN:
        raise typer.Exit(EXIT_REFUSED)


@app.command()
@handle_errors
def catalan(
    x_max: Annotated[int, typer.Option("--x-max", min=2)] = 1000,
    y_max: Annotated[int, typer.Option("--y-max", min=2)] = 1000,
    a_max: Annotated[int, typer.Option("--a-max", min=2)] = 20,
    b_max: Annotated[int, typer.Option("--b-max", min=2)] = 20,
):
    """Solutions of x^a - y^b = 1 inside the bounds."""
    solutions = catalan_solutions(x_max, y_max, a_max, b_max)
    for x, a, y, b in solutions:
        typer.echo(f"{x}^{a} - {y}^{b} = 1")
    typer.echo(f"{len(solutions)} solution(s)")


@app.command()
@handle_errors
def legendrian(
    front_file: Annotated[Optional[Path], typer.Argument(help="Front word file")] = None,
    builtin: Annotated[Optional[str], typer.Option("--builtin", help="Named front")] = None,
    j: Annotated[Optional[int], typer.Option("--j", help="twist-front parameter")] = None,
    k: Annotated[Optional[int], typer.Option("--k", help="q-front parameter")] = None,
    seam: Annotated[int, typer.Option("--seam", min=0, help="Seam strands of a file front")] = 0,
    companion_tb: Annotated[Optional[int], typer.Option("--companion-tb")] = None,
    companion_rot: Annotated[int, typer.Option("--companion-rot")] = 0,
    iterate: Annotated[int, typer.Option("--iterate", min=0)] = 0,
    genus: Annotated[Optional[int], typer.Option("--genus", min=0, help="Seifert genus bound")] = None,
):
    """tb, rot and tau bounds of a front or an iterated satellite."""
    if (front_file is None) == (builtin is None):
        raise typer.BadParameter("give either a front file or --builtin NAME")
    if builtin is not None:
        front = builtin_front(builtin, j if j is not None else k)
    else:
        try:
            text = front_file.read_text(encoding="utf-8")
        except OSError as exc:
            raise typer.BadParameter(f"cannot read {front_file}: {exc.strerror}")
        front = parse_front(text, seam)
    inv = front_invariants(front)
    if iterate:
        if companion_tb is None:
            raise typer.BadParameter("--iterate needs --companion-tb")
        companion = LegInvariants(tb=companion_tb, rot=companion_rot)
        inv = iterate_satellite(front, companion, iterate)
    tau = tau_bounds(inv, genus) if genus is not None else None
    typer.echo(render_legendrian(inv, tau_lower_bound(inv), tau))


@app.command()
@handle_errors
def robust(
    op: Annotated[str, typer.Option("--op", help="Q or R")] = "R",
    k: Annotated[str, typer.Option("--k", help="k values, e.g. 3 or 1..5")] = "1",
    p: Annotated[str, typer.Option("--p", help="cable parameters, e.g. 1..5")] = "1",
    companion_j: Annotated[str, typer.Option("--J", help="Companion knot of R")] = DEFAULT_COMPANION_J,
    facts: FactsOption = None,
    no_facts: NoFactsOption = False,
    jobs: JobsOption = 1,
    as_json: JsonOption = False,
):
    """Robustness certificates over a (k, p) grid."""
    k_values, p_values = parse_range(k), parse_range(p)
    for value in k_values:
        operator_by_name(op, value, companion_j)
    if min(p_values) < 1:
        raise typer.BadParameter("cable parameters must be positive", param_hint="--p")
    # fail fast on an unreadable facts file
    _fact_book(facts, no_facts)
    facts_path = str(facts) if facts is not None else None
    cells = [(op, kv, pv, companion_j, facts_path, not no_facts) for kv in k_values for pv in p_values]
    code = EXIT_OK
    results = run_cells(robust_cell, cells, jobs)
    if as_json:
        typer.echo(json.dumps(results, indent=2))
    for cell in results:
        cert = Certificate.model_validate(cell["certificate"])
        if not as_json:
            typer.echo(f"== {cell['op']} k={cell['k']} p={cell['p']} ==")
            typer.echo(render_certificate(cert))
        if not cert.asserted:
            code = EXIT_REFUSED
    raise typer.Exit(code)


@app.command()
@handle_errors
def independence(
    family: Annotated[str, typer.Option("--family", help="thmA or cable")] = "thmA",
    op: Annotated[str, typer.Option("--op", help="Operator of a cable family")] = "R",
    k: Annotated[int, typer.Option("--k", min=1)] = 1,
    n: Annotated[int, typer.Option("--n", min=1, help="Iteration depth")] = 1,
    p: Annotated[str, typer.Option("--p", help="cable parameters")] = "1..3",
    m: Annotated[str, typer.Option("--m", help="companions twist(2m)")] = "1",
    companion_j: Annotated[str, typer.Option("--J")] = DEFAULT_COMPANION_J,
    relation_search: Annotated[bool, typer.Option("--relation-search/--no-relation-search")] = True,
    facts: FactsOption = None,
    no_facts: NoFactsOption = False,
    jobs: JobsOption = 1,
    as_json: JsonOption = False,
):
    """Linear independence of a family modulo F_n.5 + B_{n+1}."""
    p_values, m_values = parse_range(p), parse_range(m)
    book = _fact_book(facts, no_facts)
    match family:
        case "thmA":
            built = theorem_a_family(k, n, p_values, m_values, companion_j)
            sequences, companions = built.sequences, built.companions
        case "cable":
            if n != 1:
                raise typer.BadParameter("cable families have depth 1", param_hint="--n")
            sequences = cable_family(operator_by_name(op, k, companion_j), p_values)
            companions = theorem_a_family(k, 1, [1], m_values, companion_j).companions
        case _:
            raise typer.BadParameter(f"unknown family {family!r}", param_hint="--family")
    if family == "thmA" and not as_json:
        pairs = [(k, n, a, b) for a in p_values for b in p_values if a < b]
        typer.echo("coprimality matrix:")
        for cell in run_cells(coprimality_cell, pairs, jobs):
            verdict = cell["verdict"]
            detail = f", resultant {verdict['resultant']}" if verdict.get("resultant") else ""
            typer.echo(f"  p={cell['p']} vs p={cell['q']}: {verdict['status']}{detail}")
    cert = independence_report(sequences, companions, book, relation_search)
    raise typer.Exit(_emit_certificate(cert, as_json))


@app.command()
@handle_errors
def filtration(
    expression: Annotated[str, typer.Argument(help="Knot expression")],
    facts: FactsOption = None,
    no_facts: NoFactsOption = False,
    as_json: JsonOption = False,
):
    """Certified levels in the solvable, positive, negative and bipolar filtrations."""
    cert = filtration_certify(parse_knot_expr(expression), _fact_book(facts, no_facts))
    raise typer.Exit(_emit_certificate(cert, as_json))


@app.command()
@handle_errors
def kauffman(
    k: Annotated[int, typer.Option("--k", min=1)] = 1,
    n: Annotated[int, typer.Option("--n", min=1)] = 1,
    m: Annotated[int, typer.Option("--m", min=1)] = 1,
    facts: FactsOption = None,
    no_facts: NoFactsOption = False,
    as_json: JsonOption = False,
):
    """Derivative-curve checks on genus-one slice surfaces."""
    cert = kauffman_suite(_fact_book(facts, no_facts), k, n, m)
    raise typer.Exit(_emit_certificate(cert, as_json))


@app.command("profile-dump")
@handle_errors
def profile_dump(
    expression: Annotated[Optional[str], typer.Argument(help="Knot expression")] = None,
    seifert: SeifertOption = None,
    digits: Annotated[int, typer.Option("--digits", min=1, max=50)] = 8,
):
    """Signature profile as TSV rows of (arc start, arc end, level), angles in units of pi."""
    profile = eval_invariants(_knot(expression, seifert)).profile
    typer.echo(render_tsv(profile_table(profile, digits), ("start", "end", "level")))


if __name__ == "__main__":
    app()
