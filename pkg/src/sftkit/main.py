import logging
from pathlib import Path
from typing import List, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from sftkit import __version__
from sftkit.config import config
from sftkit.exceptions import ComputationError, InputValidationError
from sftkit.models.project import CommandParams, CommandReport
from sftkit.services.command_service import command_service
from sftkit.services.project_service import project_service
from sftkit.services.selftest_service import selftest_service
from sftkit.utils.logging_setup import configure_logging
from sftkit.utils.rationals import parse_rational

# Create CLI app
app = typer.Typer(
    name="sftkit",
    help="Exact combinatorics of genus-zero SFT: level structures, blow-ups, gradings and contact homology",
    add_completion=False,
)

console = Console()
error_console = Console(stderr=True)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_REFUSED = 2
EXIT_INTERNAL = 3

InputOption = typer.Option(None, "--input", "-i", help="Project file (JSON, schema version 1)")
TreeOption = typer.Option(None, "--tree", "-t", help="Name of the tree to use")
FormatOption = typer.Option(None, "--format", help="Output format: json or table")
DotOption = typer.Option(None, "--dot", help="Write a DOT rendering to this file")


def _split(value: Optional[str]) -> List[str]:
    if not value:
        return []
    return [part.strip() for part in value.split(",") if part.strip()]


def _emit(report: CommandReport, output_format: Optional[str], dot: Optional[Path]) -> None:
    output_format = (output_format or config.output.format).lower()
    if output_format == "table":
        table = Table(title=report.command)
        for column in report.columns:
            table.add_column(column)
        for row in report.rows:
            table.add_row(*row)
        console.print(table)
    else:
        typer.echo(project_service.dump(report.payload))
    if dot is not None:
        if report.dot is None:
            error_console.print(f"[yellow]{report.command} has no DOT rendering[/yellow]")
        else:
            dot.write_text(report.dot + "\n", encoding="utf-8")
            logger.info(f"wrote DOT to {dot}")


def _fail(error: Exception, code: int) -> int:
    error_console.print(f"[bold red]Error:[/bold red] {error}")
    for line in getattr(error, "diagnostics", []):
        error_console.print(f"  {line}")
    return code


def _execute(
    command: str,
    input_path: Optional[Path],
    output_format: Optional[str],
    dot: Optional[Path],
    **params,
) -> None:
    """Load, run and report one command, mapping failures to exit codes."""
    code = EXIT_OK
    try:
        project = project_service.load_input(input_path) if input_path else None
        report = command_service.run_command(project, command, CommandParams(**params))
    except (InputValidationError, ValidationError) as e:
        code = _fail(e, EXIT_INVALID_INPUT)
    except ComputationError as e:
        code = _fail(e, EXIT_REFUSED)
    except Exception as e:
        logger.error(f"Internal error running {command}: {e}", exc_info=True)
        code = _fail(e, EXIT_INTERNAL)
    if code != EXIT_OK:
        raise typer.Exit(code)
    _emit(report, output_format, dot)


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log at DEBUG level"),
):
    """Configure logging once for every command."""
    configure_logging(config.logging, level_override="DEBUG" if verbose else None)


@app.command()
def version():
    """Print the version."""
    typer.echo(__version__)


@app.command()
def levels(
    input_path: Optional[Path] = InputOption,
    tree: Optional[str] = TreeOption,
    output_format: Optional[str] = FormatOption,
):
    """Pre-level and all maximal level functions of a tree (cobordism trees included)."""
    _execute("levels", input_path, output_format, None, tree=tree)


@app.command()
def refine(
    input_path: Optional[Path] = InputOption,
    tree: Optional[str] = TreeOption,
    side: int = typer.Option(5, "--side", help="Side of the integer box for the coverage check"),
    output_format: Optional[str] = FormatOption,
):
    """Leveled monoids of a tree with the smoothness certificate."""
    _execute("refine", input_path, output_format, None, tree=tree, side=side)


@app.command()
def poset(
    input_path: Optional[Path] = InputOption,
    tree: Optional[str] = TreeOption,
    output_format: Optional[str] = FormatOption,
    dot: Optional[Path] = DotOption,
):
    """Face poset of the refinement, labeled by leveled trees."""
    _execute("poset", input_path, output_format, dot, tree=tree)


@app.command()
def degrees(
    input_path: Optional[Path] = InputOption,
    tree: Optional[str] = TreeOption,
    p: Optional[int] = typer.Option(None, "--p", help="Prime for symplectization trees"),
    p_plus: Optional[int] = typer.Option(None, "--p-plus", help="Prime of the positive end"),
    p_minus: Optional[int] = typer.Option(None, "--p-minus", help="Prime of the negative end"),
    output_format: Optional[str] = FormatOption,
):
    """Framing degrees at every vertex."""
    _execute("degrees", input_path, output_format, None, tree=tree, p=p, p_plus=p_plus, p_minus=p_minus)


@app.command()
def index(
    input_path: Optional[Path] = InputOption,
    tree: Optional[str] = TreeOption,
    n: Optional[int] = typer.Option(None, "--n", help="dim Y = 2n - 1"),
    output_format: Optional[str] = FormatOption,
):
    """Fredholm index and virtual dimension per vertex and of the glued curve."""
    _execute("index", input_path, output_format, None, tree=tree, n=n)


@app.command()
def ch(
    input_path: Optional[Path] = InputOption,
    cutoff_action: Optional[str] = typer.Option(None, "--cutoff-action", help="Largest word action, as p/q"),
    cutoff_length: Optional[int] = typer.Option(None, "--cutoff-length", help="Longest word"),
    output_format: Optional[str] = FormatOption,
):
    """Truncated contact homology chain complex and its Betti numbers."""
    try:
        action = parse_rational(cutoff_action) if cutoff_action is not None else None
    except InputValidationError as e:
        raise typer.Exit(_fail(e, EXIT_INVALID_INPUT))
    _execute("ch", input_path, output_format, None, cutoff_action=action, cutoff_length=cutoff_length)


@app.command()
def strata(
    input_path: Optional[Path] = InputOption,
    minus: str = typer.Option("", "--minus", help="Negative orbit sequence, comma separated"),
    plus: str = typer.Option(..., "--plus", help="Positive orbit sequence, comma separated"),
    partition: Optional[str] = typer.Option(None, "--partition", help="Image of each negative position"),
    depth: int = typer.Option(1, "--depth", help="Codimension of the strata"),
    max_length: Optional[int] = typer.Option(None, "--max-length", help="Longest intermediate sequence"),
    output_format: Optional[str] = FormatOption,
):
    """Boundary strata of a morphism space, up to the symmetric action."""
    try:
        images = [int(i) for i in _split(partition)] if partition is not None else None
    except ValueError:
        raise typer.Exit(_fail(InputValidationError(f"bad partition {partition!r}"), EXIT_INVALID_INPUT))
    _execute(
        "strata",
        input_path,
        output_format,
        None,
        minus=_split(minus),
        plus=_split(plus),
        partition=images,
        depth=depth,
        max_length=max_length,
    )


@app.command()
def norm(
    input_path: Optional[Path] = InputOption,
    max_length: Optional[int] = typer.Option(None, "--max-length", help="Longest sequence"),
    output_format: Optional[str] = FormatOption,
    dot: Optional[Path] = DotOption,
):
    """Precedence order of orbit sequences and its norm."""
    _execute("norm", input_path, output_format, dot, max_length=max_length)


@app.command()
def simplex(
    n: int = typer.Option(..., "--n", help="Dimension of the simplex"),
    output_format: Optional[str] = FormatOption,
    dot: Optional[Path] = DotOption,
):
    """Face counts of the simplex with all faces blown up."""
    _execute("simplex", None, output_format, dot, n=n)


@app.command()
def selftest(
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed"),
    trials: Optional[int] = typer.Option(None, "--trials", help="Trials per check"),
    check: Optional[List[str]] = typer.Option(None, "--check", help="Run only the named checks"),
    output_format: Optional[str] = FormatOption,
):
    """Randomized property checks against brute-force oracles."""
    try:
        report = selftest_service.run(seed=seed, trials=trials, only=check)
    except Exception as e:
        logger.error(f"Internal error in selftest: {e}", exc_info=True)
        raise typer.Exit(_fail(e, EXIT_INTERNAL))

    if (output_format or config.output.format).lower() == "table":
        table = Table(title=f"selftest (seed {report.seed}, {report.trials} trials)")
        table.add_column("check")
        table.add_column("result")
        for result in report.checks:
            status = "[green]ok[/green]" if result.passed else f"[red]{len(result.failures)} failed[/red]"
            table.add_row(result.name, status)
        console.print(table)
    else:
        typer.echo(project_service.dump(report))
    if not report.passed:
        raise typer.Exit(EXIT_REFUSED)


if __name__ == "__main__":
    app()
