"""
Display utilities for rich terminal output.

Everything human-facing goes to stderr so that stdout carries only data.
"""

import logging
from collections.abc import Sequence

from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

console = Console(stderr=True)


def setup_logging(level: str = "INFO") -> None:
    """Route the root logger through rich on stderr."""
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, show_path=False, rich_tracebacks=True)],
        force=True,
    )


def print_header(title: str, subtitle: str = "") -> None:
    """Print a run banner."""
    body = f"[bold]{title}[/bold]" + (f"\n[dim]{subtitle}[/dim]" if subtitle else "")
    console.print(Panel(body, border_style="cyan", expand=False))


def print_status(message: str) -> None:
    """Print a status message."""
    console.print(f"[bold blue]→[/bold blue] {message}")


def print_success(message: str) -> None:
    """Print a success message."""
    console.print(f"[green]✓[/green] {message}")


def print_warning(message: str) -> None:
    """Print a warning message."""
    console.print(f"[yellow]⚠[/yellow] {message}")


def print_error(message: str) -> None:
    """Print an error message."""
    console.print(f"[red bold]✗ Error:[/red bold] {message}")


def create_metrics_table(metrics: dict, title: str | None = None) -> Table:
    """Create a two-column metric/value table."""
    table = Table(title=title, show_header=True, header_style="bold cyan")
    table.add_column("Metric", style="dim")
    table.add_column("Value", justify="right")

    for key, value in metrics.items():
        table.add_row(key, _format(value))

    return table


def create_cdf_table(
    columns: Sequence[str], rows: Sequence[Sequence[object]], title: str | None = None
) -> Table:
    """Tabulate grid rows; the first column is the swept argument."""
    table = Table(title=title, show_header=True, header_style="bold cyan")
    for i, name in enumerate(columns):
        table.add_column(name, justify="right", style="dim" if i == 0 else None)
    for row in rows:
        table.add_row(*(_format(v) for v in row))
    return table


def _format(value: object) -> str:
    if isinstance(value, bool):
        return "[green]yes[/green]" if value else "[red]no[/red]"
    if isinstance(value, float):
        return f"{value:.10g}"
    if value is None:
        return "-"
    return str(value)


def create_progress() -> Progress:
    """Create a progress indicator for long operations."""
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        console=console,
        transient=True,
    )
