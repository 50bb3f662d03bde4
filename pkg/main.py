#!/usr/bin/env python3
"""
Otelbaev bounds
Two-sided spectral estimates for -u'' - mu from Otelbaev's averaged function
"""
import asyncio
import logging
import sys
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

sys.path.insert(0, str(Path(__file__).resolve().parent / "src"))

from automation.report_writer import ReportTable, write_table
from automation.scenario_runner import (
    EXIT_CROSS_CHECK, EXIT_OK, EXIT_PARSE, PROFILE_COLUMNS, SPECTRUM_COLUMNS, ScenarioResult, run_scenario,
)
from core.measure import load_measure
from core.otelbaev import profile_rows
from spectral.refsolver import negative_spectrum, spectrum_rows
from utils.config import config
from utils.errors import MeasureError, OtelbaevError, ParameterError, ReportError

# Setup logging
logging.basicConfig(
    level=getattr(logging, config.data.get('logging', {}).get('level', 'INFO')),
    format=config.data.get('logging', {}).get('format', '%(asctime)s - %(name)s - %(levelname)s - %(message)s')
)
logger = logging.getLogger(__name__)

app = typer.Typer(help="Two-sided spectral bounds from Otelbaev's function")
console = Console()

PREVIEW_ROWS = 20


@app.command()
def run(
    scenario: Path = typer.Argument(..., help="Scenario JSON file"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Report directory"),
    threads: Optional[int] = typer.Option(None, "--threads", "-j", min=1, help="Worker threads"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Eigenvalue tolerance"),
):
    """Execute a scenario and write CSV tables plus summary.json"""

    async def run_all() -> ScenarioResult:
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            console=console,
        ) as progress:
            task = progress.add_task(f"Running {scenario.name}...", total=None)
            result = await run_scenario(scenario, out, threads, tol)
            progress.update(task, description="Scenario complete!")
        return result

    result = asyncio.run(run_all())
    if result.error:
        console.print(f"❌ {result.error}", style="bold red")
    else:
        _display_scenario_results(result)
        console.print(f"📁 Reports saved to: {result.out_dir}", style="green")
    raise typer.Exit(result.exit_code)


@app.command(name="eval")
def eval_profile(
    measure: Path = typer.Option(..., "--measure", "-m", help="Measure JSON file"),
    alpha: float = typer.Option(2.0, "--alpha", "-a", help="Averaging parameter"),
    x_from: float = typer.Option(..., "--from", help="First grid point"),
    x_to: float = typer.Option(..., "--to", help="Last grid point"),
    step: float = typer.Option(..., "--step", help="Grid step"),
    output: Optional[Path] = typer.Option(None, "--output", help="CSV file for (x, d, q)"),
):
    """Evaluate d_alpha and q*_alpha on a grid"""
    try:
        m = load_measure(measure)
        rows = profile_rows(m, alpha, x_from, x_to, step)
    except (OSError, MeasureError, ParameterError) as e:
        console.print(f"❌ {e}", style="bold red")
        raise typer.Exit(EXIT_PARSE)

    table = Table(title=f"q*_{alpha} on [{x_from}, {x_to}]")
    for column in PROFILE_COLUMNS:
        table.add_column(column, justify="right")
    for x, d, q in rows[:PREVIEW_ROWS]:
        table.add_row(f"{x:.6g}", f"{d:.12g}", f"{q:.12g}")
    console.print(table)
    if len(rows) > PREVIEW_ROWS:
        console.print(f"... {len(rows) - PREVIEW_ROWS} more rows", style="dim")
    _save_table(ReportTable("profile", PROFILE_COLUMNS, rows), output)


@app.command()
def spectrum(
    measure: Path = typer.Option(..., "--measure", "-m", help="Measure JSON file"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Tolerance on kappa"),
    output: Optional[Path] = typer.Option(None, "--output", help="CSV file for (nu, lambda, kappa, err)"),
):
    """Negative eigenvalues of -u'' - mu"""
    try:
        m = load_measure(measure)
    except (OSError, MeasureError) as e:
        console.print(f"❌ {e}", style="bold red")
        raise typer.Exit(EXIT_PARSE)

    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        console=console,
    ) as progress:
        task = progress.add_task("Solving for eigenvalues...", total=None)
        try:
            result = negative_spectrum(m, tol)
        except ParameterError as e:
            console.print(f"❌ {e}", style="bold red")
            raise typer.Exit(EXIT_PARSE)
        except OtelbaevError as e:
            console.print(f"❌ Cross-check failed: {e}", style="bold red")
            raise typer.Exit(EXIT_CROSS_CHECK)
        progress.update(task, description="Spectrum complete!")

    rows = spectrum_rows(result)
    table = Table(title=f"{result.count} negative eigenvalue(s)")
    for column in SPECTRUM_COLUMNS:
        table.add_column(column, justify="right")
    for nu, ev, kappa, err in rows:
        table.add_row(str(nu), f"{ev:.15g}", f"{kappa:.15g}", f"{err:.3g}")
    console.print(table)
    _save_table(ReportTable("spectrum", SPECTRUM_COLUMNS, rows), output)


@app.command()
def config_info():
    """Display the effective configuration"""
    console.print("⚙️ Current Configuration", style="bold blue")

    table = Table()
    table.add_column("Setting", style="cyan")
    table.add_column("Value", style="magenta")

    for section in ("otelbaev", "decomposition", "spectrum", "bounds", "runner", "corpus"):
        for key, value in getattr(config, section).model_dump().items():
            table.add_row(f"{section}.{key}", str(value))
    table.add_row("reports_dir", str(config.reports_dir))
    table.add_row("version", config.version)
    console.print(table)


def _save_table(table: ReportTable, output: Optional[Path]):
    if output is None:
        return
    try:
        output.parent.mkdir(parents=True, exist_ok=True)
        write_table(table, output)
    except (OSError, ReportError) as e:
        console.print(f"❌ Cannot write {output}: {e}", style="bold red")
        raise typer.Exit(EXIT_PARSE)
    console.print(f"📄 Saved to: {output}", style="green")


def _display_scenario_results(result: ScenarioResult):
    """Display per-task pass/fail counts"""
    table = Table(title=f"Scenario: {result.name}")
    table.add_column("Task", style="cyan")
    table.add_column("Status", style="magenta")
    table.add_column("Pass", justify="right", style="green")
    table.add_column("Fail", justify="right", style="red")

    for r in result.results:
        status = r.status if not r.error else f"error: {r.error}"
        if r.check_failures:
            status = f"{status} ({r.check_failures} check failure(s))"
        table.add_row(r.label, status, str(r.passed), str(r.failed))
    console.print(table)

    style = "bold green" if result.exit_code == EXIT_OK else "bold red"
    console.print(f"Exit code {result.exit_code}", style=style)


if __name__ == "__main__":
    app()
