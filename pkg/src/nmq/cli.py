#!/usr/bin/env python3
"""
Command-line interface for nmq

All rates and frequencies are in units of the spectral width lambda (JC) or
the cutoff omega_c (dephasing); temperatures are energies with k_B = 1.
"""

import logging
import sys
from typing import Any, Callable, Optional

import click
from rich import box
from rich.console import Console
from rich.table import Table

from . import __version__
from .config import MODELS, RunConfig
from .exceptions import ConfigurationError, NMQError, NumericalError
from .measures import MeasureReport
from .runner import run, sweep

# Setup logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger("nmq.cli")

# Create rich consoles
console = Console()
err_console = Console(stderr=True)

# Create click context settings
CONTEXT_SETTINGS = dict(help_option_names=['-h', '--help'])

EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


def print_version(ctx: click.Context, param: click.Parameter, value: bool) -> None:
    """Print the version and exit"""
    if not value or ctx.resilient_parsing:
        return
    console.print(f"[bold green]nmq[/bold green] version: [bold]{__version__}[/bold]")
    ctx.exit()


def config_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """Options shared by every command that reads a config file"""
    options = [
        click.option('--config', 'config_path', required=True, type=click.Path(dir_okay=False),
                     help='Run config (JSON, or YAML with a .yaml/.yml suffix)'),
        click.option('--model', type=click.Choice(MODELS), help='Override the model kind'),
        click.option('--t-max', type=float, help='Override grid.t_max (1/lambda or 1/omega_c)'),
        click.option('--dt', type=float, help='Override grid.dt (1/lambda or 1/omega_c)'),
        click.option('--seed', type=int, help='Override pair_sweep.seed'),
        click.option('--jobs', type=int, help='Worker threads'),
        click.option('--output-dir', type=click.Path(file_okay=False), help='Output directory'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def load_config(config_path: str, **overrides: Any) -> RunConfig:
    """Read the config file and apply command-line overrides"""
    return RunConfig.from_file(config_path).with_overrides(**overrides)


def fail(message: Any, code: int) -> None:
    err_console.print(f"[bold red]Error:[/bold red] {message}")
    sys.exit(code)


def report_table(report: MeasureReport) -> Table:
    table = Table(title="Non-Markovianity measures", box=box.ROUNDED)
    table.add_column("Measure", style="cyan")
    table.add_column("Value", justify="right")
    table.add_column("Intervals", justify="right")
    table.add_column("Notes")
    rows = [
        ("N (trace distance)", report.blp, ""),
        ("I_E (entanglement)", report.entanglement, ""),
        ("I (divisibility)", report.divisibility, ""),
    ]
    for name, value, note in rows:
        if value.divergent:
            note = "divergent, lower bound"
        table.add_row(name, f"{value.value:.6g}", str(len(value.intervals)), note)
    table.add_row("N (rate formula)", f"{report.blp_formula.value:.6g}",
                  str(len(report.blp_formula.intervals)), "")
    return table


@click.group(context_settings=CONTEXT_SETTINGS)
@click.option('--debug', is_flag=True, help='Enable debug logging')
@click.option('--version', is_flag=True, callback=print_version,
              expose_value=False, is_eager=True, help='Show version and exit')
@click.pass_context
def cli(ctx: click.Context, debug: bool) -> None:
    """
    nmq - Non-Markovianity measures for open two-level systems

    Computes the trace-distance, entanglement and divisibility measures for
    the damped Jaynes-Cummings and pure-dephasing models. Rates are in units
    of lambda (JC) or omega_c (dephasing).
    """
    # Setup logging level
    if debug:
        logging.getLogger("nmq").setLevel(logging.DEBUG)

    ctx.ensure_object(dict)
    ctx.obj['debug'] = debug


@cli.command("run")
@config_options
def run_command(config_path: str, **overrides: Any) -> None:
    """Compute all three measures and write trace.csv, curves.csv, report.json"""
    try:
        config = load_config(config_path, **overrides)
        with console.status("[bold green]Computing measures...[/bold green]"):
            result, written = run(config)
    except ConfigurationError as e:
        fail(e, EXIT_CONFIG)
        return
    except NumericalError as e:
        fail(e, EXIT_NUMERICAL)
        return
    except NMQError as e:
        fail(e, EXIT_CONFIG)
        return

    report = result.report
    console.print(report_table(report))
    verdict = report.verdict
    if verdict.equivalent:
        console.print("[bold green]✓[/bold green] Measures agree on the non-Markovian intervals")
    else:
        console.print(
            f"[bold yellow]✗[/bold yellow] Measures disagree "
            f"(interval distance {verdict.distance:.3g})"
        )
    if report.sweep is not None:
        sweep_summary = report.sweep
        console.print(
            f"Pair sweep: invariant={sweep_summary.invariant}, "
            f"canonical pair attains max={sweep_summary.canonical_attains_max}"
        )
    for path in written:
        console.print(f"  [dim]{path}[/dim]")


@cli.command("sweep")
@config_options
def sweep_command(config_path: str, **overrides: Any) -> None:
    """Evaluate the measures over the config's axes and write sweep.csv"""
    try:
        config = load_config(config_path, **overrides)
        with console.status("[bold green]Sweeping...[/bold green]"):
            rows, written = sweep(config)
    except ConfigurationError as e:
        fail(e, EXIT_CONFIG)
        return
    except NumericalError as e:
        fail(e, EXIT_NUMERICAL)
        return
    except NMQError as e:
        fail(e, EXIT_CONFIG)
        return

    table = Table(title="Sweep", box=box.ROUNDED)
    for axis in config.axes:
        table.add_column(axis.parameter, style="cyan")
    for column in ("N", "I_E", "I", "Equivalent"):
        table.add_column(column, justify="right")
    for row in rows:
        r = row.report
        divisibility = f"{r.divisibility.value:.6g}" + (" (div)" if r.divisibility.divergent else "")
        table.add_row(
            *(f"{v:g}" for v in row.values),
            f"{r.blp.value:.6g}",
            f"{r.entanglement.value:.6g}",
            divisibility,
            "yes" if r.verdict.equivalent else "no",
        )
    console.print(table)
    for path in written:
        console.print(f"  [dim]{path}[/dim]")


@cli.command("validate")
@config_options
def validate_command(config_path: str, **overrides: Any) -> None:
    """Parse and validate a config without computing anything"""
    try:
        config = load_config(config_path, **overrides)
    except NMQError as e:
        fail(e, EXIT_CONFIG)
        return

    table = Table(title="Run config", box=box.ROUNDED, show_header=False)
    table.add_column("Key", style="cyan")
    table.add_column("Value")
    table.add_row("model", config.model)
    table.add_row("units", config.units)
    for key, value in config.spectral_density.to_dict().items():
        table.add_row(f"spectral_density.{key}", str(value))
    table.add_row("temperature", f"{config.temperature:g}")
    table.add_row("grid", f"t_max={config.grid.t_max:g}, dt={config.grid.dt:g} "
                          f"({config.grid.count} points)")
    if config.pair is not None:
        table.add_row("pair", f"a={config.pair.a:g}, b={config.pair.b:g}")
    if config.pair_sweep is not None:
        table.add_row("pair_sweep", f"n_pairs={config.pair_sweep['n_pairs']}, "
                                    f"seed={config.pair_sweep['seed']}")
    for axis in config.axes:
        table.add_row(f"axis {axis.parameter}", ", ".join(f"{v:g}" for v in axis.values))
    console.print(table)
    console.print("[bold green]✓[/bold green] Config is valid")


def main(argv: Optional[list] = None) -> None:
    """Entry point; usage errors exit with the configuration status"""
    try:
        rv = cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        err_console.print("Aborted!")
        sys.exit(EXIT_CONFIG)
    except click.ClickException as e:
        e.show()
        sys.exit(EXIT_CONFIG)
    sys.exit(rv if isinstance(rv, int) else 0)


if __name__ == "__main__":
    main()
