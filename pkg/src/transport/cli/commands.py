"""Click command group ``stirap``."""
from pathlib import Path
from typing import Any, Callable, List, Optional

import click
from rich.console import Console

from ...config.config import load_run_config
from ...config.settings import get_settings
from ...domain.entities import ScheduleShape
from ...middleware.error_handler import handle_errors
from ...middleware.logging import setup_logging
from ...repository.file_repository import FileResultRepository
from .handlers import AnalysisHandlers


def _number_list(cast: Callable[[str], Any]) -> Callable:
    def parse(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[List[Any]]:
        if value is None:
            return None
        try:
            return [cast(item) for item in value.split(",") if item.strip()]
        except ValueError:
            raise click.BadParameter(f"expected a comma-separated list, got {value!r}") from None
    return parse


def run_options(command: Callable) -> Callable:
    """Flags shared by every subcommand; unset flags fall back to --config, then defaults."""
    options = [
        click.option("--circuit", "circuit_path", type=click.Path(path_type=Path), help="Circuit DSL file (or directory for verify)"),
        click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False, path_type=Path),
                     help="YAML run configuration"),
        click.option("--J", "J", type=float, help="Boundary coupling J (default 1.0)"),
        click.option("--M", "M", type=float, help="Internal coupling M (default 10.0)"),
        click.option("--s", "s", type=float, help="Single interpolation parameter s in [0, 1]"),
        click.option("--s-grid", "s_grid", type=int, help="Number of evenly spaced s points"),
        click.option("--n-list", "n_list", callback=_number_list(int), help="Chain lengths, e.g. 2,4,6"),
        click.option("--T-list", "T_list", callback=_number_list(float), help="Total sweep times, e.g. 10,30,100"),
        click.option("--out", "output_dir", type=click.Path(file_okay=False, path_type=Path), help="Output directory"),
        click.option("--seed", type=int, help="Seed of the random-rotation family"),
        click.option("--phi", "phi_index", type=int, help="Register basis state fed into the chain"),
        click.option("--schedule", type=click.Choice([shape.value for shape in ScheduleShape]), help="Sweep shape"),
        click.option("--family", type=click.Choice(["identity", "random-rotation"]), help="Gap-scan circuit family"),
        click.option("--register-width", "register_width", type=int, help="Register width of the gap-scan family"),
        click.option("--zero-tol", "zero_tol", type=float, help="Zero-eigenvalue threshold"),
        click.option("--kernel-tol", "kernel_tol", type=float, help="Dark-state residual bound"),
        click.option("--force", is_flag=True, default=None, help="Overwrite existing output files"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _dispatch(method: str) -> Callable:
    """Build the handler for one invocation and exit with its code."""
    def command(**options: Any) -> None:
        config = load_run_config(options.pop("config_file"), options)
        settings = get_settings()
        handlers = AnalysisHandlers(settings, FileResultRepository(config.output_dir, config.force), Console())
        code = getattr(handlers, method)(config)
        click.get_current_context().exit(code)
    command.__name__ = method
    return handle_errors(command)


@click.group()
@click.option("--log-level", default=None, help="Logging level (default from STIRAP_LOG_LEVEL)")
def cli(log_level: Optional[str]) -> None:
    """Adiabatic pointer-chain quantum computer: dark states, gaps, sweeps, spin couplings."""
    setup_logging(log_level or get_settings().log_level)


def _register(name: str, method: str, help_text: str) -> None:
    cli.command(name=name, help=help_text)(run_options(_dispatch(method)))


_register("darkstate", "darkstate", "Exact dark state at s, checked against the eigensolver zero space.")
_register("spectrum", "spectrum", "Full spectrum of H(s) on an s grid.")
_register("gapscan", "gapscan", "Minimum gap per chain length and power-law fit.")
_register("evolve", "evolve", "Adiabatic sweep over the T list.")
_register("compile-spin", "compile_spin", "Pauli coupling table of the spin realization.")
_register("audit", "audit", "Audit the published gate Hamiltonian table.")
_register("verify", "verify", "Run every invariant group on the example corpus.")
