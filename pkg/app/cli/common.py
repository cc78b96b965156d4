"""
Shared pieces of the subcommands: option groups, error translation and
report output.
"""
import functools
import logging
from pathlib import Path
from typing import Any, Callable, Iterable, Optional, Sequence, Tuple

import click
from pydantic import ValidationError

from app.core.exceptions import EXIT_VALIDATION, EXIT_VIOLATION, HeatlabError
from app.models.density import GaussianMixture
from app.repositories import inputs
from app.schemas.quadrature import QuadratureConfig
from app.schemas.run import RunConfig
from app.utils import reports

logger = logging.getLogger(__name__)

CsvTable = Tuple[str, Sequence[str], Iterable[Sequence[Any]]]


class CommandError(click.ClickException):
    """ClickException carrying the exit code of the underlying error."""

    def __init__(self, message: str, exit_code: int = EXIT_VALIDATION):
        super().__init__(message)
        self.exit_code = exit_code


def _validation_message(exc: ValidationError) -> str:
    return "; ".join(f"{'.'.join(str(p) for p in err['loc']) or 'input'}: {err['msg']}" for err in exc.errors())


def handles_errors(func: Callable) -> Callable:
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except HeatlabError as exc:
            raise CommandError(exc.detail, exc.exit_code) from exc
        except ValidationError as exc:
            raise CommandError(_validation_message(exc)) from exc
    return wrapper


def output_options(func: Callable) -> Callable:
    func = click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
                        help="Directory for report files; without it reports go to stdout.")(func)
    func = click.option("--format", "formats", type=click.Choice(["json", "csv", "text"]), multiple=True,
                        help="Output formats (repeatable, default text).")(func)
    func = click.option("--no-timestamp", is_flag=True, default=False,
                        help="Omit generatedAt so identical runs give byte-identical JSON.")(func)
    return func


def quadrature_options(func: Callable) -> Callable:
    func = click.option("--points", type=int, default=None, help="Gauss-Hermite points per component.")(func)
    func = click.option("--tail-cutoff", type=float, default=None,
                        help="Drop points where f < cutoff * max f.")(func)
    return func


def mixture_options(func: Callable) -> Callable:
    func = click.option("--component", "components", type=(float, float, float), multiple=True,
                        metavar="W M V", help="Mixture component weight, mean, variance (repeatable).")(func)
    func = click.option("--mixture", "mixture_path", type=click.Path(dir_okay=False, path_type=Path),
                        default=None, help="Mixture file, one 'weight mean variance' per line.")(func)
    return func


def build_quadrature(points: Optional[int], tail_cutoff: Optional[float]) -> QuadratureConfig:
    overrides = {}
    if points is not None:
        overrides["points_per_component"] = points
    if tail_cutoff is not None:
        overrides["tail_cutoff_ratio"] = tail_cutoff
    return QuadratureConfig(**overrides)


def build_mixture(components: Sequence[Tuple[float, float, float]], mixture_path: Optional[Path]) -> GaussianMixture:
    if components and mixture_path is not None:
        raise CommandError("use either --component or --mixture, not both")
    if mixture_path is not None:
        return inputs.load_mixture(mixture_path)
    if components:
        return GaussianMixture(components)
    return GaussianMixture.gaussian()


def run_config(subcommand: str, formats: Sequence[str], out_dir: Optional[Path], no_timestamp: bool,
               inputs_: Sequence[Path] = (), **parameters: Any) -> RunConfig:
    return RunConfig(
        subcommand=subcommand,
        inputs=list(inputs_),
        output_dir=out_dir,
        formats=list(formats) or ["text"],
        parameters=parameters,
        timestamp=not no_timestamp,
    )


def finish(run: RunConfig, kind: str, report: Any, text: str, tables: Sequence[CsvTable] = (),
           violations: int = 0) -> None:
    """Emit the report in every requested format, then exit 3 when violations were recorded."""
    if "text" in run.formats:
        click.echo(text.rstrip("\n"))
    if "json" in run.formats:
        if run.output_dir is not None:
            reports.write_json(run.output_dir / f"{kind}.json", kind, report, run)
        else:
            click.echo(reports.render_json(kind, report, run), nl=False)
    if "csv" in run.formats:
        for name, header, rows in tables:
            if run.output_dir is not None:
                reports.write_csv(run.output_dir / name, header, rows)
            else:
                click.echo(reports.render_csv(header, rows), nl=False)
    if violations:
        logger.warning("%s: %d violation(s) recorded", kind, violations)
        raise click.exceptions.Exit(EXIT_VIOLATION)


def plot(report: Any, kind: str, run: RunConfig, script: bool) -> None:
    if run.output_dir is None:
        raise CommandError("--plot needs --out-dir")
    for path in reports.emit_plot_data(report, kind, run.output_dir, script=script):
        click.echo(f"plot data: {path}", err=True)
