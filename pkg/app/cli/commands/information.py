"""epi, capacity and laplace."""
from pathlib import Path

import click

from app.cli.common import (
    CommandError,
    build_mixture,
    build_quadrature,
    finish,
    handles_errors,
    output_options,
    quadrature_options,
    run_config,
)
from app.models.laplace import LaplaceMeasure
from app.repositories import inputs
from app.services import functionals
from app.utils.ranges import parse_range

EPI_TOLERANCE = 1e-8


def _density(components, mixture_path, grid_path):
    if grid_path is not None:
        if components or mixture_path is not None:
            raise CommandError("a density is either a grid or a mixture")
        return inputs.load_grid_csv(grid_path)
    return build_mixture(components, mixture_path)


@click.command()
@click.option("--a-component", type=(float, float, float), multiple=True, metavar="W M V")
@click.option("--a-mixture", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--a-grid", type=click.Path(dir_okay=False, path_type=Path), default=None, help="CSV y,f.")
@click.option("--b-component", type=(float, float, float), multiple=True, metavar="W M V")
@click.option("--b-mixture", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--b-grid", type=click.Path(dir_okay=False, path_type=Path), default=None, help="CSV y,f.")
@quadrature_options
@output_options
@handles_errors
def epi(a_component, a_mixture, a_grid, b_component, b_mixture, b_grid, points, tail_cutoff,
        formats, out_dir, no_timestamp):
    """Entropy-power gap e^{2h(A+B)} - e^{2h(A)} - e^{2h(B)}. Exit 3 if it is negative."""
    a = _density(a_component, a_mixture, a_grid)
    b = _density(b_component, b_mixture, b_grid)
    qcfg = build_quadrature(points, tail_cutoff)
    paths = [p for p in (a_mixture, a_grid, b_mixture, b_grid) if p is not None]
    run = run_config("epi", formats, out_dir, no_timestamp, paths,
                     a_components=[list(c) for c in a_component], b_components=[list(c) for c in b_component])
    gap = functionals.epi_gap(a, b, qcfg)
    report = {"gap": gap, "tolerance": EPI_TOLERANCE, "holds": gap >= -EPI_TOLERANCE}
    finish(run, "epi", report, f"epi gap: {gap:.10e}", violations=int(gap < -EPI_TOLERANCE))


@click.command()
@click.option("--power", type=float, required=True, help="Signal power P.")
@click.option("--t", "times", default="1", show_default=True, help="Noise variances t.")
@output_options
@handles_errors
def capacity(power, times, formats, out_dir, no_timestamp):
    """Gaussian channel capacity (1/2) log(1 + P/t) in nats."""
    ts = parse_range(times)
    run = run_config("capacity", formats, out_dir, no_timestamp, power=power, times=ts)
    rows = [[t, functionals.capacity(power, t)] for t in ts]
    lines = [f"t={t:g}: C = {c:.12g} nats" for t, c in rows]
    finish(run, "capacity", {"power": power, "rows": rows}, "\n".join(lines), [("capacity.csv", ["t", "C"], rows)])


@click.command()
@click.option("--rate", type=float, default=None, help="Density e^{-rate x} on [0, x-max].")
@click.option("--x-max", type=float, default=60.0, show_default=True)
@click.option("--samples", type=int, default=200001, show_default=True)
@click.option("--measure", "measure_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="CSV x,density.")
@click.option("--atom", "atoms", type=(float, float), multiple=True, metavar="X MASS", help="Point mass.")
@click.option("--t", "times", default="1", show_default=True)
@click.option("--max-order", type=int, default=0, show_default=True)
@output_options
@handles_errors
def laplace(rate, x_max, samples, measure_path, atoms, times, max_order, formats, out_dir, no_timestamp):
    """Forward Laplace transform ∫ e^{-xt} dμ(x) and its t-derivatives."""
    if rate is not None and measure_path is not None:
        raise CommandError("use either --rate or --measure")
    if rate is not None:
        base = LaplaceMeasure.exponential(rate, x_max, samples)
        measure = LaplaceMeasure(base.x, base.density, atoms)
    elif measure_path is not None:
        measure = inputs.load_measure_csv(measure_path, atoms)
    else:
        measure = LaplaceMeasure(atoms=atoms)
    ts = parse_range(times)
    run = run_config("laplace", formats, out_dir, no_timestamp, [measure_path] if measure_path else (),
                     rate=rate, x_max=x_max, samples=samples, atoms=[list(a) for a in atoms],
                     times=ts, max_order=max_order)
    rows = []
    flagged = 0
    for t in ts:
        results = functionals.laplace_derivatives(measure, t, max_order)
        flagged += sum(not r.converged for r in results)
        rows.append([t] + [r.value for r in results])
    header = ["t"] + [f"d{n}" for n in range(max_order + 1)]
    lines = [f"t={row[0]:g}: " + " ".join(f"{v:.12g}" for v in row[1:]) for row in rows]
    if flagged:
        lines.append(f"{flagged} value(s) flagged: the measure has not decayed at x = {measure.x[-1]:g}")
    finish(run, "laplace", {"header": header, "rows": rows, "flagged": flagged}, "\n".join(lines),
           [("laplace.csv", header, rows)])


commands = [epi, capacity, laplace]
