"""flow, scan and logconvex: numerical evidence along heat flow."""
import click

from app.cli.common import (
    build_mixture,
    build_quadrature,
    finish,
    handles_errors,
    mixture_options,
    output_options,
    plot,
    quadrature_options,
    run_config,
)
from app.schemas.monotonicity import ScanConfig
from app.services import monotonicity
from app.utils import reports
from app.utils.ranges import parse_range


def _fmt(values):
    return " ".join(f"{v: .6e}" for v in values)


@click.command()
@mixture_options
@click.option("--t", "times", default="log:0.1:10:20", show_default=True, help="Times: a:b:step or log:a:b:count.")
@click.option("--max-order", type=int, default=4, show_default=True)
@click.option("--signs", is_flag=True, help="Also print the sign table at every time.")
@click.option("--cross-check", is_flag=True, help="Add Richardson finite differences to the sign tables.")
@click.option("--plot", "plot_data", is_flag=True, help="Write <kind>-<hash>.csv plot data to --out-dir.")
@click.option("--plot-script", is_flag=True, help="With --plot, also write a plotting script.")
@quadrature_options
@output_options
@handles_errors
def flow(components, mixture_path, times, max_order, signs, cross_check, plot_data, plot_script,
         points, tail_cutoff, formats, out_dir, no_timestamp):
    """Entropy, Fisher information and d^n I/dt^n along the flow."""
    mixture = build_mixture(components, mixture_path)
    qcfg = build_quadrature(points, tail_cutoff)
    ts = parse_range(times)
    run = run_config("flow", formats, out_dir, no_timestamp, [mixture_path] if mixture_path else (),
                     components=[list(c) for c in components], times=ts, max_order=max_order,
                     quadrature=qcfg.model_dump())
    report = monotonicity.flow_curve(mixture, ts, max_order, qcfg)
    header, rows = reports.flow_rows(report)
    lines = ["  ".join(header)] + [_fmt(row) for row in rows]
    tables = [("flow.csv", header, rows)]
    violations = 0
    if signs or cross_check:
        for t in ts:
            table = monotonicity.sign_table(mixture, t, max_order, qcfg, cross_check=cross_check)
            violations += len(table.violations)
            lines.append(f"t={t:g}: " + " ".join(e.sign for e in table.entries)
                         + (f"  ({len(table.violations)} violation(s))" if table.violations else ""))
            if cross_check:
                lines.extend(f"    n={e.order}: fd rel. error {e.fd_relative_error:.2e}" for e in table.entries)
            if plot_data:
                plot(table, "sign-table", run, plot_script)
    if plot_data:
        plot(report, "flow", run, plot_script)
    finish(run, "flow", report, "\n".join(lines), tables, violations)


@click.command()
@click.option("--lambda", "lambdas", default="0.05:0.5:0.05", show_default=True, help="Mixture weights λ.")
@click.option("--d", "separations", default="0.5:20:0.5", show_default=True, help="Component separations d.")
@click.option("--t", "times", default="log:0.01:10:40", show_default=True, help="Times t.")
@click.option("--max-order", type=int, default=7, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker processes.")
@click.option("--no-log-convexity", is_flag=True, help="Skip the log-convexity checks.")
@click.option("--all-rows", "keep_rows", is_flag=True, help="Write every (λ, d, t, order) value to scan.csv.")
@click.option("--plot", "plot_data", is_flag=True, help="Write scan-heatmap plot data to --out-dir.")
@click.option("--plot-script", is_flag=True)
@quadrature_options
@output_options
@handles_errors
def scan(lambdas, separations, times, max_order, jobs, no_log_convexity, keep_rows, plot_data, plot_script,
         points, tail_cutoff, formats, out_dir, no_timestamp):
    """Sweep λN(0,1) + (1-λ)N(d,1) for sign and log-convexity violations. Exit 3 on any violation."""
    cfg = ScanConfig(
        lambdas=parse_range(lambdas), separations=parse_range(separations), times=parse_range(times),
        max_order=max_order, jobs=jobs, log_convexity=not no_log_convexity, keep_rows=keep_rows,
        quadrature=build_quadrature(points, tail_cutoff),
    )
    run = run_config("scan", formats, out_dir, no_timestamp, **cfg.model_dump(exclude={"jobs"}))
    report = monotonicity.cm_scan(cfg)
    header, rows = reports.scan_rows(report)
    lines = [
        f"points: {report.points}",
        f"sign checks: {report.sign_checks}",
        f"flagged: {report.flagged}",
        f"sign violations: {len(report.sign_violations)}",
        f"log-convexity violations: {len(report.log_convexity_violations)}",
    ]
    lines.extend(f"  {v.kind} at lambda={v.lam:g} d={v.d:g} t={v.t:g} order={v.order}: {v.value:.6e}"
                 for v in report.violations[:20])
    if plot_data:
        plot(report, "scan-heatmap", run, plot_script)
    finish(run, "scan", report, "\n".join(lines), [("scan.csv", header, rows)], len(report.violations))


@click.command()
@mixture_options
@click.option("--t", "times", default="1", show_default=True)
@click.option("--max-order", type=int, default=4, show_default=True)
@quadrature_options
@output_options
@handles_errors
def logconvex(components, mixture_path, times, max_order, points, tail_cutoff, formats, out_dir, no_timestamp):
    """Log-convexity of I(Y_t) and of its derivative sequence."""
    mixture = build_mixture(components, mixture_path)
    qcfg = build_quadrature(points, tail_cutoff)
    ts = parse_range(times)
    run = run_config("logconvex", formats, out_dir, no_timestamp, [mixture_path] if mixture_path else (),
                     components=[list(c) for c in components], times=ts, max_order=max_order)
    results = [monotonicity.log_convexity_check(mixture, t, max_order, qcfg) for t in ts]
    lines = []
    failures = 0
    for r in results:
        failures += not r.ok
        lines.append(f"t={r.t:g}: I*I''-(I')^2 = {r.function_margin:.6e}  sequence margins {_fmt(r.sequence_margins)}"
                     f"  {'ok' if r.ok else 'VIOLATION'}")
    header = ["t", "function_margin", "log_convex"]
    rows = [[r.t, r.function_margin, r.ok] for r in results]
    finish(run, "logconvex", {"checks": [r.model_dump() for r in results]}, "\n".join(lines),
           [("logconvex.csv", header, rows)], failures)


commands = [flow, scan, logconvex]
