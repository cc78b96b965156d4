"""derive, certify and search: the exact symbolic side."""
import click

from app.cli.common import finish, handles_errors, output_options, run_config
from app.repositories.certificates import certificates, format_f_notation
from app.schemas.certificate import SearchConfig
from app.services import certificates as certificate_service
from app.services import moment_calculus


@click.command()
@click.option("--order", type=int, required=True, help="Derivative order n.")
@click.option("--quantity", type=click.Choice(["entropy", "fisher"]), default="entropy", show_default=True,
              help="d^n h/dt^n or d^n I/dt^n.")
@click.option("--notation", type=click.Choice(["ratio", "paper"]), default="ratio", show_default=True,
              help="r_i ratio text or the f_i/f^j integral form.")
@output_options
@handles_errors
def derive(order, quantity, notation, formats, out_dir, no_timestamp):
    """Canonical moment expression for a time derivative along heat flow."""
    run = run_config("derive", formats, out_dir, no_timestamp, order=order, quantity=quantity, notation=notation)
    if quantity == "entropy":
        expr = moment_calculus.entropy_derivative(order)
    else:
        expr = moment_calculus.fisher_derivative(order)
    rendered = moment_calculus.render(expr, notation)
    report = {
        "order": order,
        "quantity": quantity,
        "expression": str(expr),
        "rendered": rendered,
        "terms": len(expr),
        "weight": 2 * order if quantity == "entropy" else 2 * order + 2,
    }
    finish(run, "derive", report, rendered)


@click.command()
@click.option("--order", type=int, default=None, help="Order to certify; defaults to the certificate's own.")
@click.option("--certificate", "reference", default=None,
              help="builtin:<name> or a certificate file; defaults to builtin:paper-n<order>.")
@click.option("--notation", type=click.Choice(["ratio", "paper"]), default="ratio", show_default=True)
@output_options
@handles_errors
def certify(order, reference, notation, formats, out_dir, no_timestamp):
    """Verify a sum-of-squares certificate by exact reduction. Exit 3 when it does not verify."""
    if reference is None:
        if order is None:
            raise click.UsageError("give --order or --certificate")
        reference = f"builtin:paper-n{order}"
    cert = certificates.load(reference)
    if order is not None and cert.order != order:
        raise click.UsageError(f"certificate has order {cert.order}, not {order}")
    run = run_config("certify", formats, out_dir, no_timestamp, order=cert.order, certificate=reference)
    report = certificate_service.verify_certificate(cert)
    lines = [f"order: {report.order}", f"verified: {str(report.verified).lower()}"]
    if notation == "paper":
        lines.append(f"certificate: {format_f_notation(cert)}")
    if not report.verified:
        lines.append(f"residual: {report.residual}")
        lines.append(f"residual L1: {report.residual_norm_l1}")
    finish(run, "certify", report, "\n".join(lines), violations=0 if report.verified else 1)


@click.command()
@click.option("--order", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed of the first restart.")
@click.option("--restarts", type=int, default=1, show_default=True, help="Seeds seed, seed+1, ...")
@click.option("--max-iterations", type=int, default=None)
@click.option("--step-size", type=float, default=None)
@click.option("--max-denominator", type=int, default=None)
@click.option("--squares", type=int, default=None, help="Number of squares (default: known layout plus one).")
@output_options
@handles_errors
def search(order, seed, restarts, max_iterations, step_size, max_denominator, squares,
           formats, out_dir, no_timestamp):
    """Gradient-descent search for a certificate, refined to exact rationals."""
    overrides = {
        "max_iterations": max_iterations,
        "step_size": step_size,
        "max_denominator": max_denominator,
        "squares": squares,
    }
    cfg = SearchConfig(order=order, random_seed=seed, **{k: v for k, v in overrides.items() if v is not None})
    if restarts < 1:
        raise click.BadParameter("restarts must be >= 1", param_hint="--restarts")
    run = run_config("search", formats, out_dir, no_timestamp, **cfg.model_dump(), restarts=restarts)
    results = certificate_service.search_restarts(cfg, restarts)
    lines = []
    for r in results:
        status = "verified" if r.verified else ("converged, not exact" if r.converged else "no convergence")
        lines.append(f"seed {r.random_seed}: {status} after {r.iterations} iterations, "
                     f"float residual {r.float_residual:.3e}")
        if r.certificate:
            lines.append(r.certificate.rstrip("\n"))
    found = sum(r.verified for r in results)
    lines.append(f"{found}/{len(results)} restarts produced an exact certificate")
    finish(run, "search", {"order": order, "restarts": [r.model_dump(mode="json") for r in results]},
           "\n".join(lines))


commands = [derive, certify, search]
