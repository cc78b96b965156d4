"""mgl, chromatic and seq: the discrete-side checks."""
from pathlib import Path

import click

from app.cli.common import CommandError, finish, handles_errors, output_options, run_config
from app.models.graph import Graph
from app.repositories import inputs
from app.services import monotonicity, sequences
from app.utils.ranges import parse_range

G_CHOICES = {
    "hinv": sequences.binary_entropy_inv,
    "square": lambda x: x * x,
    "identity": lambda x: x,
}


@click.command()
@click.option("--p", "ps", default="0:0.5:0.05", show_default=True, help="Crossover probabilities p.")
@click.option("--x", "xs", default="0:1:0.0025", show_default=True, help="x grid.")
@click.option("--g", "g_name", type=click.Choice(sorted(G_CHOICES)), default="hinv", show_default=True)
@click.option("--p-concavity", is_flag=True, help="Also report the concavity-in-p diagnostic.")
@output_options
@handles_errors
def mgl(ps, xs, g_name, p_concavity, formats, out_dir, no_timestamp):
    """Convexity of x -> H(p * g(x)) on a grid. Exit 3 on a non-convex p."""
    p_values = parse_range(ps)
    x_grid = parse_range(xs)
    g = G_CHOICES[g_name]
    run = run_config("mgl", formats, out_dir, no_timestamp, p=p_values, x=x_grid, g=g_name)
    results = [sequences.mgl_scan(p, g, x_grid) for p in p_values]
    lines = [f"p={r.p:g}: min second difference {r.min_second_difference:.3e} "
             f"{'convex' if r.convex else 'NOT convex'}" for r in results]
    report = {"scans": [r.model_dump() for r in results]}
    if p_concavity:
        diag = sequences.gmgl_p_concavity(g, x_grid, p_values)
        report["p_concavity"] = diag.model_dump()
        lines.append(f"max second p-difference {diag.max_second_p_difference:.3e} "
                     f"({'concave' if diag.concave else 'not concave'} in p)")
    rows = [[r.p, r.min_second_difference, r.convex] for r in results]
    finish(run, "mgl", report, "\n".join(lines), [("mgl.csv", ["p", "min_second_difference", "convex"], rows)],
           sum(not r.convex for r in results))


@click.command()
@click.option("--graph", "graph_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Vertex count, then one 'u v' edge per line.")
@click.option("--complete", type=int, default=None, help="Complete graph K_n.")
@click.option("--path", "path_n", type=int, default=None, help="Path on n vertices.")
@click.option("--cycle", type=int, default=None, help="Cycle on n vertices.")
@click.option("--q", "qs", default=None, help="Evaluate χ_G at these q.")
@output_options
@handles_errors
def chromatic(graph_path, complete, path_n, cycle, qs, formats, out_dir, no_timestamp):
    """Chromatic polynomial by deletion-contraction, with Read's log-concavity check."""
    chosen = [x for x in (graph_path, complete, path_n, cycle) if x is not None]
    if len(chosen) != 1:
        raise CommandError("give exactly one of --graph, --complete, --path, --cycle")
    if graph_path is not None:
        graph = inputs.load_graph(graph_path)
    elif complete is not None:
        graph = Graph.complete(complete)
    elif path_n is not None:
        graph = Graph.path(path_n)
    else:
        graph = Graph.cycle(cycle)
    run = run_config("chromatic", formats, out_dir, no_timestamp, [graph_path] if graph_path else (),
                     vertices=graph.vertex_count, edges=sorted(graph.edges))
    coeffs = sequences.chromatic_polynomial(graph)
    profile = sequences.sequence_profile([abs(c) for c in coeffs if c != 0])
    terms = " + ".join(f"{c}*q^{k}" for k, c in enumerate(coeffs) if c) or "0"
    lines = [f"chi(q) = {terms}", f"|coefficients| log-concave: {str(profile.log_concave).lower()}"]
    evaluations = []
    if qs:
        for q in parse_range(qs):
            if q != int(q):
                raise CommandError(f"q must be an integer, got {q}")
            evaluations.append([int(q), sequences.evaluate_polynomial(coeffs, int(q))])
        lines.extend(f"chi({q}) = {v}" for q, v in evaluations)
    report = {"vertices": graph.vertex_count, "edges": graph.edge_count, "coefficients": coeffs,
              "log_concave": profile.log_concave, "evaluations": evaluations}
    finish(run, "chromatic", report, "\n".join(lines),
           [("chromatic.csv", ["power", "coefficient"], list(enumerate(coeffs)))],
           int(not profile.log_concave))


@click.command()
@click.argument("values")
@click.option("--reciprocal", is_flag=True, help="Compare log-convexity with log-concavity of 1/a_i.")
@output_options
@handles_errors
def seq(values, reciprocal, formats, out_dir, no_timestamp):
    """Log-concavity and log-convexity of a sequence such as '1,3,2' or '1 1/2 1/3'."""
    parsed = inputs.parse_sequence(values)
    run = run_config("seq", formats, out_dir, no_timestamp, values=[str(v) for v in parsed])
    if reciprocal:
        report = monotonicity.reciprocal_profile(parsed)
        lines = [
            f"log-convex: {str(report.sequence.log_convex).lower()}",
            f"reciprocals log-concave: {str(report.reciprocal.log_concave).lower()}",
            f"implication holds: {str(report.implication_holds).lower()}",
        ]
    else:
        report = sequences.sequence_profile(parsed)
        lines = [
            f"log-concave: {str(report.log_concave).lower()}",
            f"log-convex: {str(report.log_convex).lower()}",
            "margins: " + " ".join(f"{m:g}" for m in report.margins),
        ]
    finish(run, "seq", report, "\n".join(lines))


commands = [mgl, chromatic, seq]
