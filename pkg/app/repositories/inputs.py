"""
Loaders for the plain-text input formats: mixture specs, density grids,
Laplace measures, graphs and number sequences.
"""
import csv
import logging
from fractions import Fraction
from pathlib import Path
from typing import Iterator, List, Tuple, Union

import numpy as np

from app.core.exceptions import InvalidInputError
from app.models.density import DensityGrid, GaussianMixture
from app.models.graph import Graph
from app.models.laplace import LaplaceMeasure

logger = logging.getLogger(__name__)

GRID_SPACING_TOLERANCE = 1e-9


def _content_lines(text: str) -> Iterator[Tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _read(path: Union[str, Path]) -> str:
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"input file not found: {path}")
    return path.read_text(encoding="utf-8")


def parse_mixture(text: str) -> GaussianMixture:
    """One component per line: `weight mean variance`."""
    components = []
    for lineno, line in _content_lines(text):
        parts = line.replace(",", " ").split()
        if len(parts) != 3:
            raise InvalidInputError(f"line {lineno}: expected 'weight mean variance', got '{line}'")
        try:
            components.append(tuple(float(p) for p in parts))
        except ValueError as exc:
            raise InvalidInputError(f"line {lineno}: non-numeric component '{line}'") from exc
    return GaussianMixture(components)


def load_mixture(path: Union[str, Path]) -> GaussianMixture:
    mixture = parse_mixture(_read(path))
    logger.info("loaded mixture with %d components from %s", len(mixture), path)
    return mixture


def _two_columns(text: str, names: Tuple[str, str]) -> Tuple[np.ndarray, np.ndarray]:
    xs, ys = [], []
    for row_no, row in enumerate(csv.reader(text.splitlines()), start=1):
        if not row or row[0].strip().startswith("#"):
            continue
        if len(row) != 2:
            raise InvalidInputError(f"row {row_no}: expected two columns {names[0]},{names[1]}")
        try:
            x, y = float(row[0]), float(row[1])
        except ValueError:
            if row_no == 1:
                continue  # header
            raise InvalidInputError(f"row {row_no}: non-numeric values {row}")
        xs.append(x)
        ys.append(y)
    return np.array(xs), np.array(ys)


def parse_grid_csv(text: str) -> DensityGrid:
    """Two-column CSV `y,f` on a uniform grid."""
    ys, fs = _two_columns(text, ("y", "f"))
    if ys.size < 3:
        raise InvalidInputError("a density grid needs at least 3 samples")
    steps = np.diff(ys)
    spacing = float(steps.mean())
    if np.any(np.abs(steps - spacing) > GRID_SPACING_TOLERANCE * max(1.0, abs(spacing))):
        raise InvalidInputError("density grid must be uniformly spaced")
    return DensityGrid(float(ys[0]), spacing, fs)


def load_grid_csv(path: Union[str, Path]) -> DensityGrid:
    return parse_grid_csv(_read(path))


def load_measure_csv(path: Union[str, Path], atoms=()) -> LaplaceMeasure:
    """Two-column CSV `x,density` for the absolutely continuous part of a measure on [0, ∞)."""
    xs, ds = _two_columns(_read(path), ("x", "density"))
    return LaplaceMeasure(xs, ds, atoms)


def parse_graph(text: str) -> Graph:
    """Vertex count on the first line, then one 0-indexed `u v` edge per line."""
    lines = list(_content_lines(text))
    if not lines:
        raise InvalidInputError("graph input is empty")
    try:
        vertex_count = int(lines[0][1])
        edges = []
        for lineno, line in lines[1:]:
            parts = line.split()
            if len(parts) != 2:
                raise InvalidInputError(f"line {lineno}: expected 'u v', got '{line}'")
            edges.append((int(parts[0]), int(parts[1])))
    except InvalidInputError:
        raise
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse graph: {exc}") from exc
    return Graph(vertex_count, edges)


def load_graph(path: Union[str, Path]) -> Graph:
    return parse_graph(_read(path))


def parse_sequence(text: str) -> List[Fraction]:
    """Comma or whitespace separated numbers, read as exact rationals (`1/3`, `0.25`, `7`)."""
    parts = [p for p in text.replace(",", " ").split() if p]
    if not parts:
        raise InvalidInputError("sequence is empty")
    try:
        return [Fraction(p) for p in parts]
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInputError(f"cannot parse sequence '{text}'") from exc
