"""
Report serialization: versioned JSON envelopes, CSV tables and plot data.

Every file is written to a temporary sibling and renamed into place.
"""
import csv
import hashlib
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, List, Sequence, Tuple

from pydantic import BaseModel

from app.core.exceptions import InvalidInputError
from app.schemas.monotonicity import FlowReport, ScanReport, SignReport
from app.schemas.run import ReportEnvelope, RunConfig

logger = logging.getLogger(__name__)

PLOT_KINDS = ("flow", "sign-table", "scan-heatmap")


def write_atomic(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info("wrote %s", path)
    return path


def _jsonable(report: Any) -> Any:
    if isinstance(report, BaseModel):
        return report.model_dump(mode="json", by_alias=True)
    return report


def render_json(kind: str, report: Any, run: RunConfig) -> str:
    envelope = ReportEnvelope.wrap(kind, _jsonable(report), run)
    data = envelope.model_dump(mode="json", by_alias=True, exclude_none=True)
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_json(path: Path, kind: str, report: Any, run: RunConfig) -> Path:
    return write_atomic(path, render_json(kind, report, run))


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    return write_atomic(path, render_csv(header, rows))


def scan_rows(report: ScanReport) -> Tuple[List[str], List[List[Any]]]:
    header = ["lambda", "d", "t", "order", "value", "sign", "flag"]
    violations = report.violations
    rows = []
    if report.rows:
        rows = [[r.lam, r.d, r.t, r.order, r.value, r.sign, r.flag] for r in report.rows]
        violations = [v for v in violations if v.kind != "sign"]
    rows += [[v.lam, v.d, v.t, v.order, v.value, v.sign, v.kind] for v in violations]
    return header, rows


def sign_rows(report: SignReport) -> Tuple[List[str], List[List[Any]]]:
    header = ["t", "order", "value", "sign"]
    return header, [[report.t, e.order, e.value, e.sign] for e in report.entries]


def flow_rows(report: FlowReport) -> Tuple[List[str], List[List[Any]]]:
    header = ["t", "h", "I"] + [f"dI{n}" for n in range(1, report.max_order + 1)]
    return header, [[r.t, r.entropy, r.fisher, *r.derivatives] for r in report.rows]


def heatmap_rows(report: ScanReport) -> Tuple[List[str], List[List[Any]]]:
    return ["lambda", "d", "minMarginOverT"], [[c.lam, c.d, c.min_margin] for c in report.heatmap]


def _plot_table(report: Any, kind: str):
    if kind == "flow" and isinstance(report, FlowReport):
        return flow_rows(report)
    if kind == "sign-table" and isinstance(report, SignReport):
        return sign_rows(report)
    if kind == "scan-heatmap" and isinstance(report, ScanReport):
        return heatmap_rows(report)
    raise InvalidInputError(
        f"unsupported plot kind '{kind}' for {type(report).__name__} (supported: {', '.join(PLOT_KINDS)})"
    )


_SCRIPT = """\
import matplotlib.pyplot as plt
import pandas as pd

data = pd.read_csv("{csv}")
{body}
plt.savefig("{stem}.png", dpi=150)
"""

_SCRIPT_BODIES = {
    "flow": "data.plot(x='t', logx=True, subplots=True, figsize=(6, 10))",
    "sign-table": "data.plot.bar(x='order', y='value', logy=False)",
    "scan-heatmap": "plt.imshow(data.pivot(index='lambda', columns='d', values='minMarginOverT'), aspect='auto')",
}


def emit_plot_data(report: Any, kind: str, out_dir: Path, script: bool = False) -> List[Path]:
    """Write `<kind>-<hash>.csv` (plus a plotting script that only reads that CSV)."""
    header, rows = _plot_table(report, kind)
    text = render_csv(header, rows)
    digest = hashlib.sha1(text.encode("utf-8")).hexdigest()[:10]
    stem = f"{kind}-{digest}"
    paths = [write_atomic(Path(out_dir) / f"{stem}.csv", text)]
    if script:
        source = _SCRIPT.format(csv=f"{stem}.csv", stem=stem, body=_SCRIPT_BODIES[kind])
        paths.append(write_atomic(Path(out_dir) / f"{stem}.py", source))
    return paths
