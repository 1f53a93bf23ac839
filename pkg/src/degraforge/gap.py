"""Upper-bound gap analysis: per-case PSNR deltas of a method vs its upper bound.

Consumes the CSV schema emitted by ``metrics`` (hand-entered tables in the
same schema work too) and reports delta = upper - method per shared case,
plus a summary (max delta, mean delta, argmax case).  Deltas are never
clamped: a method beating its upper bound yields a negative delta.
"""

from __future__ import annotations

import csv
import io as _io
from dataclasses import dataclass
from pathlib import Path
import numpy as np

from .core import DegraforgeError
from .metrics import MetricTable


class GapError(DegraforgeError):
    """Raised when the two tables share no case names."""


@dataclass(frozen=True)
class GapRow:
    case: str
    method_psnr: float
    upper_psnr: float
    delta: float


@dataclass(frozen=True)
class GapTable:
    rows: tuple
    uncompared: tuple = ()  # case names present in only one input

    @property
    def mean_delta(self) -> float:
        return float(np.mean([r.delta for r in self.rows]))

    @property
    def max_delta(self) -> float:
        return max(r.delta for r in self.rows)

    @property
    def argmax_case(self) -> str:
        return max(self.rows, key=lambda r: r.delta).case


def _as_psnr_map(table) -> dict:
    if isinstance(table, MetricTable):
        return {c.case: float(c.psnr_mean) for c in table.cases}
    return {str(k): float(v) for k, v in dict(table).items()}


def compute_gap(method, upper) -> GapTable:
    """Per-case subtraction upper - method over the shared case names.

    Accepts MetricTable instances or plain case->psnr mappings; row order
    follows the method table.
    """
    method_map = _as_psnr_map(method)
    upper_map = _as_psnr_map(upper)
    shared = [case for case in method_map if case in upper_map]
    if not shared:
        raise GapError(
            f"no shared cases between method ({sorted(method_map)}) and upper ({sorted(upper_map)})"
        )
    rows = tuple(
        GapRow(case, method_map[case], upper_map[case], upper_map[case] - method_map[case])
        for case in shared
    )
    uncompared = tuple(sorted((set(method_map) | set(upper_map)) - set(shared)))
    return GapTable(rows=rows, uncompared=uncompared)


def render_gap_csv(gap: GapTable) -> str:
    """Data rows (case, method_psnr, upper_psnr, delta) plus one summary row."""
    out = _io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["case", "method_psnr", "upper_psnr", "delta"])
    for r in gap.rows:
        writer.writerow([r.case, repr(r.method_psnr), repr(r.upper_psnr), repr(r.delta)])
    writer.writerow([
        "summary",
        f"max_delta={gap.max_delta:.9g}",
        f"mean_delta={gap.mean_delta:.9g}",
        f"argmax={gap.argmax_case}",
    ])
    return out.getvalue()


def parse_gap_csv(text: str) -> GapTable:
    rows = list(csv.reader(_io.StringIO(text)))
    data = []
    for row in rows[1:]:
        if not row or row[0] == "summary":
            continue
        data.append(GapRow(row[0], float(row[1]), float(row[2]), float(row[3])))
    if not data:
        raise GapError("gap CSV contains no data rows")
    return GapTable(rows=tuple(data))


def render_gap_markdown(gap: GapTable) -> str:
    lines = [
        "| case | method | upper bound | delta |",
        "|---|---|---|---|",
    ]
    for r in gap.rows:
        lines.append(f"| {r.case} | {r.method_psnr:.2f} | {r.upper_psnr:.2f} | {r.delta:.2f} |")
    lines.append(
        f"\nmax delta {gap.max_delta:.2f} dB on case `{gap.argmax_case}`;"
        f" mean delta {gap.mean_delta:.2f} dB."
    )
    if gap.uncompared:
        lines.append(f"uncompared cases: {', '.join(gap.uncompared)}")
    return "\n".join(lines) + "\n"


def load_psnr_table(path) -> MetricTable:
    """Read a metrics CSV (psnr_mean required, other columns optional)."""
    return MetricTable.read_csv(Path(path))
