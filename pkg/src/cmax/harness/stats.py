"""Summary statistics over trial batches and their CSV form."""

from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass
from typing import Iterable

from cmax.loop import TrialRecord

CSV_COLUMNS = ("algorithm", "condition", "n", "success_rate", "mean_steps", "stderr_steps")


@dataclass
class SummaryRow:
    algorithm: str
    condition: str
    n: int
    success_rate: float
    mean_steps: float | None
    stderr_steps: float | None

    def as_csv_row(self) -> list:
        fmt = lambda x: "" if x is None else f"{x:.6g}"
        return [self.algorithm, self.condition, self.n, f"{self.success_rate:.6g}",
                fmt(self.mean_steps), fmt(self.stderr_steps)]


def summarize(records: Iterable[TrialRecord], algorithm: str = "", condition: str = "") -> SummaryRow:
    """Success rate over all trials; step mean and standard error over successes only."""
    records = list(records)
    if not records:
        raise ValueError("cannot summarize an empty batch")
    steps = [r.steps for r in records if r.reached_goal]
    rate = len(steps) / len(records)
    if not steps:
        return SummaryRow(algorithm, condition, len(records), 0.0, None, None)
    mean = statistics.fmean(steps)
    se = statistics.stdev(steps) / math.sqrt(len(steps)) if len(steps) > 1 else 0.0
    return SummaryRow(algorithm, condition, len(records), rate, mean, se)


def rows_to_csv(rows: Iterable[SummaryRow], extra: dict | None = None) -> str:
    """CSV text with the fixed header; ``extra`` maps column name to per-row values."""
    rows = list(rows)
    extra = extra or {}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*CSV_COLUMNS, *extra])
    for i, row in enumerate(rows):
        w.writerow([*row.as_csv_row(), *(vals[i] for vals in extra.values())])
    return buf.getvalue()
