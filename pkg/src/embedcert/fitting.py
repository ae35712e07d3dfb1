"""Log-log least-squares fits of area against size, and the measurement CSV format."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

CSV_COLUMNS = ("family", "k", "N", "n", "wordLength", "area", "maxIntermediateLength", "wallMillis")


@dataclass(frozen=True)
class FitReport:
    family: str
    points: int
    slope: float
    intercept: float
    r2: float
    window: tuple

    def predict(self, n):
        return float(np.exp(self.intercept) * n ** self.slope)


def loglog_fit(ns, areas, family: str = "", window=None) -> FitReport:
    """OLS of ``log area`` on ``log n`` over points with ``n, area > 0`` inside ``window``."""
    pts = [(n, a) for n, a in zip(ns, areas) if n > 0 and a > 0
           and (window is None or window[0] <= n <= window[1])]
    if len(pts) < 2:
        raise ValueError("need at least two positive points to fit")
    x = np.log(np.array([p[0] for p in pts], dtype=float))
    y = np.log(np.array([p[1] for p in pts], dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    lo, hi = min(p[0] for p in pts), max(p[0] for p in pts)
    return FitReport(family, len(pts), float(slope), float(intercept), r2, (lo, hi))


def rows_to_csv(rows) -> str:
    """Rows are mappings keyed by ``CSV_COLUMNS``; missing or None cells are written empty."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(CSV_COLUMNS)
    for r in rows:
        wr.writerow(["" if r.get(c) is None else r[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def csv_to_rows(text: str) -> list:
    out = []
    for r in csv.DictReader(io.StringIO(text)):
        row = dict(r)
        for c in ("k", "N", "n", "wordLength", "area", "maxIntermediateLength"):
            row[c] = int(row[c]) if row[c] != "" else None
        row["wallMillis"] = float(row["wallMillis"]) if row["wallMillis"] else None
        out.append(row)
    return out


def fit_rows(rows, family: str, window=None) -> FitReport:
    sel = [r for r in rows if r["family"] == family]
    return loglog_fit([r["n"] for r in sel], [r["area"] for r in sel], family, window)
