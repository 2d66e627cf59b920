"""CSV serialisation of curves, surfaces, moment series and histograms.

Every file has one header line ``# key=value key=value ...`` followed by a
column-name line and comma-separated rows.  Floats are written with 17
significant digits, so reading a file back recovers the values bit for bit.
"""

from __future__ import annotations

import csv
import io

import numpy as np

__all__ = ["format_float", "write_table", "read_table", "curve_rows", "surface_rows",
           "moment_rows", "covariance_rows", "histogram_rows"]


def format_float(v) -> str:
    if isinstance(v, (int, np.integer)) or isinstance(v, str):
        return str(v)
    return f"{float(v):.16e}"


def _meta_text(meta: dict) -> str:
    parts = []
    for k, v in meta.items():
        v = format_float(v) if isinstance(v, float) else str(v)
        parts.append(f"{k}={v.replace(' ', '_')}")
    return "# " + " ".join(parts)


def write_table(stream, columns, rows, meta: dict) -> None:
    """Write the header, the column names and ``rows`` to a text stream."""
    stream.write(_meta_text(meta) + "\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_float(v) for v in row])


def read_table(text: str):
    """Parse a table written by :func:`write_table`.

    Returns ``(meta, columns, rows)``; numeric cells become floats, the
    ``steady`` tag stays a string.
    """
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError("missing '#' header line")
    meta = dict(item.split("=", 1) for item in lines[0][1:].split())
    reader = csv.reader(io.StringIO("\n".join(lines[1:])))
    columns = next(reader)
    rows = []
    for r in reader:
        rows.append([_cell(v) for v in r])
    return meta, columns, rows


def _cell(v: str):
    try:
        return float(v)
    except ValueError:
        return v


def curve_rows(curve):
    return ["x", "f"], zip(curve.x, curve.f)


def surface_rows(surface):
    g1, g2 = np.meshgrid(surface.x1, surface.x2, indexing="ij")
    return ["x1", "x2", "f"], zip(g1.ravel(), g2.ravel(), surface.values.ravel())


def moment_rows(series):
    rows = [(int(n), m, s) for n, m, s in series.entries]
    rows.append(("steady", series.steady_mean, series.steady_std))
    return ["n", "mean", "std"], rows


def covariance_rows(surface):
    rows = []
    for i, n1 in enumerate(surface.periods):
        for j, n2 in enumerate(surface.periods):
            rows.append((int(n1), int(n2), surface.gamma[i, j], surface.cov[i, j]))
    return ["n1", "n2", "gamma", "cov"], rows


def histogram_rows(histograms):
    """``histograms`` maps a period (or ``"steady"``) to an EmpiricalDensity."""
    rows = []
    for n, h in histograms.items():
        for lo, hi, f, se in zip(h.bin_edges[:-1], h.bin_edges[1:], h.heights, h.standard_errors):
            rows.append((n, lo, hi, f, se))
    return ["n", "bin_lo", "bin_hi", "height", "stderr"], rows
