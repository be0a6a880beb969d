"""CSV serialization of samples and experiment records.

Samples are headerless CSV, one point per row, columns = coordinates,
written with 17 significant digits so a write/read round trip is bitwise
exact.
"""

from __future__ import annotations

import csv
import io
from dataclasses import fields
from pathlib import Path

import numpy as np

from .transport import Sample

__all__ = ["read_sample", "write_sample", "write_records_csv"]

FLOAT_FMT = "%.17g"


def read_sample(path, header: bool = False) -> Sample:
    """Parse a sample file; raises ValueError on malformed content."""
    text = Path(path).read_text()
    rows = []
    width = None
    reader = csv.reader(io.StringIO(text))
    for i, row in enumerate(reader):
        if header and i == 0:
            continue
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        vals = [float(tok) for tok in row]
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise ValueError(
                f"{path}: row {i + 1} has {len(vals)} columns, expected {width}"
            )
        rows.append(vals)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return Sample(np.asarray(rows, dtype=float))


def write_sample(sample: Sample, path) -> None:
    np.savetxt(path, sample.points, fmt=FLOAT_FMT, delimiter=",")


def _format_value(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return FLOAT_FMT % v
    if v is None:
        return ""
    return str(v)


def write_records_csv(records, path, fieldnames=None) -> None:
    """One CSV row per dataclass record, in the given order (byte-stable).

    ``fieldnames`` keeps the header when there are no records.
    """
    if not records and fieldnames is None:
        Path(path).write_text("")
        return
    names = list(fieldnames) if fieldnames else [f.name for f in fields(records[0])]
    lines = [",".join(names)]
    for rec in records:
        lines.append(",".join(_format_value(getattr(rec, n)) for n in names))
    Path(path).write_text("\n".join(lines) + "\n")
