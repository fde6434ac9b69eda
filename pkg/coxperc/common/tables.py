import csv
import io
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = ("format_cell", "write_rows")

Target = Union[str, Path, io.TextIOBase]


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_rows(
    target: Target, header: Sequence[str], rows: Iterable[Sequence]
) -> None:
    """Write a CSV table; floats are written with ``repr``."""
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="") as fp:
            write_rows(fp, header, rows)
        return
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
