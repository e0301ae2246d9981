import csv
import io
import os
import sys
from typing import Iterable, Optional, Sequence

from loguru import logger

from engine_utils.directory_info import DirectoryInfo


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(value) for value in row])
    return buffer.getvalue()


def write_csv(path: Optional[str], header: Sequence[str], rows: Iterable[Sequence]):
    """Write to path, or to stdout when path is None."""
    text = render_csv(header, rows)
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = DirectoryInfo.resolve_path(path)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info(f"Wrote {path}")
