from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
import json
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, Sequence, TextIO, TypeVar

import pandas as pd


T = TypeVar("T")
R = TypeVar("R")

FLOAT_FORMAT = "%.9g"
HEADER_PREFIX = "# "


def parallel_map(func: Callable[[T], R], items: Iterable[T], workers: int | None = 1) -> list[R]:
    """Map func over items, on a process pool when workers > 1; results keep the input order."""
    items = list(items)
    if workers is None or workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, items))
    return [func(item) for item in items]


def table_frame(rows: Sequence[Mapping[str, Any]], sweep_variable: str | None = None) -> pd.DataFrame:
    """Rows as a frame: the sweep variable first and sorted on, then every other column alphabetically."""
    frame = pd.DataFrame(list(rows))
    others = sorted(column for column in frame.columns if column != sweep_variable)
    if sweep_variable is None:
        return frame[others]

    frame = frame[[sweep_variable, *others]]
    return frame.sort_values(sweep_variable, kind="stable").reset_index(drop=True)


def render_table(
    rows: Sequence[Mapping[str, Any]], header: Mapping[str, Any], sweep_variable: str | None = None, fmt: str = "csv"
) -> str:
    """Rows as CSV (9 significant digits, `# key: value` header lines) or as a JSON document.

    Every header value is JSON encoded, so the resolved scenario sits on one line.
    """
    frame = table_frame(rows, sweep_variable)

    if fmt == "json":
        document = {"header": dict(header), "rows": frame.to_dict(orient="records")}
        return json.dumps(document, indent=2, default=str) + "\n"

    lines = [f"{HEADER_PREFIX}{key}: {json.dumps(value, default=str)}\n" for key, value in header.items()]
    return "".join(lines) + frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def write_table(
    rows: Sequence[Mapping[str, Any]],
    target: str | Path | TextIO,
    header: Mapping[str, Any],
    sweep_variable: str | None = None,
    fmt: str = "csv",
) -> str | Path | TextIO:
    """Render rows and write them to a path (parents created) or an open text stream."""
    text = render_table(rows, header, sweep_variable, fmt)

    if hasattr(target, "write"):
        target.write(text)
        return target

    path = Path(target)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def read_table(path: str | Path) -> tuple[dict[str, Any], pd.DataFrame]:
    """Parse a file written by write_table back into (header, frame)."""
    path = Path(path)
    text = path.read_text()

    if text.lstrip().startswith("{"):
        document = json.loads(text)
        return document["header"], pd.DataFrame(document["rows"])

    header = {}
    for line in text.splitlines():
        if not line.startswith(HEADER_PREFIX):
            break
        key, _, value = line[len(HEADER_PREFIX):].partition(": ")
        header[key] = json.loads(value)

    return header, pd.read_csv(path, comment="#")
