"""File output and ingestion shared by reports and the command line.

All writers are atomic (temp file in the destination directory, then rename)
so a crashed run never leaves a truncated artifact.  CSV files carry their
provenance as leading ``# key = value`` comment lines followed by a plain
header row; JSON files carry the same metadata under a ``metadata`` key.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile


def atomic_write_text(path, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".confbel-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def render_csv(rows: list[dict], metadata: dict | None = None) -> str:
    buf = io.StringIO()
    for key, value in (metadata or {}).items():
        buf.write(f"# {key} = {value}\n")
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def render_json(rows: list[dict], metadata: dict | None = None) -> str:
    return json.dumps({"metadata": metadata or {}, "rows": rows}, indent=2) + "\n"


def write_rows(path, rows: list[dict], metadata: dict | None = None, fmt: str = "csv") -> None:
    if fmt == "csv":
        atomic_write_text(path, render_csv(rows, metadata))
    elif fmt == "json":
        atomic_write_text(path, render_json(rows, metadata))
    else:
        raise ValueError(f"unknown output format {fmt!r}; expected csv or json")


def read_csv(path) -> tuple[dict, list[dict]]:
    """Read a CSV produced by :func:`render_csv` (or any plain CSV).

    Returns (metadata, rows); metadata keys come from leading ``#`` comment
    lines, rows are dicts of strings keyed by the header.
    """
    metadata: dict = {}
    body: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                stripped = line[1:].strip()
                if "=" in stripped:
                    key, _, value = stripped.partition("=")
                    metadata[key.strip()] = value.strip()
                continue
            if line.strip():
                body.append(line)
    rows = list(csv.DictReader(body)) if body else []
    return metadata, rows
