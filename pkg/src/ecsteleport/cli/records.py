"""Result records: hashed payloads, persistence and plot-series export."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import math
from pathlib import Path

import yaml

from .. import __version__
from .config import config_hash

UNHASHED_KEYS = ("timestamp", "payload_sha256")


class SeriesError(KeyError):
    """Requested plot series is absent from the record."""


def _clean(obj):
    """JSON-safe copy: tuples become lists, non-finite floats become null."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return _clean(obj.item())
    return obj


def make_series(columns: list[str], units: list[str], rows: list[list]) -> dict:
    if len(columns) != len(units):
        raise ValueError("every column needs a unit")
    return {"columns": list(columns), "units": list(units), "rows": [list(r) for r in rows]}


def make_record(cfg: dict, outputs: dict, series: dict, diagnostics: dict, constants_version: int) -> dict:
    record = {
        "config": cfg,
        "config_hash": config_hash(cfg),
        "version": __version__,
        "constants_version": constants_version,
        "outputs": outputs,
        "series": series,
        "diagnostics": diagnostics,
    }
    record = _clean(record)
    record["payload_sha256"] = hashlib.sha256(payload_bytes(record)).hexdigest()
    record["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return record


def payload_bytes(record: dict) -> bytes:
    """Canonical bytes of everything but the timestamp, the digest itself and
    the output destination (where a record is written does not change it)."""
    hashed = {k: v for k, v in record.items() if k not in UNHASHED_KEYS}
    if isinstance(hashed.get("config"), dict):
        hashed["config"] = {k: v for k, v in hashed["config"].items() if k != "output"}
    return json.dumps(hashed, sort_keys=True, separators=(",", ":"), allow_nan=False).encode()


def write_record(record: dict, path: str | Path, fmt: str = "json") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path.write_text(json.dumps(record, sort_keys=True, indent=2, allow_nan=False) + "\n")
    elif fmt == "yaml":
        path.write_text(yaml.safe_dump(record, sort_keys=True))
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    return path


def read_record(path: str | Path) -> dict:
    text = Path(path).read_text()
    if str(path).endswith((".yaml", ".yml")):
        return yaml.safe_load(text)
    return json.loads(text)


def emit_plot_data(record: dict, series: str, delimiter: str = ",") -> str:
    """Delimited text for one series; the header carries ``name [unit]``."""
    if not series:
        raise SeriesError("no series selected")
    available = record.get("series") or {}
    if series not in available:
        raise SeriesError(f"record has no series {series!r}; available: {sorted(available)}")
    s = available[series]
    if len(s["columns"]) < 2:
        raise SeriesError(f"series {series!r} has fewer than two columns")
    header = delimiter.join(f"{c} [{u}]" for c, u in zip(s["columns"], s["units"]))
    lines = [header]
    for row in s["rows"]:
        lines.append(delimiter.join("nan" if v is None else (repr(v) if isinstance(v, float) else str(v)) for v in row))
    return "\n".join(lines) + "\n"
