"""Report persistence: exact number formatting, CSV/JSON grids, atomic writes, run manifests."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from importlib import resources
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DomainError
from .ode import GRID_COLUMNS, GridFunction

__all__ = [
    "fmt",
    "sanitize",
    "dumps",
    "grid_to_csv",
    "grid_from_csv",
    "table_to_csv",
    "atomic_write",
    "sha256_bytes",
    "sha256_file",
    "RunManifest",
    "SCHEMA_FOR_COMMAND",
    "load_schema",
]

SCHEMA_FOR_COMMAND = {
    "solve": "potential_solution",
    "ricci-flat": "ricci_flat_potential",
    "exhaust": "convergence_report",
    "ball": "convergence_report",
    "completeness": "completeness_report",
    "curvature": "curvature_sweep",
    "sweep": "sweep",
    "validate": "validate",
}


def load_schema(name: str) -> dict:
    """A shipped JSON schema by stem, e.g. ``load_schema("manifest")``."""
    ref = resources.files("grauert_tubes").joinpath("schemas", f"{name}.schema.json")
    return json.loads(ref.read_text(encoding="utf-8"))


def fmt(x: float) -> str:
    """17 significant digits, which round-trips every double."""
    return format(float(x), ".17g")


def sanitize(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if hasattr(obj, "tolist"):
        return sanitize(obj.tolist())
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    # json writes floats with repr, the shortest string that round-trips exactly
    return json.dumps(sanitize(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def grid_to_csv(grid: GridFunction, names: Sequence[str] = GRID_COLUMNS) -> str:
    return table_to_csv(names, zip(grid.u, grid.h, grid.h1, grid.h2))


def grid_from_csv(text: str, names: Sequence[str] | None = None) -> GridFunction:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise DomainError("empty CSV")
    names = list(names or header)
    if header != names or len(names) != 4:
        raise DomainError(f"unexpected CSV header {header!r}")
    rows = [[float(x) for x in row] for row in reader if row]
    return GridFunction(*zip(*rows)) if rows else GridFunction([], [], [], [])


def table_to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v) -> str:
    if v is None:
        return ""
    if hasattr(v, "item"):  # numpy scalar
        v = v.item()
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def atomic_write(path: str | Path, data: str | bytes) -> str:
    """Write via a temp file in the target directory and rename; returns the sha256 digest."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = data.encode("utf-8") if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(raw)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return sha256_bytes(raw)


@dataclass
class RunManifest:
    """What ran, with which resolved settings, and what it produced.

    ``started_at``, ``wall_clock_s`` and the per-operation ``elapsed_s``
    are the only fields that vary between identical runs.
    """

    tool_version: str
    command: str
    config: dict
    status: str = "ok"
    operations: list[dict] = field(default_factory=list)
    outputs: dict[str, str] = field(default_factory=dict)  # file name -> sha256
    started_at: str = ""
    wall_clock_s: float = 0.0
    error: dict | None = None

    TIMING_KEYS = ("started_at", "wall_clock_s", "elapsed_s")

    def to_dict(self) -> dict:
        return asdict(self)

    def stable_view(self) -> dict:
        """The manifest with timing fields removed, for determinism comparisons."""

        def strip(obj):
            if isinstance(obj, dict):
                return {k: strip(v) for k, v in obj.items() if k not in self.TIMING_KEYS}
            if isinstance(obj, list):
                return [strip(v) for v in obj]
            return obj

        return strip(sanitize(self.to_dict()))

    def verify(self, directory: str | Path) -> list[str]:
        """Names of listed outputs whose digest no longer matches the file on disk."""
        directory = Path(directory)
        return [name for name, digest in self.outputs.items() if sha256_file(directory / name) != digest]
