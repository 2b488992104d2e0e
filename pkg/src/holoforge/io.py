"""Run configuration, grid parsing, exit codes and report files."""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    CapacityError,
    ContractionError,
    GeometryError,
    HoloforgeError,
    NotAvailableError,
    NotFoundError,
    ParseError,
    VerificationError,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_CODES = (
    (ParseError, 3),
    (CapacityError, 4),
    (GeometryError, 5),
    (VerificationError, 6),
    (NotFoundError, 7),
    (NotAvailableError, 8),
    (ContractionError, 9),
)


def exit_code(exc: BaseException) -> int:
    for cls, code in EXIT_CODES:
        if isinstance(exc, cls):
            return code
    return EXIT_ERROR if isinstance(exc, HoloforgeError) else EXIT_USAGE


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` with ``stop`` included, or a comma list."""
    text = text.strip()
    if not text:
        raise ValueError("empty p grid")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be start:stop:step, got {text!r}")
        start, stop, step = (float(t) for t in parts)
        if step <= 0:
            raise ValueError("grid step must be positive")
        if stop < start:
            raise ValueError("grid stop is below start")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        grid = [round(start + i * step, 10) for i in range(count)]
    else:
        grid = sorted(float(t) for t in text.split(",") if t.strip())
    if not grid:
        raise ValueError("empty p grid")
    if grid[0] < 0 or grid[-1] > 1:
        raise ValueError("grid points must lie in [0, 1]")
    return grid


@dataclass
class RunConfig:
    command: str
    spec_paths: list = field(default_factory=list)
    grid: list = field(default_factory=list)
    trials: int = 10000
    rng_seed: int = 0
    criterion: str = "subsystem"
    out_dir: Path = Path("results")
    threads: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if any(not 0 <= p <= 1 for p in self.grid):
            raise ValueError("grid points must lie in [0, 1]")
        self.out_dir = Path(self.out_dir)

    def ensure_out(self) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        if not os.access(self.out_dir, os.W_OK):
            raise PermissionError(f"output directory {self.out_dir} is not writable")
        return self.out_dir


def _rounded(obj, digits: int = 10):
    if isinstance(obj, float):
        return round(obj, digits)
    if isinstance(obj, dict):
        return {k: _rounded(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v, digits) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return round(float(obj), digits)
    return obj


def dumps(obj) -> str:
    """Stable JSON: sorted keys, rounded floats, trailing newline."""
    return json.dumps(_rounded(obj), indent=2, sort_keys=True) + "\n"


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj))
    return path


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.write_text(text)
    return path


def rows_to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.6f}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def table_csv(rows: Sequence[dict]) -> str:
    header = ["code", "p_theory", "p_lower", "p_upper", "p_numeric_subsystem", "p_numeric_subalgebra", "n_layers"]
    out = []
    for r in rows:
        out.append([
            r["code"], r["p_theory"], r["p_lower"], r["p_upper"],
            r.get("p_numeric_subsystem", ""), r.get("p_numeric_subalgebra", ""),
            " ".join(str(n) for n in r["n_layers"]),
        ])
    return rows_to_csv(header, out)


def slug(label: str) -> str:
    return label.replace("/", "-").replace(" ", "_").lower()


def optional_float(v) -> Optional[float]:
    return None if v is None else float(v)
