"""Readers for the simulator's CSV and JSON artifact formats.

The CSV files start with `# key=value` comment rows (seed, model
parameters, sampling interval), then one header row, then numeric rows.
Readers validate the header against the expected schema and report the
offending columns, so a file fed to the wrong figure kind fails loudly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["SchemaError", "Table", "read_table", "require_columns",
           "read_limit_json", "k_row_from_limit"]


class SchemaError(ValueError):
    """An input file does not match the expected column schema."""


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    data: np.ndarray
    meta: dict[str, str]
    path: Path

    def column(self, name: str) -> np.ndarray:
        try:
            return self.data[:, self.columns.index(name)]
        except ValueError:
            raise SchemaError(f"{self.path}: missing column {name!r}; "
                              f"have {list(self.columns)}") from None

    def meta_float(self, key: str, fallback: float | None = None) -> float:
        if key in self.meta:
            return float(self.meta[key])
        if fallback is None:
            raise SchemaError(f"{self.path}: missing `# {key}=...` metadata row")
        return fallback


def read_table(path) -> Table:
    path = Path(path)
    meta: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[list[float]] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if "=" in body:
                    key, value = body.split("=", 1)
                    meta[key.strip()] = value.strip()
                continue
            if header is None:
                header = [c.strip() for c in line.split(",")]
                continue
            try:
                rows.append([float(x) for x in line.split(",")])
            except ValueError as exc:
                raise SchemaError(f"{path}: non-numeric data row {line!r}") from exc
    if header is None or not rows:
        raise SchemaError(f"{path}: no header or no data rows")
    data = np.asarray(rows, dtype=float)
    if data.shape[1] != len(header):
        raise SchemaError(f"{path}: {len(header)} header columns but "
                          f"{data.shape[1]} data columns")
    return Table(columns=tuple(header), data=data, meta=meta, path=path)


def require_columns(table: Table, expected: list[str]) -> None:
    missing = [c for c in expected if c not in table.columns]
    if missing:
        raise SchemaError(f"{table.path}: missing columns {missing}; "
                          f"have {list(table.columns)}")


def read_limit_json(path) -> dict:
    path = Path(path)
    with open(path) as fh:
        doc = json.load(fh)
    for key in ("params", "moments"):
        if key not in doc:
            raise SchemaError(f"{path}: missing top-level key {key!r}")
    return doc


def k_row_from_limit(doc: dict) -> np.ndarray:
    """First row of the distance-coupling kernel from a limit-law document.

    The distance block of the limit covariance is sigma^2 / (2 alpha^2 beta)
    times the kernel, so the kernel row is recovered by undoing that scale.
    """
    params = doc["params"]
    n = int(params["n_agents"])
    sigma = float(params["sigma"])
    alpha = float(params["alpha"])
    beta = float(params["beta"])
    if sigma <= 0:
        raise SchemaError("cannot rescale the covariance of a noise-free law "
                          "(sigma = 0)")
    mean = np.asarray(doc["moments"]["mean"], dtype=float)
    cov = np.asarray(doc["moments"]["cov"], dtype=float).reshape(mean.size, mean.size)
    scale = sigma**2 / (2.0 * alpha**2 * beta)
    return cov[0, :n] / scale
