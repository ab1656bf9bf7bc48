"""Stream CSV ingestion and report files.

Streams are long-format CSV with a required header ``day,bin_index,value``,
one row per (day, bin). Released histograms are written in the same schema,
with floats in shortest round-trip form, so ``parse_stream_csv`` reads them
back exactly.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import os
from pathlib import Path
from typing import Dict, Iterable, Optional, Sequence

import numpy as np

from .core import BIN_WIDTH_MINUTES, DayHistogram, StreamPrefix, validate_stream
from .errors import IoError, ParseError, RaggedBins

HEADER = ("day", "bin_index", "value")


def parse_stream_csv(path, bin_width_minutes: int = BIN_WIDTH_MINUTES, *, allow_negative: bool = False) -> StreamPrefix:
    """Read and validate a stream CSV.

    Row order does not matter. Line numbers in :class:`ParseError` count the
    header as line 1. A day lacking a bin that other days have raises
    :class:`RaggedBins` for that day. ``allow_negative`` accepts negative
    values, as found in released output.
    """
    cells: Dict[int, Dict[int, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip().lower() for h in header) != HEADER:
            raise ParseError(1, "header must be 'day,bin_index,value'")
        for row in reader:
            line = reader.line_num
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise ParseError(line, f"expected 3 fields, got {len(row)}")
            try:
                day, idx, value = int(row[0]), int(row[1]), float(row[2])
            except ValueError:
                raise ParseError(line, f"non-numeric field in {row!r}") from None
            if day < 1 or idx < 0:
                raise ParseError(line, "day must be >= 1 and bin_index >= 0")
            if not math.isfinite(value):
                raise ParseError(line, "value must be finite")
            bins = cells.setdefault(day, {})
            if idx in bins:
                raise ParseError(line, f"duplicate row for day {day}, bin {idx}")
            bins[idx] = value

    if not cells:
        return StreamPrefix(())
    n_bins = max(max(b) for b in cells.values()) + 1
    histograms = []
    for day in sorted(cells):
        bins = cells[day]
        if len(bins) != n_bins:
            raise RaggedBins(day, f"day {day} has {len(bins)} of {n_bins} bins")
        histograms.append(DayHistogram(day, [bins[i] for i in range(n_bins)], bin_width_minutes))
    return validate_stream(StreamPrefix(tuple(histograms)), allow_negative=allow_negative)


def write_stream_csv(histograms: Iterable, path) -> Path:
    """Write histograms (or records, whose ``released`` is used) in stream CSV form."""
    path = Path(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(HEADER)
            for item in histograms:
                h = getattr(item, "released", item)
                for i, v in enumerate(h.bins.tolist()):
                    writer.writerow((h.day, i, repr(v)))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return path


def write_json(data, path) -> Path:
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(data, fh, indent=2, sort_keys=True, allow_nan=False)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return path


def write_sweep_dat(rows: Sequence[Sequence[float]], path, x_label: str = "x") -> Path:
    """Whitespace-separated ``x MAE MRE`` columns with a ``#`` header line."""
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# {x_label} MAE MRE\n")
            for x, m_abs, m_rel in rows:
                fh.write(f"{x!r} {float(m_abs)!r} {float(m_rel)!r}\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return path


def read_sweep_dat(path) -> np.ndarray:
    """(points, 3) array from a file written by :func:`write_sweep_dat`."""
    return np.loadtxt(path, comments="#", ndmin=2)


def ensure_dir(path) -> Path:
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {path}: {exc}") from exc
    if not os.access(path, os.W_OK):
        raise IoError(f"{path} is not writable")
    return path


def emit_report(
    report,
    records: Sequence,
    out_dir,
    config=None,
    *,
    sweep_rows: Optional[Sequence[Sequence[float]]] = None,
    sweep_label: str = "x",
    extra: Optional[dict] = None,
) -> Dict[str, Path]:
    """Write ``released.csv`` and ``metrics.json`` (plus ``sweep.dat`` when
    ``sweep_rows`` is given) into ``out_dir``; returns the paths by name.

    ``metrics.json`` embeds the fully resolved ``config`` (dotted keys) and
    its seed.
    """
    from .config import config_to_flat

    out = ensure_dir(out_dir)
    metrics = report.to_dict()
    if config is not None:
        resolved = dataclasses.replace(config, allocation=config.allocation_params())
        metrics["config"] = config_to_flat(resolved)
        metrics["seed"] = config.seed
    if extra:
        metrics.update(extra)
    paths = {
        "released": write_stream_csv(records, out / "released.csv"),
        "metrics": write_json(metrics, out / "metrics.json"),
    }
    if sweep_rows is not None:
        paths["sweep"] = write_sweep_dat(sweep_rows, out / "sweep.dat", sweep_label)
    return paths
