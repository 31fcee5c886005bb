"""CSV and JSON ingestion and emission.

Formats:

- angles: header ``angle`` (optional ``calm`` column), one value per row
- sphere points: header ``x0,...,xm``
- modulation curves: ``n,modulation,se,replicates``
- rejection tables: ``offset,method,n,level,rejections,replicates,rate,se``
- pairwise tables: ``first,second,quantile_p,bootstrap_p,quantile_statistic,bootstrap_statistic``

Curve and table floats carry 9 significant digits; angles and sphere
coordinates are written with ``repr`` so they read back bit-exactly.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import sys
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel

from fss_toolkit.models.dataset import AngleDataset, AngleUnit
from fss_toolkit.models.distribution import parse_spec
from fss_toolkit.models.estimation import ModulationCurve, ModulationEntry
from fss_toolkit.models.geometry import Sample, wrap_angle
from fss_toolkit.models.reports import PairwiseRow, RejectionRow, TestMethod
from fss_toolkit.utils.errors import DataFormatError, FSSValidationError

logger = logging.getLogger("fss_toolkit.dataio")

CURVE_HEADER = ["n", "modulation", "se", "replicates"]
REJECTION_HEADER = ["offset", "method", "n", "level", "rejections", "replicates", "rate", "se"]
PAIRWISE_HEADER = [
    "first",
    "second",
    "quantile_p",
    "bootstrap_p",
    "quantile_statistic",
    "bootstrap_statistic",
]

# Accepted deviation from unit norm for ingested sphere points
SPHERE_NORM_TOL = 1e-6

_CALM_FLAGS = frozenset({"1", "true", "yes", "y", "calm"})


def fmt_float(x: float) -> str:
    return f"{x:.9g}"


# ---------------------------------------------------------------------------
# Low-level CSV helpers
# ---------------------------------------------------------------------------


def _open_rows(path: str | Path) -> tuple[list[str], list[tuple[int, list[str]]]]:
    """Header and (line number, cells) of every non-blank row."""
    p = Path(path)
    if not p.is_file():
        raise FSSValidationError(f"Input file not found: {p}")
    header: list[str] | None = None
    rows: list[tuple[int, list[str]]] = []
    try:
        with p.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            for cells in reader:
                if not cells or all(not c.strip() for c in cells):
                    continue
                if header is None:
                    header = [c.strip() for c in cells]
                    continue
                rows.append((reader.line_num, [c.strip() for c in cells]))
    except UnicodeDecodeError as exc:
        raise DataFormatError(f"{p} is not valid UTF-8 text (byte offset {exc.start})") from exc
    if header is None:
        raise DataFormatError(f"{p} is empty")
    return header, rows


def _parse_float(cell: str, row: int, column: str) -> float:
    if cell == "":
        raise DataFormatError(f"empty {column} cell", row=row)
    try:
        value = float(cell)
    except ValueError:
        raise DataFormatError(f"malformed number {cell!r} in column {column}", row=row) from None
    if not math.isfinite(value):
        raise DataFormatError(f"non-finite value {cell!r} in column {column}", row=row)
    return value


def _parse_int(cell: str, row: int, column: str) -> int:
    try:
        return int(cell)
    except ValueError:
        raise DataFormatError(f"malformed integer {cell!r} in column {column}", row=row) from None


def _require_header(header: list[str], expected: Sequence[str], path: str | Path) -> None:
    if header != list(expected):
        raise DataFormatError(f"{path}: expected header {','.join(expected)}, got {','.join(header)}")


def _render(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_text(text: str, out: str | Path | None) -> None:
    """Write ``text`` to ``out``, or to stdout when ``out`` is None."""
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    Path(out).write_text(text, encoding="utf-8")
    logger.info(f"Wrote {out}")


def to_json(model: BaseModel | Sequence[BaseModel] | dict[str, Any]) -> str:
    """Stable JSON text for a model, a list of models or a plain mapping."""
    if isinstance(model, BaseModel):
        return model.model_dump_json(indent=2) + "\n"
    if isinstance(model, dict):
        return json.dumps(model, indent=2, allow_nan=True) + "\n"
    return json.dumps([m.model_dump(mode="json") for m in model], indent=2) + "\n"


# ---------------------------------------------------------------------------
# Angles and sphere points
# ---------------------------------------------------------------------------


def ingest_angles(path: str | Path, unit: str | AngleUnit) -> AngleDataset:
    """Read an ``angle`` column, convert to radians and wrap into [-pi, pi).

    Rows whose optional ``calm`` column is set are skipped and counted.
    """
    source_unit = unit if isinstance(unit, AngleUnit) else _parse_unit(unit)
    header, rows = _open_rows(path)
    if "angle" not in header:
        raise DataFormatError(f"{path}: missing 'angle' column")
    col = header.index("angle")
    calm_col = header.index("calm") if "calm" in header else None

    angles: list[float] = []
    skipped = 0
    for line, cells in rows:
        if len(cells) != len(header):
            raise DataFormatError(f"expected {len(header)} cells, got {len(cells)}", row=line)
        if calm_col is not None and cells[calm_col].lower() in _CALM_FLAGS:
            skipped += 1
            continue
        value = _parse_float(cells[col], line, "angle")
        if source_unit is AngleUnit.DEGREES:
            # wrapped in degrees: 180 maps exactly to -pi
            value = ((value + 180.0) % 360.0 - 180.0) / 180.0 * math.pi
        angles.append(wrap_angle(value))
    if skipped:
        logger.info(f"Skipped {skipped} calm rows in {path}")
    if not angles:
        raise DataFormatError(f"{path}: no angles")
    return AngleDataset(name=Path(path).stem, angles=angles, source_unit=source_unit, skipped_calm=skipped)


def _parse_unit(flag: str) -> AngleUnit:
    try:
        return AngleUnit.parse(flag)
    except ValueError as e:
        raise FSSValidationError(str(e)) from None


def write_angles(dataset: AngleDataset | Sample) -> str:
    """Normalized radians CSV with header ``angle``."""
    values = dataset.angles if isinstance(dataset, AngleDataset) else [float(a) for a in dataset.points]
    return _render(["angle"], ([repr(float(a))] for a in values))


def ingest_sphere_points(path: str | Path, m: int) -> Sample:
    """Read unit vectors of S^m from columns ``x0,...,xm``."""
    if m < 2:
        raise FSSValidationError("Sphere point files hold S^m data with m >= 2; use angles on S^1")
    header, rows = _open_rows(path)
    _require_header(header, [f"x{i}" for i in range(m + 1)], path)
    points = np.empty((len(rows), m + 1))
    for k, (line, cells) in enumerate(rows):
        if len(cells) != m + 1:
            raise DataFormatError(f"expected {m + 1} coordinates, got {len(cells)}", row=line)
        v = np.array([_parse_float(c, line, f"x{i}") for i, c in enumerate(cells)])
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            raise DataFormatError("zero vector", row=line)
        if abs(norm - 1.0) > SPHERE_NORM_TOL:
            raise DataFormatError(f"vector norm {norm:.9g} is not within {SPHERE_NORM_TOL} of 1", row=line)
        points[k] = v / norm
    if not rows:
        raise DataFormatError(f"{path}: no points")
    return Sample(dim=m, points=points)


def write_sphere_points(sample: Sample) -> str:
    if sample.dim == 1:
        return write_angles(sample)
    header = [f"x{i}" for i in range(sample.dim + 1)]
    return _render(header, ([repr(float(c)) for c in row] for row in sample.points))


def read_sample(path: str | Path, m: int = 1, unit: str | AngleUnit = AngleUnit.RADIANS) -> Sample:
    """Angles (m = 1) or sphere points (m >= 2) as a ``Sample``."""
    if m == 1:
        return ingest_angles(path, unit).to_sample()
    return ingest_sphere_points(path, m)


def read_spec(path: str | Path) -> Any:
    """Distribution spec from a JSON file."""
    p = Path(path)
    if not p.is_file():
        raise FSSValidationError(f"Spec file not found: {p}")
    try:
        text = p.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise DataFormatError(f"{p} is not valid UTF-8 text (byte offset {exc.start})") from exc
    return parse_spec(text)


# ---------------------------------------------------------------------------
# Curves and tables
# ---------------------------------------------------------------------------


def write_curve(curve: ModulationCurve) -> str:
    return _render(
        CURVE_HEADER,
        (
            [str(e.n), fmt_float(e.modulation), fmt_float(e.se), str(e.replicates)]
            for e in curve.entries
        ),
    )


def read_curve(path: str | Path) -> ModulationCurve:
    header, rows = _open_rows(path)
    _require_header(header, CURVE_HEADER, path)
    entries = []
    for line, cells in rows:
        if len(cells) != len(CURVE_HEADER):
            raise DataFormatError(f"expected {len(CURVE_HEADER)} cells, got {len(cells)}", row=line)
        entries.append(
            ModulationEntry(
                n=_parse_int(cells[0], line, "n"),
                modulation=_parse_float(cells[1], line, "modulation"),
                se=_parse_float(cells[2], line, "se"),
                replicates=_parse_int(cells[3], line, "replicates"),
            )
        )
    if not entries:
        raise DataFormatError(f"{path}: empty curve")
    return ModulationCurve(entries=entries)


def write_rejections(rows: Sequence[RejectionRow]) -> str:
    return _render(
        REJECTION_HEADER,
        (
            [
                fmt_float(r.offset),
                r.method.value,
                str(r.n),
                fmt_float(r.level),
                str(r.rejections),
                str(r.replicates),
                fmt_float(r.rate),
                fmt_float(r.se),
            ]
            for r in rows
        ),
    )


def read_rejections(path: str | Path) -> list[RejectionRow]:
    header, rows = _open_rows(path)
    _require_header(header, REJECTION_HEADER, path)
    out = []
    for line, cells in rows:
        if len(cells) != len(REJECTION_HEADER):
            raise DataFormatError(f"expected {len(REJECTION_HEADER)} cells, got {len(cells)}", row=line)
        try:
            method = TestMethod(cells[1])
        except ValueError:
            raise DataFormatError(f"unknown method {cells[1]!r}", row=line) from None
        out.append(
            RejectionRow(
                offset=_parse_float(cells[0], line, "offset"),
                method=method,
                n=_parse_int(cells[2], line, "n"),
                level=_parse_float(cells[3], line, "level"),
                rejections=_parse_int(cells[4], line, "rejections"),
                replicates=_parse_int(cells[5], line, "replicates"),
                rate=_parse_float(cells[6], line, "rate"),
                se=_parse_float(cells[7], line, "se"),
            )
        )
    return out


def write_pairwise(rows: Sequence[PairwiseRow]) -> str:
    return _render(
        PAIRWISE_HEADER,
        (
            [
                r.first,
                r.second,
                fmt_float(r.quantile_p),
                fmt_float(r.bootstrap_p),
                fmt_float(r.quantile_statistic),
                fmt_float(r.bootstrap_statistic),
            ]
            for r in rows
        ),
    )


# ---------------------------------------------------------------------------
# Argument grammars
# ---------------------------------------------------------------------------


def parse_n_grid(text: str) -> list[int]:
    """``a,b,c`` or ``log:a:b:k`` (k log-spaced integers from a to b, deduplicated)."""
    text = text.strip()
    if text.startswith("log:"):
        parts = text[4:].split(":")
        if len(parts) != 3:
            raise ValueError(f"Expected log:a:b:k, got '{text}'")
        a, b, k = (int(p) for p in parts)
        if not 1 <= a <= b or k < 1:
            raise ValueError(f"Need 1 <= a <= b and k >= 1 in '{text}'")
        grid = np.rint(np.geomspace(a, b, k)).astype(int)
        values = sorted({int(v) for v in grid} | {a, b}) if k > 1 else [a]
    else:
        values = sorted({int(p) for p in text.split(",") if p.strip()})
    if not values or values[0] < 1:
        raise ValueError(f"Sample sizes must be positive integers: '{text}'")
    return values


def parse_offsets(text: str) -> list[float]:
    """``p1,p2,...`` or ``lin:a:b:k`` (k evenly spaced offsets in radians)."""
    text = text.strip()
    if text.startswith("lin:"):
        parts = text[4:].split(":")
        if len(parts) != 3:
            raise ValueError(f"Expected lin:a:b:k, got '{text}'")
        a, b = float(parts[0]), float(parts[1])
        k = int(parts[2])
        if k < 1:
            raise ValueError("Need at least one offset")
        values = [float(v) for v in np.linspace(a, b, k)]
    else:
        values = [float(p) for p in text.split(",") if p.strip()]
    if not values or any(not math.isfinite(v) for v in values):
        raise ValueError(f"Offsets must be finite numbers: '{text}'")
    return values


def sample_from_values(values: Sequence[Any], m: int = 1) -> Sample:
    """Sample from JSON-style data: angles in radians (m = 1) or unit vectors of length m + 1."""
    if not values:
        raise FSSValidationError("Empty sample")
    if m == 1:
        return Sample(dim=1, points=[float(v) for v in values])
    points = np.array(values, dtype=float)
    if points.ndim != 2 or points.shape[1] != m + 1:
        raise FSSValidationError(f"S^{m} points need {m + 1} coordinates each")
    norms = np.linalg.norm(points, axis=1)
    if np.any(np.abs(norms - 1.0) > SPHERE_NORM_TOL):
        raise FSSValidationError(f"Points must have unit norm within {SPHERE_NORM_TOL}")
    return Sample(dim=m, points=points / norms[:, None])
