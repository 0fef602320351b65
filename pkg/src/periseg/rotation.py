"""Rotation-degree estimation from root-canal traces.

Bright root-canal fillings run the length of a tooth, so local row maxima
in the middle band of the image trace near-vertical lines.  Tracking the
maxima into sets, fitting a line per set and averaging the arctangents
gives the global tilt of the teeth relative to the vertical axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy import signal

from .imagecore import Band, middle_band, rotate, MAX_ROTATION_DEGREES
from .projection import smooth_profile, detect_valleys, vertical_projection

MODE_LINE_ROTATE = "line-rotate"
MODE_IMAGE_ROTATE = "image-rotate"

Segment = Tuple[Tuple[float, float], Tuple[float, float]]  # ((x0,y0),(x1,y1))


@dataclass(frozen=True)
class TraceConfig:
    prominence_fraction: float = 0.05
    gating_distance: float = 3.0
    min_trace_fraction: float = 0.5

    def __post_init__(self):
        if not 0 < self.prominence_fraction < 1:
            raise ValueError("prominence_fraction must be in (0, 1)")
        if not self.gating_distance > 0:
            raise ValueError("gating_distance must be > 0")
        if not 0 < self.min_trace_fraction <= 1:
            raise ValueError("min_trace_fraction must be in (0, 1]")


@dataclass
class TraceSet:
    """One tracked sequence of row-maxima positions (rows strictly increasing)."""

    rows: List[int] = field(default_factory=list)
    cols: List[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def append(self, row: int, col: float) -> None:
        self.rows.append(row)
        self.cols.append(col)

    @property
    def tail_col(self) -> float:
        return self.cols[-1]


@dataclass
class RotationEstimate:
    slopes: List[float]
    degrees: List[float]
    mean_degrees: float
    sets_used: int

    def to_json_dict(self, iterations: int = 1) -> dict:
        return {
            "mean_degrees": self.mean_degrees,
            "per_set_degrees": list(self.degrees),
            "sets_used": self.sets_used,
            "iterations": iterations,
        }


def row_maxima(img, row: int, cfg: TraceConfig = TraceConfig()) -> List[int]:
    """Columns of prominence-filtered local maxima of one image row.

    Prominence threshold is prominence_fraction * (row max - row min);
    plateau maxima yield their center index.  A flat row has no maxima.
    """
    line = np.asarray(img, dtype=np.float64)[row]
    span = line.max() - line.min()
    # treat FFT-roundoff-level ripple on a flat row as flat
    if span <= 1e-9 * max(1.0, np.abs(line).max()):
        return []
    peaks, _ = signal.find_peaks(line, prominence=cfg.prominence_fraction * span)
    return list(int(p) for p in peaks)


def trace_maxima(img, band: Band, cfg: TraceConfig = TraceConfig()) -> List[TraceSet]:
    """Track row maxima through the band into per-structure sets.

    Each maximum joins the set whose most recent point is nearest in column,
    if within gating_distance; when two maxima claim one set, the nearer
    wins and the loser is discarded.  Sets shorter than
    min_trace_fraction * band height are dropped.
    """
    a = np.asarray(img, dtype=np.float64)
    if band.row_end > a.shape[0]:
        raise ValueError("band outside image")
    first = band.row_start
    sets = [TraceSet([first], [float(c)]) for c in row_maxima(a, first, cfg)]
    if sets:
        for r in range(first + 1, band.row_end):
            claims = {}  # set index -> (distance, col)
            for c in row_maxima(a, r, cfg):
                dists = [abs(c - s.tail_col) for s in sets]
                k = int(np.argmin(dists))
                d = dists[k]
                if d <= cfg.gating_distance and (k not in claims or d < claims[k][0]):
                    claims[k] = (d, float(c))
            for k, (_, c) in claims.items():
                sets[k].append(r, c)
    min_len = cfg.min_trace_fraction * band.height
    return [s for s in sets if len(s) >= min_len]


def fit_slope(t: TraceSet) -> float:
    """OLS slope of column on row (column change per row)."""
    if len(t) < 2 or len(set(t.rows)) < 2:
        raise ValueError("trace needs at least 2 points in distinct rows")
    r = np.asarray(t.rows, dtype=np.float64)
    c = np.asarray(t.cols, dtype=np.float64)
    r = r - r.mean()
    return float(np.dot(r, c - c.mean()) / np.dot(r, r))


def estimate_rotation(img, cfg: TraceConfig = TraceConfig()) -> RotationEstimate:
    """Mean arctangent of per-set regression slopes over the middle band.

    With no surviving trace set the estimate is 0 with sets_used = 0
    (callers treat that as "cannot rotate").
    """
    band = middle_band(img)
    sets = trace_maxima(img, band, cfg)
    slopes = [fit_slope(s) for s in sets]
    degrees = [math.degrees(math.atan(m)) for m in slopes]
    if degrees:
        mean = float(np.mean(degrees))
        mean = max(-MAX_ROTATION_DEGREES, min(MAX_ROTATION_DEGREES, mean))
    else:
        mean = 0.0
    return RotationEstimate(slopes, degrees, mean, len(sets))


@dataclass
class RotationIteration:
    image: np.ndarray
    total_degrees: float
    iterations: int
    final_estimate: RotationEstimate


def iterate_rotation_report(
    img,
    cfg: TraceConfig = TraceConfig(),
    tol: float = 0.25,
    max_iter: int = 5,
) -> RotationIteration:
    """Estimate-and-correct loop; stops once the estimate drops below tol.

    total_degrees is the accumulated rotation applied to the image
    (approximately minus the original tilt).
    """
    if not tol > 0 or max_iter < 1:
        raise ValueError("need tol > 0 and max_iter >= 1")
    cur = np.asarray(img, dtype=np.float64)
    total = 0.0
    iterations = 0
    est = estimate_rotation(cur, cfg)
    for _ in range(max_iter):
        iterations += 1
        if est.sets_used == 0 or abs(est.mean_degrees) < tol:
            break
        step = -est.mean_degrees
        # keep the cumulative correction inside the rotate() guard range
        step = max(-MAX_ROTATION_DEGREES - total, min(MAX_ROTATION_DEGREES - total, step))
        if step == 0.0:
            break
        cur = rotate(cur, step)
        total += step
        est = estimate_rotation(cur, cfg)
    return RotationIteration(cur, total, iterations, est)


def iterate_rotation(
    img,
    cfg: TraceConfig = TraceConfig(),
    tol: float = 0.25,
    max_iter: int = 5,
) -> Tuple[np.ndarray, float]:
    rep = iterate_rotation_report(img, cfg, tol, max_iter)
    return rep.image, rep.total_degrees


def map_from_rotated(points, shape, applied_degrees: float):
    """Map (x, y) points from rotate(img, applied_degrees) coords back to img coords."""
    h, w = shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    rad = math.radians(applied_degrees)
    c, s = math.cos(rad), math.sin(rad)
    out = []
    for x, y in points:
        dr, dc = y - cy, x - cx
        # inverse of the forward rotation map (rotation by -applied_degrees)
        r = cy + c * dr + s * dc
        col = cx - s * dr + c * dc
        out.append((col, r))
    return out


def _vertical_segments(columns, h) -> List[Segment]:
    return [((float(x), 0.0), (float(x), float(h - 1))) for x in columns]


def apply_mode(
    img,
    valleys,
    est: RotationEstimate,
    mode: str,
    cfg: TraceConfig = TraceConfig(),
    tol: float = 0.25,
    max_iter: int = 5,
    min_separation: Optional[int] = None,
    edge_margin: Optional[int] = None,
    smooth_window: Optional[int] = None,
) -> List[Segment]:
    """Build separator segments in original-image coordinates.

    line-rotate: tilt the valley lines of the given (unrotated) image by the
    estimated angle.  image-rotate: correct the image by iterate_rotation,
    re-detect valleys there and map the vertical separators back.
    """
    a = np.asarray(img, dtype=np.float64)
    h = a.shape[0]
    if mode == MODE_LINE_ROTATE:
        cy = (h - 1) / 2.0
        t = math.tan(math.radians(est.mean_degrees))
        return [
            ((float(x) + (0.0 - cy) * t, 0.0), (float(x) + (h - 1 - cy) * t, float(h - 1)))
            for x in valleys.positions
        ]
    if mode == MODE_IMAGE_ROTATE:
        rep = iterate_rotation_report(a, cfg, tol, max_iter)
        prof = smooth_profile(vertical_projection(rep.image), smooth_window)
        vs = detect_valleys(prof, min_separation, edge_margin)
        segments = []
        for (x0, y0), (x1, y1) in _vertical_segments(vs.positions, h):
            (mx0, my0), (mx1, my1) = map_from_rotated(
                [(x0, y0), (x1, y1)], a.shape, rep.total_degrees
            )
            segments.append(((mx0, my0), (mx1, my1)))
        return segments
    raise ValueError(f"unknown mode {mode!r}")
