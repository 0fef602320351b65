"""Vertical integral projection and valley (inter-tooth gap) detection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .imagecore import round_half_up
from .preprocess import _correlate1d_symmetric


@dataclass
class ProjectionProfile:
    """Per-column accumulated intensity of a (source_height x source_width) image."""

    values: np.ndarray
    source_width: int
    source_height: int

    def to_text(self) -> str:
        lines = [f"{x}\t{float(v)!r}" for x, v in enumerate(self.values)]
        return "\n".join(lines) + "\n"


@dataclass
class ValleySet:
    """Accepted valley columns, pairwise at least min_separation apart."""

    positions: List[int]
    min_separation: int
    profile: ProjectionProfile


def vertical_projection(img) -> ProjectionProfile:
    """proj(x) = sum over rows of column x.

    Accumulates row by row so the result is bit-equal to a naive
    sequential double loop over y.
    """
    a = np.asarray(img, dtype=np.float64)
    h, w = a.shape
    total = np.zeros(w, dtype=np.float64)
    for row in a:
        total += row
    return ProjectionProfile(total, w, h)


def default_smooth_window(width: int) -> int:
    """round(w/50) forced odd, at least 1."""
    win = max(1, round_half_up(width / 50.0))
    return win if win % 2 == 1 else win + 1


def smooth_profile(p: ProjectionProfile, window: Optional[int] = None) -> ProjectionProfile:
    if window is None:
        window = default_smooth_window(p.source_width)
    if window % 2 == 0 or window < 1 or window > len(p.values):
        raise ValueError(f"bad smoothing window {window}")
    if window == 1:
        return ProjectionProfile(p.values.copy(), p.source_width, p.source_height)
    k = np.full(window, 1.0 / window)
    smoothed = _correlate1d_symmetric(p.values, k, axis=0)
    return ProjectionProfile(smoothed, p.source_width, p.source_height)


def local_minima(values) -> List[int]:
    """Strict local minima; equal-valued plateaus yield their center index.

    Plateaus touching either end of the array are not minima.
    """
    v = np.asarray(values, dtype=np.float64)
    n = len(v)
    out = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and v[j + 1] == v[i]:
            j += 1
        if i > 0 and j < n - 1 and v[i - 1] > v[i] and v[j + 1] > v[i]:
            out.append((i + j) // 2)
        i = j + 1
    return out


def detect_valleys(
    p: ProjectionProfile,
    min_separation: Optional[int] = None,
    edge_margin: Optional[int] = None,
) -> ValleySet:
    """Greedy deepest-first valley selection with a minimum separation.

    Candidates are strict local minima inside [edge_margin, w - edge_margin);
    they are visited by ascending profile value (ties: lower column first)
    and accepted iff at least min_separation away from every accepted one.
    """
    w = p.source_width
    if min_separation is None:
        min_separation = round_half_up(w / 6.0)
    if edge_margin is None:
        edge_margin = round_half_up(w / 20.0)
    if min_separation < 1 or edge_margin < 0:
        raise ValueError("min_separation must be >= 1 and edge_margin >= 0")

    candidates = [x for x in local_minima(p.values) if edge_margin <= x < w - edge_margin]
    candidates.sort(key=lambda x: (p.values[x], x))
    accepted: List[int] = []
    for x in candidates:
        if all(abs(x - q) >= min_separation for q in accepted):
            accepted.append(x)
    return ValleySet(sorted(accepted), min_separation, p)
