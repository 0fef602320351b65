"""Segmentation-quality metrics over the per-film counting matrix.

Cell p[j][i] counts films that contain i teeth of which j were segmented
successfully.  Films are weighted by scene size F_i, giving the optimality,
failure and m-th sub-optimality percentages.  All sums are exact integer
arithmetic; division happens once at the boundary.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

import numpy as np


class MatrixError(ValueError):
    """Malformed or inconsistent counting matrix."""


class EvalMatrix:
    """(N+1) x N counting matrix, stored with rows j = 0..N, columns i = 1..N."""

    def __init__(self, n_max: int):
        if n_max < 1:
            raise MatrixError("n_max must be >= 1")
        self.n_max = n_max
        # counts[j, i]; column 0 is structurally unused
        self.counts = np.zeros((n_max + 1, n_max + 1), dtype=np.int64)

    def add(self, segmented: int, total: int, films: int = 1) -> None:
        if not (0 <= segmented <= total <= self.n_max):
            raise MatrixError(f"pair ({segmented}, {total}) out of range (N={self.n_max})")
        if films < 0:
            raise MatrixError("film count must be >= 0")
        self.counts[segmented, total] += films

    def validate(self) -> None:
        if (self.counts < 0).any():
            raise MatrixError("negative count")
        for i in range(1, self.n_max + 1):
            for j in range(i + 1, self.n_max + 1):
                if self.counts[j, i] != 0:
                    raise MatrixError(f"p[{j}][{i}] must be 0 (j > i)")

    def __eq__(self, other):
        return isinstance(other, EvalMatrix) and np.array_equal(self.counts, other.counts)


@dataclass
class EvalReport:
    film_totals: List[int]
    optimality: float
    failure: float
    sub_optimality: List[float]  # index 0 is the 1st order

    def to_json_dict(self) -> dict:
        return {
            "film_totals": self.film_totals,
            "optimality": self.optimality,
            "failure": self.failure,
            "sub_optimality": self.sub_optimality,
        }

    def to_table(self) -> str:
        headers = ["Opt"] + [_ordinal(m) for m in range(1, len(self.sub_optimality) + 1)] + ["Fail"]
        values = [self.optimality, *self.sub_optimality, self.failure]
        cells = [f"{v:.2f}" for v in values]
        widths = [max(len(h), len(c)) for h, c in zip(headers, cells)]
        head = "  ".join(h.rjust(w) for h, w in zip(headers, widths))
        body = "  ".join(c.rjust(w) for c, w in zip(cells, widths))
        return head + "\n" + body + "\n"


def _ordinal(m: int) -> str:
    suffix = {1: "st", 2: "nd", 3: "rd"}.get(m if m < 20 else m % 10, "th")
    return f"{m}{suffix}"


def film_totals(m: EvalMatrix) -> List[int]:
    """F_i = column sums, returned for i = 1..N."""
    return [int(m.counts[:, i].sum()) for i in range(1, m.n_max + 1)]


def _denominator(m: EvalMatrix) -> int:
    den = sum(f * f for f in film_totals(m))
    if den == 0:
        raise MatrixError("empty matrix: sum of F_i^2 is zero")
    return den


def optimality(m: EvalMatrix) -> float:
    F = film_totals(m)
    num = sum(int(m.counts[i, i]) * F[i - 1] for i in range(1, m.n_max + 1))
    return float(Fraction(100 * num, _denominator(m)))


def failure(m: EvalMatrix) -> float:
    F = film_totals(m)
    num = sum(int(m.counts[0, i]) * F[i - 1] for i in range(1, m.n_max + 1))
    return float(Fraction(100 * num, _denominator(m)))


def sub_optimality(m: EvalMatrix, order: int) -> float:
    """Weighted share of films missing exactly `order` teeth."""
    if not 1 <= order <= m.n_max - 1:
        raise MatrixError(f"order {order} out of range 1..{m.n_max - 1}")
    F = film_totals(m)
    num = sum(
        int(m.counts[i, i + order]) * F[i + order - 1] for i in range(1, m.n_max - order + 1)
    )
    return float(Fraction(100 * num, _denominator(m)))


def partition_terms(m: EvalMatrix) -> Tuple[Fraction, Fraction, List[Fraction]]:
    """Exact (optimality, failure, sub-optimalities) as Fractions."""
    F = film_totals(m)
    den = _denominator(m)
    opt = Fraction(100 * sum(int(m.counts[i, i]) * F[i - 1] for i in range(1, m.n_max + 1)), den)
    fail = Fraction(100 * sum(int(m.counts[0, i]) * F[i - 1] for i in range(1, m.n_max + 1)), den)
    subs = [
        Fraction(
            100
            * sum(int(m.counts[i, i + o]) * F[i + o - 1] for i in range(1, m.n_max - o + 1)),
            den,
        )
        for o in range(1, m.n_max)
    ]
    return opt, fail, subs


def report(m: EvalMatrix, declared_totals: Optional[List[int]] = None) -> EvalReport:
    m.validate()
    F = film_totals(m)
    if declared_totals is not None and list(declared_totals) != F:
        raise MatrixError(f"declared film totals {declared_totals} != column sums {F}")
    opt, fail, subs = partition_terms(m)
    return EvalReport(F, float(opt), float(fail), [float(s) for s in subs])


def accumulate(results: Iterable[Tuple[int, int]], n_max: Optional[int] = None) -> EvalMatrix:
    """Build a matrix from (segmented_ok, total_teeth) pairs."""
    pairs = list(results)
    if n_max is None:
        n_max = max((t for _, t in pairs), default=1)
    m = EvalMatrix(n_max)
    for ok, total in pairs:
        m.add(ok, total)
    return m


def load_csv(path) -> EvalMatrix:
    """CSV with header 'j,1,..,N' and one row per j = 0..N."""
    path = Path(path)
    with open(path, newline="") as f:
        rows = [r for r in csv.reader(f) if r and any(cell.strip() for cell in r)]
    if len(rows) < 2:
        raise MatrixError(f"{path}: no matrix rows")
    header = rows[0]
    try:
        cols = [int(c) for c in header[1:]]
    except ValueError as exc:
        raise MatrixError(f"{path}: bad header {header}") from exc
    n = len(cols)
    if cols != list(range(1, n + 1)):
        raise MatrixError(f"{path}: header columns must be 1..N, got {cols}")
    if len(rows) != n + 2:
        raise MatrixError(f"{path}: expected rows j=0..{n}, got {len(rows) - 1}")
    m = EvalMatrix(n)
    for j, row in enumerate(rows[1:]):
        if int(row[0]) != j:
            raise MatrixError(f"{path}: row label {row[0]} != {j}")
        for i, cell in enumerate(row[1:], start=1):
            v = int(cell)
            if v < 0:
                raise MatrixError(f"{path}: negative count at p[{j}][{i}]")
            if v and j > i:
                raise MatrixError(f"{path}: p[{j}][{i}] must be 0 (j > i)")
            m.counts[j, i] = v
    return m


def save_csv(m: EvalMatrix, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["j"] + list(range(1, m.n_max + 1)))
        for j in range(m.n_max + 1):
            writer.writerow([j] + [int(m.counts[j, i]) for i in range(1, m.n_max + 1)])


def report_to_json(rep: EvalReport) -> str:
    return json.dumps(rep.to_json_dict(), indent=2)
