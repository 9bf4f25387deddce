"""Cost-value requirements prioritization from pairwise comparison matrices.

Priorities come from column normalization followed by row averaging; the
consistency ratio uses the principal eigenvalue (power iteration) against the
standard random-index baseline.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

RECIPROCITY_TOL = 1e-9

# random consistency index for n = 3..10
RANDOM_INDEX = {3: 0.58, 4: 0.90, 5: 1.12, 6: 1.24, 7: 1.32, 8: 1.41, 9: 1.45, 10: 1.49}


class MatrixError(ValueError):
    pass


class ShapeError(MatrixError):
    pass


class ReciprocityError(MatrixError):
    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"reciprocity violated at ({i + 1}, {j + 1})")


@dataclass
class PairwiseMatrix:
    labels: list[str]
    entries: list[list[float]]

    @property
    def n(self) -> int:
        return len(self.labels)


@dataclass
class PriorityVector:
    weights: list[float]


@dataclass
class CostValuePoint:
    label: str
    value_pct: float
    cost_pct: float

    @property
    def ratio(self) -> float:
        return self.value_pct / self.cost_pct

    @property
    def classification(self) -> str:
        # bounds 2 and 0.5 follow common cost-value practice
        if self.ratio >= 2.0:
            return "high"
        if self.ratio <= 0.5:
            return "low"
        return "medium"


def parse_entry(text: str) -> float:
    """Decimal or 'a/b' fraction."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def validate_matrix(labels: Sequence[str], entries: Sequence[Sequence[float]]) -> PairwiseMatrix:
    n = len(labels)
    if n < 2:
        raise ShapeError(f"matrix needs n >= 2, got {n}")
    if len(entries) != n or any(len(row) != n for row in entries):
        raise ShapeError(f"matrix is not {n}x{n}")
    for i in range(n):
        for j in range(n):
            v = entries[i][j]
            if not v > 0:
                raise MatrixError(f"non-positive entry at ({i + 1}, {j + 1}): {v}")
    for i in range(n):
        if abs(entries[i][i] - 1.0) > RECIPROCITY_TOL:
            raise MatrixError(f"diagonal entry ({i + 1}, {i + 1}) is not 1")
    for i in range(n):
        for j in range(i + 1, n):
            prod = entries[i][j] * entries[j][i]
            if abs(prod - 1.0) > RECIPROCITY_TOL * max(1.0, entries[i][j]):
                raise ReciprocityError(j, i)
    return PairwiseMatrix(labels=list(labels), entries=[list(r) for r in entries])


def parse_matrix_text(text: str) -> PairwiseMatrix:
    """CSV: header row of labels, then n rows of n entries ('1/7' allowed)."""
    rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
    if not rows:
        raise ShapeError("empty matrix file")
    labels = [c.strip() for c in rows[0] if c.strip()]
    try:
        entries = [[parse_entry(c) for c in row[: len(labels)]] for row in rows[1:]]
    except (ValueError, ZeroDivisionError) as exc:
        raise MatrixError(f"bad entry: {exc}") from exc
    return validate_matrix(labels, entries)


def parse_matrix(path: str) -> PairwiseMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matrix_text(fh.read())


def priority_vector(m: PairwiseMatrix) -> PriorityVector:
    """Normalize each column to sum 1, then average each row."""
    n = m.n
    colsums = [sum(m.entries[i][j] for i in range(n)) for j in range(n)]
    weights = [
        sum(m.entries[i][j] / colsums[j] for j in range(n)) / n for i in range(n)
    ]
    return PriorityVector(weights=weights)


def principal_eigenvalue(m: PairwiseMatrix, tol: float = 1e-9, max_iter: int = 10_000) -> float:
    """Power iteration for the dominant eigenvalue of a positive matrix."""
    n = m.n
    v = [1.0 / n] * n
    lam = 0.0
    for _ in range(max_iter):
        w = [sum(m.entries[i][j] * v[j] for j in range(n)) for i in range(n)]
        norm = sum(w)
        w = [x / norm for x in w]
        new_lam = sum(
            sum(m.entries[i][j] * w[j] for j in range(n)) / w[i] for i in range(n)
        ) / n
        if abs(new_lam - lam) < tol:
            return new_lam
        lam, v = new_lam, w
    return lam


def consistency_ratio(m: PairwiseMatrix) -> float:
    """CR = CI / RI[n] with CI = (lambda_max - n) / (n - 1)."""
    if not 3 <= m.n <= 10:
        raise MatrixError(f"consistency ratio supported for n in [3, 10], got {m.n}")
    lam = principal_eigenvalue(m)
    ci = (lam - m.n) / (m.n - 1)
    return ci / RANDOM_INDEX[m.n]


def cost_value_points(
    value: PriorityVector, cost: PriorityVector, labels: Sequence[str]
) -> list[CostValuePoint]:
    if not (len(value.weights) == len(cost.weights) == len(labels)):
        raise ShapeError("value, cost, and labels must have equal length")
    return [
        CostValuePoint(label=lbl, value_pct=100.0 * v, cost_pct=100.0 * c)
        for lbl, v, c in zip(labels, value.weights, cost.weights)
    ]


def report_csv(points: Sequence[CostValuePoint], cr_value: float, cr_cost: float) -> str:
    lines = ["label,value_pct,cost_pct,ratio,class"]
    for p in points:
        lines.append(
            f"{p.label},{p.value_pct:.4f},{p.cost_pct:.4f},{p.ratio:.4f},{p.classification}"
        )
    lines.append(f"# CR_value={cr_value:.6f} CR_cost={cr_cost:.6f}")
    return "\n".join(lines) + "\n"
