"""Exact linear recurrences for growth sequences.

Fitting is done over the rationals with :class:`fractions.Fraction`, so a
recurrence is either reproduced exactly or rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class SeriesTooShort(ValueError):
    pass


@dataclass(frozen=True)
class Recurrence:
    """``a[n] = sum(coeffs[i] * a[n-1-i])`` for ``n >= order``.

    ``horizon`` is the number of leading terms the recurrence was checked
    against.
    """

    order: int
    coeffs: tuple[Fraction, ...]
    horizon: int
    initial: tuple[int, ...]

    def predict(self, series: Sequence[int], steps: int) -> list[Fraction]:
        vals = [Fraction(x) for x in series]
        out = []
        for _ in range(steps):
            nxt = sum((c * vals[-1 - i] for i, c in enumerate(self.coeffs)), Fraction(0))
            vals.append(nxt)
            out.append(nxt)
        return out

    def reproduces(self, series: Sequence[int]) -> bool:
        r = self.order
        return all(
            sum(c * series[n - 1 - i] for i, c in enumerate(self.coeffs)) == series[n]
            for n in range(r, len(series)))

    def to_json(self) -> str:
        doc = {"order": self.order,
               "coefficients": [[c.numerator, c.denominator] for c in self.coeffs],
               "horizon": self.horizon,
               "initial": list(self.initial)}
        return json.dumps(doc, sort_keys=True) + "\n"


def hankel_rank(series: Sequence[int], size: int) -> int:
    """Rank of the ``size x size`` Hankel matrix ``H[i][j] = a[i+j]``."""
    rows = [[Fraction(series[i + j]) for j in range(size)] for i in range(size)]
    return _rank(rows)


def _rank(rows: list[list[Fraction]]) -> int:
    rows = [r[:] for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _solve(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Exact solution of an overdetermined system, or ``None`` if inconsistent.

    Free variables (rank deficiency) are set to zero.
    """
    n = len(rows[0])
    aug = [r[:] + [b] for r, b in zip(rows, rhs)]
    pivots = []
    rank = 0
    for col in range(n):
        piv = next((i for i in range(rank, len(aug)) if aug[i][col] != 0), None)
        if piv is None:
            continue
        aug[rank], aug[piv] = aug[piv], aug[rank]
        p = aug[rank][col]
        aug[rank] = [a / p for a in aug[rank]]
        for i in range(len(aug)):
            if i != rank and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[rank])]
        pivots.append(col)
        rank += 1
    if any(aug[i][n] != 0 for i in range(rank, len(aug))):
        return None
    x = [Fraction(0)] * n
    for i, col in enumerate(pivots):
        x[col] = aug[i][n]
    return x


def fit_recurrence(series: Sequence[int], max_order: int = 12) -> Recurrence | None:
    """Lowest-order homogeneous linear recurrence reproducing ``series``.

    An order ``r`` is only tried when the series has at least ``2r + 2``
    terms, so every accepted recurrence is checked on at least two
    equations beyond those that determine it.  Candidate orders are the
    points where the Hankel rank stops growing.  Returns ``None`` when no
    recurrence exists within the budget.
    """
    if len(series) < 4:
        raise SeriesTooShort(f"need at least 4 terms, got {len(series)}")
    vals = [Fraction(x) for x in series]
    top = min(max_order, (len(series) - 2) // 2)
    if all(v == 0 for v in vals):
        return Recurrence(1, (Fraction(0),), len(series), tuple(series[:1]))
    for r in range(1, top + 1):
        # a recurrence of order r forces the (r+1)-Hankel matrix to be singular
        if hankel_rank(vals, r + 1) > r:
            continue
        rows = [[vals[n - 1 - i] for i in range(r)] for n in range(r, len(vals))]
        rhs = [vals[n] for n in range(r, len(vals))]
        coeffs = _solve(rows, rhs)
        if coeffs is None:
            continue
        rec = Recurrence(r, tuple(coeffs), len(series), tuple(series[:r]))
        if rec.reproduces(vals):
            return rec
    return None
