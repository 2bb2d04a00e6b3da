"""Exact sparse linear solving over the rationals.

Systems are given as rows ``(coefficients, rhs)`` where ``coefficients`` maps
unknown labels to nonzero ``Fraction`` entries.  Solving runs plain Gaussian
elimination with a fixed unknown order, so the returned particular solution
(free unknowns pinned to zero) is deterministic for a fixed input.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Optional, Sequence

Row = tuple[dict, Fraction]


def solve_linear(
    rows: Iterable[tuple[Mapping[Hashable, Fraction], Fraction]],
    unknowns: Sequence[Hashable],
) -> Optional[dict]:
    """Solve ``A x = b`` exactly; return a particular solution or None.

    Free unknowns are set to zero.  Returns ``None`` when the system is
    inconsistent.
    """
    work: list[Row] = []
    for coeffs, rhs in rows:
        row = {k: Fraction(v) for k, v in coeffs.items() if v != 0}
        work.append((row, Fraction(rhs)))

    pivots: list[tuple[Hashable, Row]] = []
    for unknown in unknowns:
        pivot_idx = None
        for idx, (row, _) in enumerate(work):
            if unknown in row:
                pivot_idx = idx
                break
        if pivot_idx is None:
            continue
        row, rhs = work.pop(pivot_idx)
        scale = row[unknown]
        row = {k: v / scale for k, v in row.items()}
        rhs = rhs / scale
        reduced: list[Row] = []
        for other, other_rhs in work:
            factor = other.get(unknown)
            if factor:
                new = dict(other)
                for k, v in row.items():
                    val = new.get(k, Fraction(0)) - factor * v
                    if val:
                        new[k] = val
                    else:
                        new.pop(k, None)
                reduced.append((new, other_rhs - factor * rhs))
            else:
                reduced.append((other, other_rhs))
        work = reduced
        # eliminate this unknown from earlier pivot rows as well (full RREF)
        updated: list[tuple[Hashable, Row]] = []
        for pname, (prow, prhs) in pivots:
            factor = prow.get(unknown)
            if factor:
                new = dict(prow)
                for k, v in row.items():
                    val = new.get(k, Fraction(0)) - factor * v
                    if val:
                        new[k] = val
                    else:
                        new.pop(k, None)
                updated.append((pname, (new, prhs - factor * rhs)))
            else:
                updated.append((pname, (prow, prhs)))
        pivots = updated
        pivots.append((unknown, (row, rhs)))

    for row, rhs in work:
        if not row and rhs != 0:
            return None
        if row:
            # column outside the declared unknown list
            raise ValueError(f"row mentions undeclared unknowns: {sorted(map(repr, row))}")

    solution = {u: Fraction(0) for u in unknowns}
    for unknown, (row, rhs) in pivots:
        value = rhs
        for k, v in row.items():
            if k != unknown:
                value -= v * solution[k]
        solution[unknown] = value
    return solution
