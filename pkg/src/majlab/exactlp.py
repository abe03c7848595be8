"""Exact rational feasibility for ``A z = b, z >= 0``.

Phase-one simplex over exact rationals. Pivots use the most negative
reduced cost and fall back to Bland's rule after a run of degenerate pivots,
which guarantees termination. gmpy2's ``mpq`` is used for speed when
installed; results are returned as Fractions.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

try:
    from gmpy2 import mpq as _q
except ImportError:  # pragma: no cover
    _q = Fraction

_BLAND_AFTER = 8


def feasible_point(a: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Return some ``z >= 0`` with ``a z = b``, or None when none exists."""
    m = len(a)
    n = len(a[0]) if m else 0
    rows = []
    for i in range(m):
        row = [_rat(v) for v in a[i]]
        rhs = _rat(b[i])
        if rhs < 0:
            row, rhs = [-v for v in row], -rhs
        rows.append(row + [_q(int(k == i)) for k in range(m)] + [rhs])
    basis = [n + i for i in range(m)]
    width = n + m
    # phase-one objective: minimize the sum of artificials, stored as reduced costs
    cost = [-sum((rows[i][j] for i in range(m)), _q(0)) if j < n else _q(0) for j in range(width)]
    cost.append(-sum((rows[i][width] for i in range(m)), _q(0)))
    degenerate = 0

    while True:
        if degenerate >= _BLAND_AFTER:
            enter = next((j for j in range(width) if cost[j] < 0), None)
        else:
            enter = min(range(width), key=cost.__getitem__)
            if cost[enter] >= 0:
                enter = None
        if enter is None:
            break
        best = None
        for i in range(m):
            piv = rows[i][enter]
            if piv > 0:
                ratio = rows[i][width] / piv
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            # unbounded direction cannot occur for a phase-one problem
            raise ArithmeticError("phase-one simplex reported an unbounded ray")
        r = best[1]
        degenerate = degenerate + 1 if best[0] == 0 else 0
        piv = rows[r][enter]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][enter] != 0:
                f = rows[i][enter]
                rows[i] = [u - f * v for u, v in zip(rows[i], rows[r])]
        f = cost[enter]
        cost = [u - f * v for u, v in zip(cost, rows[r])]
        basis[r] = enter

    if -cost[width] != 0:
        return None
    z = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            z[j] = Fraction(int(rows[i][width].numerator), int(rows[i][width].denominator))
    return z


def _rat(v):
    v = Fraction(v)
    return _q(v.numerator, v.denominator)
