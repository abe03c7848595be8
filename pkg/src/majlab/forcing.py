"""Row-by-row forcing for doubly stochastic matrices on weighted sequence spaces.

Given atoms with weights ``w_n`` and sequences ``x, y``, a doubly stochastic
map with ``phi(y) = x`` is a nonnegative matrix ``a[k][n]`` with row sums at
most 1, column budgets ``sum_k a[k][n] w_k = w_n`` and value equations
``sum_n a[k][n] y_n = x_k``. Row ``k`` can reach at most the water-filling
value over the budgets left by earlier rows. When ``x_k`` equals that maximum
the whole row is pinned. If the pinned rows follow a shift-invariant pattern
that is verified symbolically for a recognized family, every row is pinned,
and a column that never receives mass proves that no such map exists.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Union

import sympy

from .errors import PreconditionError
from .measure import Kind, StepFunction

_FAMILY_SCAN = 64  # columns scanned past the row index for a family source


class Justification(str, enum.Enum):
    MAX_VALUE_PINNING = "MaxValuePinning"
    COLUMN_BUDGET_EXHAUSTED = "ColumnBudgetExhausted"


@dataclass(frozen=True)
class ForcedEntry:
    column: int
    value: Fraction
    justification: Justification


@dataclass(frozen=True)
class ForcedRow:
    row: int
    entries: tuple[ForcedEntry, ...]

    def dense(self, width: int) -> list[Fraction]:
        out = [Fraction(0)] * width
        for e in self.entries:
            if e.column <= width:
                out[e.column - 1] = e.value
        return out


@dataclass(frozen=True)
class Induction:
    base_row: int
    offsets: tuple[int, ...]
    identities: tuple[str, ...]


@dataclass(frozen=True)
class Contradiction:
    kind: str  # "starved_column" | "unattainable_row"
    index: int
    cell_id: str
    required: Fraction
    available: Fraction


@dataclass(frozen=True)
class InfeasibilityCertificate:
    family: str
    forced_rows: tuple[ForcedRow, ...]
    induction: Induction | None
    contradiction: Contradiction


@dataclass(frozen=True)
class ForcedInfeasible:
    certificate: InfeasibilityCertificate


@dataclass(frozen=True)
class ForcedFeasiblePrefix:
    rows: tuple[ForcedRow, ...]


@dataclass(frozen=True)
class Underdetermined:
    rows: tuple[ForcedRow, ...]
    row: int
    reason: str


ForcingResult = Union[ForcedInfeasible, ForcedFeasiblePrefix, Underdetermined]


# ---------------------------------------------------------------- sequences

@dataclass(frozen=True)
class GeometricTail:
    """Unit weights, ``y = (0, c, c r, c r^2, ...)`` and ``x = (c, c r, ...)``."""

    c: Fraction
    r: Fraction

    def describe(self) -> str:
        return f"geometric tail c={self.c} r={self.r}"

    def weight(self, n: int) -> Fraction:
        return Fraction(1)

    def y(self, n: int) -> Fraction:
        return Fraction(0) if n == 1 else self.c * self.r ** (n - 2)

    def x(self, k: int) -> Fraction:
        return self.c * self.r ** (k - 1)

    def row_offsets(self, k: int) -> tuple[int, ...]:
        return (1,)

    def budgets_match(self, k: int, left: Callable[[int], Fraction]) -> bool:
        """Hypothesis before row k: columns 2..k spent, all others untouched."""
        return all(left(n) == 0 for n in range(2, k + 1)) and all(
            left(n) == self.weight(n) for n in [1, *range(k + 1, k + 4)]
        )


@dataclass(frozen=True)
class WeightedFamily:
    """Strictly increasing polynomial weights ``w_n``.

    ``y = (0, 1/w_2, 1/(2 w_3), ..., 1/(2^(n-2) w_n), ...)`` and
    ``x_1 = 1/w_2``, ``x_k = (y_k (w_k - w_1) + w_1 y_(k+1)) / w_k`` for
    ``k >= 2``: each ``x_k`` averages the decreasing rearrangement of ``y``
    over consecutive intervals of lengths ``w_1, w_2, ...``.
    """

    coefficients: tuple[Fraction, ...]  # w(n) = sum c_i n^i

    def describe(self) -> str:
        return f"weighted family w(n)={sympy.sstr(self.weight_expr(sympy.Symbol('n')))}"

    def weight_expr(self, n):
        return sum(sympy.Rational(c.numerator, c.denominator) * n**i for i, c in enumerate(self.coefficients))

    def weight(self, n: int) -> Fraction:
        return sum((c * n**i for i, c in enumerate(self.coefficients)), Fraction(0))

    def y(self, n: int) -> Fraction:
        return Fraction(0) if n == 1 else 1 / (2 ** (n - 2) * self.weight(n))

    def x(self, k: int) -> Fraction:
        if k == 1:
            return self.y(2)
        w1, wk = self.weight(1), self.weight(k)
        return (self.y(k) * (wk - w1) + w1 * self.y(k + 1)) / wk

    def row_offsets(self, k: int) -> tuple[int, ...]:
        return (1,) if k == 1 else (0, 1)

    def budgets_match(self, k: int, left: Callable[[int], Fraction]) -> bool:
        """Hypothesis before row k: columns 2..k-1 spent, column k keeps ``w_k - w_1``."""
        w = self.weight
        return (
            all(left(n) == 0 for n in range(2, k))
            and left(k) == w(k) - w(1)
            and all(left(n) == w(n) for n in [1, *range(k + 1, k + 4)])
        )


Family = Union[GeometricTail, WeightedFamily]


@lru_cache(maxsize=None)
def verify_family_step(family: Family) -> tuple[bool, tuple[str, ...]]:
    """Symbolic check of the inductive step for every row index at once.

    Returns whether every identity and inequality holds, with a readable
    record of what was checked.
    """
    k = sympy.Symbol("k", integer=True, positive=True)
    checks: list[str] = []
    ok = True

    def record(label: str, passed: bool):
        nonlocal ok
        ok = ok and bool(passed)
        checks.append(f"{label}: {'verified' if passed else 'FAILED'}")

    if isinstance(family, GeometricTail):
        c = sympy.Rational(family.c.numerator, family.c.denominator)
        r = sympy.Rational(family.r.numerator, family.r.denominator)
        y = lambda n: c * r ** (n - 2)
        x = lambda m: c * r ** (m - 1)
        record("c > 0 and 0 < r < 1", c > 0 and 0 < r < 1)
        record("x(k) - y(k+1) == 0", sympy.simplify(x(k) - y(k + 1)) == 0)
        record("y(k+2)/y(k+1) == r < 1", sympy.simplify(y(k + 2) / y(k + 1) - r) == 0)
        return ok, tuple(checks)

    w = family.weight_expr
    m = sympy.Symbol("m", integer=True, nonnegative=True)
    w1 = w(sympy.Integer(1))
    y = lambda n: 1 / (2 ** (n - 2) * w(n))
    x = lambda j: (y(j) * (w(j) - w1) + w1 * y(j + 1)) / w(j)
    diff = sympy.Poly(sympy.expand(w(m + 2) - w(m + 1)), m)
    coeffs = diff.all_coeffs()
    increasing = all(cf >= 0 for cf in coeffs) and coeffs[-1] > 0
    record("w(1) > 0", w1 > 0)
    record("w(m+2) - w(m+1) has nonnegative coefficients in m >= 0 and positive constant", increasing)
    a_kk = (w(k) - w1) / w(k)
    a_next = w1 / w(k)
    record("a(k,k) y(k) + a(k,k+1) y(k+1) - x(k) == 0", sympy.simplify(a_kk * y(k) + a_next * y(k + 1) - x(k)) == 0)
    record("a(k,k) + a(k,k+1) == 1", sympy.simplify(a_kk + a_next - 1) == 0)
    record("column k+1 keeps w(k+1) - w(1) after row k", sympy.simplify(w(k + 1) - a_next * w(k) - (w(k + 1) - w1)) == 0)
    record("y(k)/y(k+1) == 2 w(k+1)/w(k)", sympy.simplify(y(k) / y(k + 1) - 2 * w(k + 1) / w(k)) == 0)
    return ok, tuple(checks)


# ---------------------------------------------------------------- recognition

def _as_sequences(x: StepFunction, y: StepFunction):
    if x.space != y.space:
        raise PreconditionError("x and y must live on the same space")
    if any(c.kind is not Kind.ATOM for c in x.space.cells):
        raise PreconditionError("forcing needs an atomic space")
    if any(v < 0 for v in x.values + y.values):
        raise PreconditionError("forcing needs nonnegative sequences")
    support = [v for v in y.values if v != 0]
    if len(set(support)) != len(support):
        raise PreconditionError("y must take distinct values on its support")
    w = [c.weight for c in x.space.cells]
    return w, list(x.values), list(y.values)


def recognize_family(x: StepFunction, y: StepFunction) -> Family | None:
    """Match the data against a known family on every atom but the last.

    The last atom is left free because truncated data usually folds the
    tail mass into it.
    """
    w, xs, ys = _as_sequences(x, y)
    span = len(w) - 1
    if span < 4:
        return None
    if all(v == 1 for v in w[:span]) and ys[0] == 0 and ys[1] > 0 and ys[2] > 0:
        fam = GeometricTail(ys[1], ys[2] / ys[1])
        if fam.r < 1 and _agrees(fam, w, xs, ys, span):
            return fam
    for degree in range(3):
        coeffs = _fit_polynomial(w[: degree + 1])
        fam = WeightedFamily(coeffs)
        if all(fam.weight(n) < fam.weight(n + 1) for n in range(1, span)) and fam.weight(1) > 0:
            if _agrees(fam, w, xs, ys, span):
                return fam
    return None


def _agrees(fam: Family, w, xs, ys, span: int) -> bool:
    return all(fam.weight(n) == w[n - 1] and fam.y(n) == ys[n - 1] and fam.x(n) == xs[n - 1] for n in range(1, span + 1))


def _fit_polynomial(values: list[Fraction]) -> tuple[Fraction, ...]:
    """Coefficients of the polynomial through ``(1, v1), (2, v2), ...``."""
    n = sympy.Symbol("n")
    poly = sympy.Poly(sympy.interpolate(list(zip(range(1, len(values) + 1), [sympy.Rational(v.numerator, v.denominator) for v in values])), n), n)
    coeffs = list(reversed(poly.all_coeffs()))
    return tuple(Fraction(int(c.p), int(c.q)) for c in coeffs)


# ---------------------------------------------------------------- engine

@dataclass
class _State:
    weight: Callable[[int], Fraction]
    y: Callable[[int], Fraction]
    x: Callable[[int], Fraction]
    columns: Callable[[int], Iterator[int]]  # positive-value columns, decreasing y
    used: dict[int, Fraction] = field(default_factory=dict)

    def left(self, n: int) -> Fraction:
        return self.weight(n) - self.used.get(n, Fraction(0))


def _pin_row(st: _State, k: int) -> tuple[ForcedRow | None, str | None, Fraction]:
    """Water-fill row ``k``. Returns (row, failure reason, attainable maximum)."""
    wk = st.weight(k)
    cap = Fraction(1)
    best = Fraction(0)
    entries: list[ForcedEntry] = []
    last = None
    for n in st.columns(k):
        if cap == 0:
            break
        left = st.left(n)
        if left <= 0:
            entries.append(ForcedEntry(n, Fraction(0), Justification.COLUMN_BUDGET_EXHAUSTED))
            continue
        amt = min(cap, left / wk)
        entries.append(ForcedEntry(n, amt, Justification.MAX_VALUE_PINNING))
        best += amt * st.y(n)
        cap -= amt
        last = n
    target = st.x(k)
    if target > best:
        return None, "unattainable", best
    if target < best:
        return None, f"x_{k} is below the attainable maximum {best}; the row is not pinned", best
    if cap > 0:
        return None, f"row {k} has free capacity {cap} on zero-valued columns", best
    if last is not None and cap == 0:
        partial = [e for e in entries if e.column == last][0].value < st.left(last) / wk
        if partial and any(st.y(n) == st.y(last) and n != last and st.left(n) > 0 for n in st.columns(k)):
            return None, f"row {k} ties at value {st.y(last)}", best
    for e in entries:
        if e.value:
            st.used[e.column] = st.used.get(e.column, Fraction(0)) + e.value * wk
    return ForcedRow(k, tuple(entries)), None, best


def _family_state(fam: Family) -> _State:
    return _State(fam.weight, fam.y, fam.x, lambda k: iter(range(2, k + _FAMILY_SCAN)))


def _data_state(w, xs, ys) -> _State:
    order = sorted((n for n in range(1, len(ys) + 1) if ys[n - 1] > 0), key=lambda n: -ys[n - 1])
    get = lambda seq: (lambda i: seq[i - 1] if 1 <= i <= len(seq) else Fraction(0))
    return _State(get(w), get(ys), get(xs), lambda k: iter(order))


def hiai_forcing(x: StepFunction, y: StepFunction, depth: int, family: Family | None = None) -> ForcingResult:
    """Force rows of any doubly stochastic ``phi`` with ``phi(y) = x``.

    If ``family`` is None the data is matched against the known families.
    With a family, rows are generated from its closed form up to ``depth``
    and a symbolically verified induction extends the pattern to every row,
    so the certificate concerns the infinite sequences the data begins.
    Without one, only the literal data is forced and no infinite claim is made.
    """
    if depth < 1:
        raise PreconditionError("depth must be a positive integer")
    w, xs, ys = _as_sequences(x, y)
    if family is None:
        family = recognize_family(x, y)
    if family is None:
        st = _data_state(w, xs, ys)
        rows: list[ForcedRow] = []
        for k in range(1, min(depth, len(w)) + 1):
            row, why, best = _pin_row(st, k)
            if row is None:
                if why == "unattainable":
                    cid = x.space.cells[k - 1].id
                    return ForcedInfeasible(InfeasibilityCertificate(
                        "literal data", tuple(rows), None, Contradiction("unattainable_row", k, cid, xs[k - 1], best)))
                return Underdetermined(tuple(rows), k, why)
            rows.append(row)
        return ForcedFeasiblePrefix(tuple(rows))
    return _force_family(family, depth, x.space.cells[0].id)


def _force_family(fam: Family, depth: int, first_id: str) -> ForcingResult:
    st = _family_state(fam)
    rows: list[ForcedRow] = []
    for k in range(1, depth + 1):
        row, why, best = _pin_row(st, k)
        if row is None:
            return Underdetermined(tuple(rows), k, why or "")
        rows.append(row)
    offsets = [tuple(sorted(e.column - r.row for e in r.entries if e.value > 0)) for r in rows]
    base = depth
    while base > 1 and offsets[base - 2] == offsets[depth - 1]:
        base -= 1
    ok, identities = verify_family_step(fam)
    hypothesis = fam.budgets_match(depth + 1, st.left)
    pattern_ok = all(offsets[k - 1] == fam.row_offsets(k) for k in range(1, depth + 1))
    if not (ok and hypothesis and pattern_ok and depth - base >= 1):
        return ForcedFeasiblePrefix(tuple(rows))
    reach = depth + 1 + min(offsets[-1])
    starved = next((n for n in range(1, reach) if st.used.get(n, Fraction(0)) == 0), None)
    if starved is None:
        return ForcedFeasiblePrefix(tuple(rows))
    cell_id = first_id if starved == 1 else f"col{starved}"
    induction = Induction(base, offsets[-1], identities)
    contradiction = Contradiction("starved_column", starved, cell_id, fam.weight(starved), Fraction(0))
    return ForcedInfeasible(InfeasibilityCertificate(fam.describe(), tuple(rows), induction, contradiction))


def replay_certificate(cert: InfeasibilityCertificate, weight, y, x) -> list[str]:
    """Re-check a certificate's forced rows against sequence callables.

    Every prefix must respect row sums, column budgets and value equations,
    and the contradiction column must receive no mass from any forced row.
    """
    problems = []
    used: dict[int, Fraction] = {}
    for r in cert.forced_rows:
        total = sum((e.value for e in r.entries), Fraction(0))
        if total > 1:
            problems.append(f"row {r.row}: sum {total} > 1")
        value = sum((e.value * y(e.column) for e in r.entries), Fraction(0))
        if value != x(r.row):
            problems.append(f"row {r.row}: value {value} != {x(r.row)}")
        for e in r.entries:
            if e.value < 0:
                problems.append(f"row {r.row}: negative entry")
            used[e.column] = used.get(e.column, Fraction(0)) + e.value * weight(r.row)
            if used[e.column] > weight(e.column):
                problems.append(f"column {e.column}: budget exceeded")
    c = cert.contradiction
    if c.kind == "starved_column":
        if used.get(c.index, Fraction(0)) != 0 or c.required <= 0 or c.available != 0:
            problems.append("contradiction column is not starved")
    return problems
