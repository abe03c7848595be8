"""Doubly stochastic transfer maps between finite-trace spaces.

A map is stored as a matrix ``A[i][j]`` indexed by (codomain cell, domain
cell) and acts by ``(A z)_i = sum_j A[i][j] z_j``. It is doubly stochastic
when entries are nonnegative, every row sums to 1, and column ``j`` carries
exactly the weight of domain cell ``j``: ``sum_i w_i A[i][j] = w_j``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DataError, IncompatibleSpaces, NoPerfectMatching, NotMajorized, PreconditionError, SlotBoundExceeded
from .majorization import majorize
from .measure import Kind, MeasureSpace, StepFunction

DEFAULT_MAX_SLOTS = 10**6
MAX_SLOTS_ENV = "MAJLAB_MAX_SLOTS"


@dataclass(frozen=True)
class TransferMap:
    domain: MeasureSpace
    codomain: MeasureSpace
    entries: tuple[tuple, ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        if len(rows) != len(self.codomain) or any(len(r) != len(self.domain) for r in rows):
            raise DataError(f"entries must be a {len(self.codomain)}x{len(self.domain)} matrix", "entries")

    @classmethod
    def identity(cls, space: MeasureSpace) -> "TransferMap":
        n = len(space)
        return cls(space, space, tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))


@dataclass(frozen=True)
class Violation:
    kind: str  # "negative_entry" | "row_sum" | "column_mass"
    index: tuple[int, ...]
    residual: object

    def describe(self) -> str:
        return f"{self.kind} at {self.index}: residual {self.residual}"


def verify_transfer(a: TransferMap, tol=0) -> list[Violation]:
    """List every violated invariant. ``tol=0`` means exact comparison."""
    out: list[Violation] = []
    for i, row in enumerate(a.entries):
        for j, v in enumerate(row):
            if v < -tol:
                out.append(Violation("negative_entry", (i, j), v))
    for i, row in enumerate(a.entries):
        r = sum(row) - 1
        if abs(r) > tol:
            out.append(Violation("row_sum", (i,), r))
    wi = [c.weight for c in a.codomain.cells]
    for j, cell in enumerate(a.domain.cells):
        r = sum(wi[i] * a.entries[i][j] for i in range(len(wi))) - cell.weight
        if abs(r) > tol * max(1, abs(cell.weight)):
            out.append(Violation("column_mass", (j,), r))
    return out


def apply_transfer(a: TransferMap, z: StepFunction) -> StepFunction:
    if z.space != a.domain:
        raise PreconditionError("z does not live on the domain of the map")
    zero = 0 * z.values[0] if z.values else Fraction(0)
    vals = tuple(sum((v * zj for v, zj in zip(row, z.values)), zero) for row in a.entries)
    return StepFunction(a.codomain, vals)


def t_transform(v: Sequence, i: int, j: int, c) -> list:
    """Mix coordinates ``i`` and ``j``: ``v_i <- c v_i + (1-c) v_j`` and symmetrically."""
    if i == j:
        raise PreconditionError("t_transform needs two distinct indices")
    out = list(v)
    out[i] = c * v[i] + (1 - c) * v[j]
    out[j] = (1 - c) * v[i] + c * v[j]
    return out


@dataclass(frozen=True)
class TStep:
    i: int
    j: int
    c: object


def t_transform_chain(target: Sequence, source: Sequence, eps=0) -> tuple[list[TStep], list]:
    """T-transforms carrying the sorted vector ``source`` to ``target``.

    Both vectors are sorted decreasingly with ``target`` majorized by
    ``source``. Each step picks ``i`` as the last index where the current
    vector still exceeds the target and ``j`` as the first later index where
    it falls short, then moves the smaller of the two gaps. One more
    coordinate matches after every step, so at most ``n - 1`` steps occur.
    ``eps`` is a comparison tolerance for floating-point inputs.
    """
    v = list(source)
    n = len(v)
    steps: list[TStep] = []
    for _ in range(n):
        i = next((p for p in range(n - 1, -1, -1) if v[p] - target[p] > eps), None)
        if i is None:
            break
        j = next((p for p in range(i + 1, n) if target[p] - v[p] > eps), None)
        if j is None:
            raise NotMajorized("target is not majorized by source")
        gap_i, gap_j = v[i] - target[i], target[j] - v[j]
        d = min(gap_i, gap_j)
        c = 1 - d / (v[i] - v[j])
        v = t_transform(v, i, j, c)
        if gap_i <= gap_j:
            v[i] = target[i]
        if gap_j <= gap_i:
            v[j] = target[j]
        steps.append(TStep(i, j, c))
    return steps, v


def resolve_max_slots(max_slots: int | None = None) -> int:
    if max_slots is not None:
        return int(max_slots)
    env = os.environ.get(MAX_SLOTS_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise DataError(f"not an integer: {env!r}", MAX_SLOTS_ENV) from None
    return DEFAULT_MAX_SLOTS


@dataclass(frozen=True)
class TransferConstruction:
    map: TransferMap
    chain: tuple[TStep, ...]
    slots: int


def _slot_counts(spaces: Sequence[MeasureSpace]) -> tuple[int, list[list[int]]]:
    denom = 1
    for s in spaces:
        for c in s.cells:
            denom = math.lcm(denom, c.weight.denominator)
    counts = [[int(c.weight * denom) for c in s.cells] for s in spaces]
    return denom, counts


def build_transfer(x: StepFunction, y: StepFunction, max_slots: int | None = None, check: bool = True) -> TransferConstruction:
    """Construct a doubly stochastic map sending ``y`` to ``x``, with its T-transform chain.

    Both spaces are cut into slots of weight ``1/L``, ``L`` the lcm of all
    weight denominators. A cell of weight ``k/L`` owns ``k`` slots (for atoms
    these are virtual). The sorted slot vectors are linked by a T-transform
    chain, which is then unsorted and averaged back over each cell's slots.
    Averaging keeps the map doubly stochastic and still sends ``y`` to ``x``
    because both are constant on cells.
    """
    if x.space.infinite or y.space.infinite:
        raise IncompatibleSpaces("construct_transfer needs finite ambient spaces")
    if x.space.total() != y.space.total():
        raise IncompatibleSpaces("spaces have different total trace")
    if check and not majorize(x, y):
        raise NotMajorized("x is not majorized by y")
    bound = resolve_max_slots(max_slots)
    denom, (kx, ky) = _slot_counts([x.space, y.space])
    n = sum(kx)
    if n > bound:
        raise SlotBoundExceeded(f"refinement needs {n} slots, bound is {bound}")

    x_owner = [i for i, k in enumerate(kx) for _ in range(k)]
    y_owner = [j for j, k in enumerate(ky) for _ in range(k)]
    x_order = sorted(range(n), key=lambda s: -x.values[x_owner[s]])
    y_order = sorted(range(n), key=lambda s: -y.values[y_owner[s]])
    x_sorted = [x.values[x_owner[s]] for s in x_order]
    y_sorted = [y.values[y_owner[s]] for s in y_order]
    steps, _ = t_transform_chain(x_sorted, y_sorted)

    # rows[p] = domain-cell masses of sorted position p under the composed chain
    rows: list[dict[int, Fraction]] = [{y_owner[y_order[p]]: Fraction(1)} for p in range(n)]
    for st in steps:
        ri, rj = rows[st.i], rows[st.j]
        new_i: dict[int, Fraction] = {}
        new_j: dict[int, Fraction] = {}
        for key in ri.keys() | rj.keys():
            a, b = ri.get(key, 0), rj.get(key, 0)
            vi, vj = st.c * a + (1 - st.c) * b, (1 - st.c) * a + st.c * b
            if vi:
                new_i[key] = vi
            if vj:
                new_j[key] = vj
        rows[st.i], rows[st.j] = new_i, new_j

    m, k = len(x.space), len(y.space)
    acc = [[Fraction(0)] * k for _ in range(m)]
    for p in range(n):
        i = x_owner[x_order[p]]
        for j, v in rows[p].items():
            acc[i][j] += v
    entries = tuple(tuple(v / kx[i] for v in acc[i]) for i in range(m))
    return TransferConstruction(TransferMap(y.space, x.space, entries), tuple(steps), n)


def construct_transfer(x: StepFunction, y: StepFunction, max_slots: int | None = None) -> TransferMap:
    """A doubly stochastic map ``A`` with ``apply_transfer(A, y) == x``."""
    return build_transfer(x, y, max_slots).map


@dataclass(frozen=True)
class BirkhoffDecomposition:
    terms: tuple[tuple[Fraction, tuple[int, ...]], ...]

    def recompose(self, n: int) -> list[list[Fraction]]:
        out = [[Fraction(0)] * n for _ in range(n)]
        for c, perm in self.terms:
            for i, j in enumerate(perm):
                out[i][j] += c
        return out


def _perfect_matching(support: list[list[int]], n: int) -> list[int] | None:
    """Kuhn's augmenting paths; rows in order, candidate columns ascending."""
    match_col = [-1] * n

    def augment(i: int, seen: list[bool]) -> bool:
        for j in support[i]:
            if seen[j]:
                continue
            seen[j] = True
            if match_col[j] < 0 or augment(match_col[j], seen):
                match_col[j] = i
                return True
        return False

    for i in range(n):
        if not augment(i, [False] * n):
            return None
    perm = [0] * n
    for j, i in enumerate(match_col):
        perm[i] = j
    return perm


def birkhoff_decompose(a: TransferMap) -> BirkhoffDecomposition:
    """Write a doubly stochastic matrix as a convex combination of permutations.

    Repeatedly finds a perfect matching on the positive entries and peels off
    the matching's smallest entry. Each peel moves to a strictly smaller face
    of the Birkhoff polytope, so at most ``(n-1)^2 + 1`` terms appear.
    """
    n = len(a.domain)
    cells = list(a.domain.cells) + list(a.codomain.cells)
    if len(a.codomain) != n or any(c.kind is not Kind.ATOM or c.weight != cells[0].weight for c in cells):
        raise PreconditionError("birkhoff_decompose needs a square map on atoms of equal weight")
    violations = verify_transfer(a)
    if violations:
        raise PreconditionError(f"map is not doubly stochastic: {violations[0].describe()}")
    m = [list(r) for r in a.entries]
    terms = []
    while any(v > 0 for row in m for v in row):
        support = [[j for j in range(n) if m[i][j] > 0] for i in range(n)]
        perm = _perfect_matching(support, n)
        if perm is None:
            raise NoPerfectMatching("positive support has no perfect matching")
        c = min(m[i][perm[i]] for i in range(n))
        for i in range(n):
            m[i][perm[i]] -= c
        terms.append((c, tuple(perm)))
    return BirkhoffDecomposition(tuple(terms))
