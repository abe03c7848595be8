"""Weighted measure spaces, step functions and their decreasing rearrangements.

A :class:`MeasureSpace` is a finite list of cells (atoms or diffuse pieces)
with positive rational weights, optionally followed by an infinite diffuse
remainder on which every function vanishes. Everything here is exact.
"""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import pairwise
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import DataError, PreconditionError
from .rational import INF, ExtRational


class Kind(str, enum.Enum):
    ATOM = "atom"
    DIFFUSE = "diffuse"


class Ambient(str, enum.Enum):
    FINITE = "finite"
    INFINITE = "infinite"


@dataclass(frozen=True)
class Cell:
    id: str
    weight: Fraction
    kind: Kind = Kind.ATOM

    def __post_init__(self):
        object.__setattr__(self, "weight", Fraction(self.weight))
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.weight <= 0:
            raise DataError(f"weight must be positive, got {self.weight}", f"cells[{self.id}].weight")


@dataclass(frozen=True)
class MeasureSpace:
    cells: tuple[Cell, ...]
    ambient: Ambient = Ambient.FINITE
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "ambient", Ambient(self.ambient))
        index = {}
        for pos, cell in enumerate(self.cells):
            if cell.id in index:
                raise DataError(f"duplicate cell id {cell.id!r}", "cells")
            index[cell.id] = pos
        object.__setattr__(self, "_index", index)

    @classmethod
    def atoms(cls, weights: Iterable, ambient: Ambient | str = Ambient.FINITE, prefix: str = "e") -> "MeasureSpace":
        """Atoms named ``e1, e2, ...`` with the given weights."""
        return cls(tuple(Cell(f"{prefix}{k}", Fraction(w), Kind.ATOM) for k, w in enumerate(weights, 1)), Ambient(ambient))

    @classmethod
    def diffuse(cls, weights: Iterable, ambient: Ambient | str = Ambient.FINITE, prefix: str = "d") -> "MeasureSpace":
        return cls(tuple(Cell(f"{prefix}{k}", Fraction(w), Kind.DIFFUSE) for k, w in enumerate(weights, 1)), Ambient(ambient))

    @property
    def infinite(self) -> bool:
        return self.ambient is Ambient.INFINITE

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.cells)

    def __len__(self) -> int:
        return len(self.cells)

    def __contains__(self, cell_id: str) -> bool:
        return cell_id in self._index

    def index(self, cell_id: str) -> int:
        try:
            return self._index[cell_id]
        except KeyError:
            raise DataError(f"unknown cell id {cell_id!r}", "values") from None

    def cell(self, cell_id: str) -> Cell:
        return self.cells[self.index(cell_id)]

    def cell_measure(self) -> Fraction:
        """Total weight of the listed cells (excludes the infinite remainder)."""
        return sum((c.weight for c in self.cells), Fraction(0))

    def total(self) -> ExtRational:
        """The trace of the identity: sum of weights, or infinity."""
        return INF if self.infinite else self.cell_measure()

    def split(self, cell_id: str, weights: Sequence) -> tuple["MeasureSpace", dict[str, tuple[str, ...]]]:
        """Split a diffuse cell into sub-cells ``id#1, id#2, ...``.

        Returns the refined space and the refinement map from each old id to
        its new ids (identity for untouched cells).
        """
        cell = self.cell(cell_id)
        weights = [Fraction(w) for w in weights]
        if cell.kind is Kind.ATOM and len(weights) != 1:
            raise PreconditionError(f"atom {cell_id!r} cannot be split")
        if any(w <= 0 for w in weights) or sum(weights) != cell.weight:
            raise PreconditionError(f"sub-weights of {cell_id!r} must be positive and sum to {cell.weight}")
        new_cells: list[Cell] = []
        refinement: dict[str, tuple[str, ...]] = {}
        for c in self.cells:
            if c.id != cell_id or len(weights) == 1:
                new_cells.append(c)
                refinement[c.id] = (c.id,)
                continue
            parts = tuple(Cell(f"{c.id}#{k}", w, Kind.DIFFUSE) for k, w in enumerate(weights, 1))
            new_cells.extend(parts)
            refinement[c.id] = tuple(p.id for p in parts)
        return MeasureSpace(tuple(new_cells), self.ambient), refinement


def refine_function(x: "StepFunction", space: MeasureSpace, refinement: Mapping[str, Sequence[str]]) -> "StepFunction":
    """Pull ``x`` back along a refinement map: every sub-cell keeps its parent's value."""
    values = {}
    for old, new_ids in refinement.items():
        for nid in new_ids:
            values[nid] = x.value(old)
    return StepFunction(space, values)


@dataclass(frozen=True)
class StepFunction:
    """A simple function: one value per cell, zero on the infinite remainder.

    ``values`` may be given as a mapping id -> value (missing ids mean 0) or as
    a sequence aligned with ``space.cells``; it is stored as a tuple.
    """

    space: MeasureSpace
    values: tuple

    def __post_init__(self):
        raw = self.values
        if isinstance(raw, Mapping):
            vals = [Fraction(0)] * len(self.space)
            for key, v in raw.items():
                vals[self.space.index(key)] = _num(v)
        else:
            vals = [_num(v) for v in raw]
            if len(vals) != len(self.space):
                raise DataError(f"expected {len(self.space)} values, got {len(vals)}", "values")
        object.__setattr__(self, "values", tuple(vals))

    @classmethod
    def on_atoms(cls, values: Sequence, weights: Sequence | None = None, ambient: Ambient | str = Ambient.FINITE) -> "StepFunction":
        weights = [1] * len(values) if weights is None else weights
        return cls(MeasureSpace.atoms(weights, ambient), tuple(values))

    def value(self, cell_id: str):
        return self.values[self.space.index(cell_id)]

    def items(self) -> Iterator[tuple[Cell, object]]:
        return zip(self.space.cells, self.values)

    def as_dict(self) -> dict[str, object]:
        return {c.id: v for c, v in self.items()}

    def support(self) -> tuple[str, ...]:
        return tuple(c.id for c, v in self.items() if v != 0)

    def support_measure(self) -> Fraction:
        return sum((c.weight for c, v in self.items() if v != 0), Fraction(0))

    def map(self, f: Callable) -> "StepFunction":
        return StepFunction(self.space, tuple(f(v) for v in self.values))

    def _check_same(self, other: "StepFunction"):
        if other.space != self.space:
            raise PreconditionError("step functions live on different spaces")

    def __add__(self, other: "StepFunction") -> "StepFunction":
        self._check_same(other)
        return StepFunction(self.space, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        self._check_same(other)
        return StepFunction(self.space, tuple(a - b for a, b in zip(self.values, other.values)))

    def __neg__(self) -> "StepFunction":
        return self.map(lambda v: -v)

    def scale(self, c) -> "StepFunction":
        return self.map(lambda v: c * v)


def _num(v):
    if isinstance(v, (Fraction, float)):
        return v
    if isinstance(v, int):
        return Fraction(v)
    return Fraction(v)


@dataclass(frozen=True)
class SpectralScale:
    """A decreasing right-continuous step function on ``[0, domain)``.

    ``steps`` holds ``(value, length)`` pairs with strictly decreasing values.
    ``tail`` is the length of a trailing zero region: a Fraction for a finite
    zero tail, ``math.inf`` for an infinite one, or ``None`` when absent.
    """

    steps: tuple[tuple[object, object], ...]
    tail: ExtRational | None = None

    def __post_init__(self):
        steps = tuple((v, l) for v, l in self.steps)
        object.__setattr__(self, "steps", steps)
        for (v1, _), (v2, _) in pairwise(steps):
            if not v1 > v2:
                raise DataError("step values must be strictly decreasing", "steps")
        if any(l <= 0 for _, l in steps):
            raise DataError("step lengths must be positive", "steps")
        if self.tail is not None and self.tail != INF and self.tail <= 0:
            raise DataError("zero tail must have positive length", "tail")

    def step_length(self):
        return sum((l for _, l in self.steps), Fraction(0))

    def domain(self) -> ExtRational:
        tail = self.tail or 0
        return INF if tail == INF else self.step_length() + tail

    def breakpoints(self) -> list:
        """Start 0, the end of every step, and the domain end when finite."""
        points = [Fraction(0)]
        for _, l in self.steps:
            points.append(points[-1] + l)
        if self.tail is not None and self.tail != INF:
            points.append(points[-1] + self.tail)
        return points

    def value_at(self, t) -> object:
        if t < 0 or t >= self.domain():
            raise PreconditionError(f"t={t} outside [0, {self.domain()})")
        acc = 0
        for v, l in self.steps:
            acc += l
            if t < acc:
                return v
        return Fraction(0)

    def lorenz(self, t) -> object:
        """Exact integral of the scale over ``[0, t]``."""
        if t < 0:
            raise PreconditionError("t must be nonnegative")
        if t > self.domain():
            raise PreconditionError(f"t={t} beyond the domain length {self.domain()}")
        total = Fraction(0)
        remaining = t
        for v, l in self.steps:
            if remaining <= 0:
                break
            take = min(l, remaining)
            total += v * take
            remaining -= take
        return total

    def level_intervals(self) -> list[tuple[object, object, object]]:
        """``(value, start, end)`` for every step, then the zero tail if present."""
        out = []
        start = Fraction(0)
        for v, l in self.steps:
            out.append((v, start, start + l))
            start += l
        if self.tail is not None:
            out.append((Fraction(0), start, start + self.tail if self.tail != INF else INF))
        return out

    def to_step_function(self) -> StepFunction:
        """Realize the scale as a step function on diffuse cells ``s1, s2, ...``."""
        cells = [Cell(f"s{k}", l, Kind.DIFFUSE) for k, (_, l) in enumerate(self.steps, 1)]
        values = [v for v, _ in self.steps]
        if self.tail == INF:
            ambient = Ambient.INFINITE
        else:
            ambient = Ambient.FINITE
            if self.tail is not None:
                cells.append(Cell("zero", self.tail, Kind.DIFFUSE))
                values.append(Fraction(0))
        return StepFunction(MeasureSpace(tuple(cells), ambient), tuple(values))


def _merge_runs(pairs: Iterable[tuple[object, object]]) -> list[tuple[object, object]]:
    out: list[list] = []
    for v, w in pairs:
        if out and out[-1][0] == v:
            out[-1][1] += w
        else:
            out.append([v, w])
    return [(v, w) for v, w in out]


def mu(x: StepFunction) -> SpectralScale:
    """Decreasing rearrangement of ``|x|`` (ties keep cell order, runs merged)."""
    pairs = sorted(((abs(v), c.weight) for c, v in x.items() if v != 0), key=lambda p: -p[0])
    steps = _merge_runs(pairs)
    if x.space.infinite:
        return SpectralScale(tuple(steps), INF)
    zero = x.space.cell_measure() - sum((w for _, w in steps), Fraction(0))
    return SpectralScale(tuple(steps), zero if zero > 0 else None)


def lambda_scale(x: StepFunction) -> SpectralScale:
    """The eigenvalue function of ``x``.

    With infinite ambient this is ``mu(pos_part(x))``. With finite ambient it
    is the signed decreasing rearrangement over the whole space; a trailing
    zero run becomes the tail when no negative value follows it.
    """
    if x.space.infinite:
        return mu(pos_part(x))
    pairs = sorted(((v, c.weight) for c, v in x.items()), key=lambda p: -p[0])
    steps = _merge_runs(pairs)
    if steps and steps[-1][0] == 0:
        return SpectralScale(tuple(steps[:-1]), steps[-1][1])
    return SpectralScale(tuple(steps), None)


def distribution(x: StepFunction, t) -> ExtRational:
    """Measure of the set where ``x > t``."""
    if t < 0 and x.space.infinite:
        return INF
    return sum((c.weight for c, v in x.items() if v > t), Fraction(0))


def pos_part(x: StepFunction) -> StepFunction:
    return x.map(lambda v: v if v > 0 else 0 * v)


def neg_part(x: StepFunction) -> StepFunction:
    return x.map(lambda v: -v if v < 0 else 0 * v)


def trace(x: StepFunction):
    return sum((v * c.weight for c, v in x.items()), Fraction(0))


def lorenz(s: SpectralScale, t):
    return s.lorenz(t)


@dataclass(frozen=True)
class PiecewiseLinearConvex:
    """A convex piecewise-linear function on the real line.

    ``slopes[i]`` is the slope on the i-th piece, where the pieces are cut at
    ``breakpoints`` (so there is one more slope than breakpoint).
    ``value_at_zero`` anchors the function.
    """

    breakpoints: tuple[Fraction, ...]
    slopes: tuple[Fraction, ...]
    value_at_zero: Fraction = Fraction(0)

    def __post_init__(self):
        bps = tuple(Fraction(b) for b in self.breakpoints)
        slopes = tuple(Fraction(s) for s in self.slopes)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "slopes", slopes)
        object.__setattr__(self, "value_at_zero", Fraction(self.value_at_zero))
        if len(slopes) != len(bps) + 1:
            raise DataError("need exactly one more slope than breakpoints", "slopes")
        if any(a >= b for a, b in pairwise(bps)):
            raise DataError("breakpoints must be strictly increasing", "breakpoints")
        if any(a > b for a, b in pairwise(slopes)):
            raise DataError("slopes must be nondecreasing for convexity", "slopes")

    @classmethod
    def hinge(cls, r) -> "PiecewiseLinearConvex":
        """``t -> max(t - r, 0)``."""
        r = Fraction(r)
        return cls((r,), (Fraction(0), Fraction(1)), max(-r, Fraction(0)))

    @classmethod
    def neg_hinge(cls, r) -> "PiecewiseLinearConvex":
        """``t -> max(-t - r, 0)``."""
        r = Fraction(r)
        return cls((-r,), (Fraction(-1), Fraction(0)), max(-r, Fraction(0)))

    @classmethod
    def abs_shift(cls, r) -> "PiecewiseLinearConvex":
        """``t -> |t - r|``."""
        r = Fraction(r)
        return cls((r,), (Fraction(-1), Fraction(1)), abs(r))

    @classmethod
    def linear(cls, c) -> "PiecewiseLinearConvex":
        return cls((), (Fraction(c),))

    def slope_at(self, t) -> Fraction:
        return self.slopes[bisect.bisect_right(self.breakpoints, t)]

    def __call__(self, t):
        lo, hi, sign = (Fraction(0), t, 1) if t >= 0 else (t, Fraction(0), -1)
        edges = [lo, *(b for b in self.breakpoints if lo < b < hi), hi]
        total = sum((self.slope_at((a + b) / 2) * (b - a) for a, b in pairwise(edges)), Fraction(0))
        return self.value_at_zero + sign * total


def apply_convex(f: PiecewiseLinearConvex, x: StepFunction) -> StepFunction:
    if x.space.infinite and f.value_at_zero != 0:
        raise PreconditionError("f(0) must be 0 on a space with infinite ambient")
    return x.map(f)
