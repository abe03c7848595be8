"""Majorization predicates and their equivalent criteria.

Every predicate is decided exactly at finitely many checkpoints:

* Lorenz curves of step functions are concave and piecewise linear, so the
  difference of two of them is linear between the union of their breakpoints
  and it suffices to compare at those breakpoints.
* ``t -> tau((x - t)_+)`` is convex and piecewise linear with kinks at the
  values of ``x``, so cut and hinge comparisons only need the values (and 0).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import IncompatibleSpaces, PreconditionError
from .exactlp import feasible_point
from .measure import (
    Kind,
    PiecewiseLinearConvex,
    SpectralScale,
    StepFunction,
    apply_convex,
    lambda_scale,
    mu,
    neg_part,
    pos_part,
    trace,
)


class Reason(str, enum.Enum):
    OK = "Ok"
    LORENZ_POS = "LorenzPos"
    LORENZ_NEG = "LorenzNeg"
    TRACE_MISMATCH = "TraceMismatch"


@dataclass(frozen=True)
class MajorizationVerdict:
    holds: bool
    witness_t: Fraction | None = None
    reason: Reason = Reason.OK

    def __bool__(self) -> bool:
        return self.holds


OK = MajorizationVerdict(True)


def _fail(reason: Reason, t=None) -> MajorizationVerdict:
    return MajorizationVerdict(False, t, reason)


def _partial_lorenz(s: SpectralScale, t):
    """Lorenz integral of the zero-extended scale, without a domain check."""
    total = Fraction(0)
    for v, l in s.steps:
        if t <= 0:
            break
        take = min(l, t)
        total += v * take
        t -= take
    return total


def _step_ends(s: SpectralScale) -> list:
    ends, acc = [], Fraction(0)
    for _, l in s.steps:
        acc += l
        ends.append(acc)
    return ends


def _compare_scales(sx: SpectralScale, sy: SpectralScale, reason: Reason, upto=None) -> MajorizationVerdict:
    points = sorted(set(_step_ends(sx)) | set(_step_ends(sy)))
    if upto is not None:
        points = [t for t in points if t < upto]
    for t in points:
        if _partial_lorenz(sx, t) > _partial_lorenz(sy, t):
            return _fail(reason, t)
    return OK


def check_compatible(x: StepFunction, y: StepFunction) -> None:
    """Both spaces must have the same ambient kind and the same total trace."""
    if x.space.ambient is not y.space.ambient:
        raise IncompatibleSpaces("x and y have different ambient kinds")
    if not x.space.infinite and x.space.total() != y.space.total():
        raise IncompatibleSpaces(f"total traces differ: {x.space.total()} vs {y.space.total()}")


def submajorize(x: StepFunction, y: StepFunction, reason: Reason = Reason.LORENZ_POS) -> MajorizationVerdict:
    """Is ``x`` submajorized by ``y`` (Lorenz curves of ``|x|`` below those of ``|y|``)?"""
    if x.space.ambient is not y.space.ambient:
        raise IncompatibleSpaces("x and y have different ambient kinds")
    return _compare_scales(mu(x), mu(y), reason)


def majorize(x: StepFunction, y: StepFunction) -> MajorizationVerdict:
    """Is ``x`` majorized by ``y``?

    Infinite ambient: positive parts and negative parts are each
    submajorized and the traces agree. Finite ambient: the signed eigenvalue
    Lorenz curve of ``x`` stays below that of ``y`` with equality at the end.
    The negative-part check is run in both cases even though it is implied
    in the finite case.
    """
    check_compatible(x, y)
    if x.space.infinite:
        verdict = _compare_scales(mu(pos_part(x)), mu(pos_part(y)), Reason.LORENZ_POS)
        if not verdict:
            return verdict
        verdict = _compare_scales(mu(neg_part(x)), mu(neg_part(y)), Reason.LORENZ_NEG)
        if not verdict:
            return verdict
        return OK if trace(x) == trace(y) else _fail(Reason.TRACE_MISMATCH)
    total = x.space.total()
    verdict = _compare_scales(lambda_scale(x), lambda_scale(y), Reason.LORENZ_POS, upto=total)
    if not verdict:
        return verdict
    if trace(x) != trace(y):
        return _fail(Reason.TRACE_MISMATCH)
    return _compare_scales(mu(neg_part(x)), mu(neg_part(y)), Reason.LORENZ_NEG)


def _cut(x: StepFunction, t) -> Fraction:
    return sum((c.weight * (v - t) for c, v in x.items() if v > t), Fraction(0))


def _abs_levels(x: StepFunction, y: StepFunction) -> list:
    return sorted({Fraction(0)} | {abs(v) for v in x.values} | {abs(v) for v in y.values})


def cut_criterion(x: StepFunction, y: StepFunction) -> MajorizationVerdict:
    """Compare ``tau((x-t)_+)`` and ``tau((-x-t)_+)`` with those of ``y`` for ``t >= 0``."""
    check_compatible(x, y)
    levels = _abs_levels(x, y)
    for t in levels:
        if _cut(x, t) > _cut(y, t):
            return _fail(Reason.LORENZ_POS, t)
    nx, ny = -x, -y
    for t in levels:
        if _cut(nx, t) > _cut(ny, t):
            return _fail(Reason.LORENZ_NEG, t)
    return OK if trace(x) == trace(y) else _fail(Reason.TRACE_MISMATCH)


def convex_trace(x: StepFunction, y: StepFunction, f: PiecewiseLinearConvex) -> bool:
    """``tau(f(x)) <= tau(f(y))``."""
    check_compatible(x, y)
    return trace(apply_convex(f, x)) <= trace(apply_convex(f, y))


def hinge_family(x: StepFunction, y: StepFunction) -> list[tuple[Reason, Fraction, PiecewiseLinearConvex]]:
    """The finite hinge family that decides majorization for this pair.

    Finite ambient: ``(t - r)_+`` for every value ``r`` of ``x`` or ``y``.
    Infinite ambient: ``(t - r)_+`` and ``(-t - r)_+`` for ``r`` in 0 and the
    absolute values, which keeps ``f(0) = 0``.
    """
    if not x.space.infinite:
        values = sorted(set(x.values) | set(y.values))
        return [(Reason.LORENZ_POS, r, PiecewiseLinearConvex.hinge(r)) for r in values]
    levels = _abs_levels(x, y)
    family = [(Reason.LORENZ_POS, r, PiecewiseLinearConvex.hinge(r)) for r in levels]
    family += [(Reason.LORENZ_NEG, r, PiecewiseLinearConvex.neg_hinge(r)) for r in levels]
    return family


def hinge_suite(x: StepFunction, y: StepFunction) -> MajorizationVerdict:
    check_compatible(x, y)
    for reason, r, f in hinge_family(x, y):
        if not convex_trace(x, y, f):
            return _fail(reason, r)
    return OK if trace(x) == trace(y) else _fail(Reason.TRACE_MISMATCH)


def hn_supremum(x: StepFunction, s) -> Fraction:
    """Greedy maximum of ``tau(x a)`` over ``0 <= a <= 1`` with ``tau(a) <= s``.

    Fill cells in decreasing order of value while the value is positive. For
    an infinite ambient the constraint can be met with equality on the zero
    remainder, so the two formulations agree.
    """
    best = Fraction(0)
    budget = Fraction(s)
    for c, v in sorted(x.items(), key=lambda p: -p[1]):
        if v <= 0 or budget <= 0:
            break
        take = min(c.weight, budget)
        best += v * take
        budget -= take
    return best


def _equal_atoms(x: StepFunction) -> bool:
    cells = x.space.cells
    return all(c.kind is Kind.ATOM and c.weight == cells[0].weight for c in cells)


def hull_membership_oracle(x: StepFunction, y: StepFunction, max_n: int = 8) -> bool:
    """Exact test of ``x in conv{permutations of y}`` by linear feasibility.

    One variable per distinct rearrangement of ``y``, solved by the exact
    simplex in :mod:`majlab.exactlp`. Requires a finite space of at most
    ``max_n`` atoms of one common weight.
    """
    n = len(x.space)
    if x.space.infinite or y.space.infinite or n != len(y.space) or n == 0:
        raise PreconditionError("hull oracle needs two finite spaces with the same number of cells")
    if n > max_n or not (_equal_atoms(x) and _equal_atoms(y)) or x.space.cells[0].weight != y.space.cells[0].weight:
        raise PreconditionError(f"hull oracle needs at most {max_n} atoms of one common weight")
    columns = sorted(set(itertools.permutations(y.values)))
    a_eq = [[col[i] for col in columns] for i in range(n)] + [[1] * len(columns)]
    return feasible_point(a_eq, list(x.values) + [1]) is not None
