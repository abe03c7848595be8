"""Extreme points of the orbit ``{x : x majorized by y}`` on infinite-trace spaces.

``x`` is extreme exactly when, on every level interval of ``lambda(x_+)``
(and of ``lambda(x_-)``), either the scale of ``y`` agrees with it, or the
level set is a single atom over which ``lambda(y_+)`` integrates to the
atom's share. Non-extreme inputs get an explicit midpoint decomposition
``x = (x1 + x2) / 2`` when one of three perturbation patterns applies.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import NoApplicablePattern, NotMajorized, PreconditionError
from .majorization import _partial_lorenz, majorize
from .measure import (
    INF,
    Ambient,
    Cell,
    Kind,
    MeasureSpace,
    SpectralScale,
    StepFunction,
    mu,
    neg_part,
    pos_part,
    trace,
)

AMBIENT_PREFIX = "amb/"


class Verdict(str, enum.Enum):
    MATCHES_Y = "MatchesY"
    ATOM_WITH_INTEGRAL_CONDITION = "AtomWithIntegralCondition"
    FAILS = "Fails"


@dataclass(frozen=True)
class LevelVerdict:
    sign: str  # "+" or "-"
    level: Fraction
    start: Fraction
    end: object  # Fraction or INF
    verdict: Verdict
    reason: str | None = None

    @property
    def ok(self) -> bool:
        return self.verdict is not Verdict.FAILS


@dataclass(frozen=True)
class ExtremeReport:
    extreme: bool
    per_level: tuple[LevelVerdict, ...]
    failing_level: LevelVerdict | None


class Pattern(str, enum.Enum):
    FOUR_LEVEL = "FourLevel"
    OUTSIDE_SUPPORT = "OutsideSupport"
    DIFFUSE_SPLIT = "DiffuseSplit"


@dataclass(frozen=True)
class WitnessPair:
    x1: StepFunction
    x2: StepFunction
    pattern: Pattern
    delta: Fraction


_PARTS = (("+", pos_part), ("-", neg_part))


def _values_on(s: SpectralScale, a, b) -> set:
    """Values taken by the zero-extended scale on ``[a, b)``."""
    out, start = set(), Fraction(0)
    for v, l in s.steps:
        if start < b and start + l > a:
            out.add(v)
        start += l
    if b > start:
        out.add(Fraction(0))
    return out


def _level_cells(part: StepFunction, level) -> list[Cell]:
    return [c for c, v in part.items() if v == level]


def extreme_point_check(x: StepFunction, y: StepFunction) -> ExtremeReport:
    """Decide extremality of ``x`` in the orbit of ``y`` level by level.

    The zero tail of each part counts as a level; it is never an atom, so
    it passes only when ``y``'s part also vanishes there.
    """
    if not (x.space.infinite and y.space.infinite):
        raise PreconditionError("extreme_point_check needs infinite ambient spaces")
    if not majorize(x, y):
        raise NotMajorized("x is not majorized by y")
    verdicts = []
    for sign, part in _PARTS:
        xp, yp = part(x), part(y)
        sx, sy = mu(xp), mu(yp)
        for level, a, b in sx.level_intervals():
            if _values_on(sy, a, b) == {level}:
                verdicts.append(LevelVerdict(sign, level, a, b, Verdict.MATCHES_Y))
                continue
            cells = _level_cells(xp, level) if level > 0 else []
            if len(cells) == 1 and cells[0].kind is Kind.ATOM:
                mass = _partial_lorenz(sy, b) - _partial_lorenz(sy, a)
                if mass == level * cells[0].weight:
                    verdicts.append(LevelVerdict(sign, level, a, b, Verdict.ATOM_WITH_INTEGRAL_CONDITION))
                    continue
                reason = f"integral of y over the atom interval is {mass}, expected {level * cells[0].weight}"
            elif level == 0:
                reason = "y does not vanish where x does"
            elif any(c.kind is Kind.DIFFUSE for c in _level_cells(xp, level)):
                reason = "level set contains diffuse measure and lambda(y) differs there"
            else:
                reason = f"level set spans {len(cells)} atoms"
            verdicts.append(LevelVerdict(sign, level, a, b, Verdict.FAILS, reason))
    failing = next((v for v in verdicts if not v.ok), None)
    return ExtremeReport(failing is None, tuple(verdicts), failing)


# ---------------------------------------------------------------- witnesses

def extend_by_zero(f: StepFunction, space: MeasureSpace) -> StepFunction:
    """``f`` on a space that contains all of its cells, zero elsewhere."""
    return StepFunction(space, {cid: f.value(cid) for cid in f.space.ids if cid in space})


def _pair(x: StepFunction, u: StepFunction, delta: Fraction, pattern: Pattern, y: StepFunction) -> WitnessPair | None:
    x1, x2 = x + u.scale(delta), x - u.scale(delta)
    ye = extend_by_zero(y, x.space) if y.space != x.space else y
    if majorize(x1, ye) and majorize(x2, ye):
        return WitnessPair(x1, x2, pattern, delta)
    return None


def _four_level(x: StepFunction, y: StepFunction) -> WitnessPair | None:
    for s, (_, part) in zip((1, -1), _PARTS):
        xp, yp = part(x), part(y)
        sy = mu(yp)
        levels = mu(xp).level_intervals()
        for (a1, _, b1), (a2, _, _), (a3, _, _), (a4, b3, _) in zip(levels, levels[1:], levels[2:], levels[3:]):
            lx = _partial_lorenz(mu(xp), b1)
            checkpoints = {b1, b3} | {t for t in sy.breakpoints() if t != INF and b1 < t < b3}
            if any(lx + a1 * (t - b1) > _partial_lorenz(sy, t) for t in checkpoints):
                continue
            p1 = _level_cells(xp, a2)
            p2 = _level_cells(xp, a3)
            t1 = sum((c.weight for c in p1), Fraction(0))
            t2 = sum((c.weight for c in p2), Fraction(0))
            bound = min(
                (a1 - a2) / 2,
                (a3 - a4) * t2 / (2 * t1),
                (2 * a1 - a2 - a3) * t2 / (2 * t1),
                (a2 + a3 - 2 * a4) / 2,
            )
            u = {c.id: Fraction(s) for c in p1} | {c.id: -s * t1 / t2 for c in p2}
            found = _pair(x, StepFunction(x.space, u), bound / 2, Pattern.FOUR_LEVEL, y)
            if found:
                return found
    return None


def _outside_support(x: StepFunction, y: StepFunction) -> WitnessPair | None:
    if trace(pos_part(x)) >= trace(pos_part(y)):
        return None
    p1, p2 = AMBIENT_PREFIX + "P1", AMBIENT_PREFIX + "P2"
    space = MeasureSpace(x.space.cells + (Cell(p1, Fraction(1), Kind.DIFFUSE), Cell(p2, Fraction(1), Kind.DIFFUSE)), Ambient.INFINITE)
    bounds = []
    for _, part in _PARTS:
        xp, yp = part(x), part(y)
        sx, sy = mu(xp), mu(yp)
        end = xp.support_measure()
        bounds.append(_partial_lorenz(sy, end + 1) - _partial_lorenz(sx, end))
        if sx.steps:
            bounds.append(sx.steps[-1][0])
    delta = min(bounds) / 2
    u = StepFunction(space, {p1: Fraction(1), p2: Fraction(-1)})
    return _pair(extend_by_zero(x, space), u, delta, Pattern.OUTSIDE_SUPPORT, y)


def _diffuse_split(x: StepFunction, y: StepFunction, report: ExtremeReport) -> WitnessPair | None:
    failing = [v for v in report.per_level if not v.ok and v.level > 0]
    for v in failing:
        s = 1 if v.sign == "+" else -1
        part = pos_part if s == 1 else neg_part
        sx, sy = mu(part(x)), mu(part(y))
        levels = [lv for lv, _, _ in sx.level_intervals()]
        k = levels.index(v.level)
        above = levels[k - 1] if k > 0 else None
        below = levels[k + 1] if k + 1 < len(levels) else Fraction(0)
        gap = lambda t: _partial_lorenz(sy, t) - _partial_lorenz(sx, t)
        for cell in _level_cells(part(x), v.level):
            if cell.kind is not Kind.DIFFUSE:
                continue
            w = cell.weight
            flank = min(gap(v.start + w / 2), gap(v.end - w / 2))
            if flank <= 0:
                continue
            caps = [flank / (2 * w), (v.level - below) / 2]
            if above is not None:
                caps.append((above - v.level) / 2)
            delta = min(caps)
            space, refinement = x.space.split(cell.id, [w / 2, w / 2])
            h1, h2 = refinement[cell.id]
            xr = StepFunction(space, {cid: x.value(cid) for cid in x.space.ids if cid != cell.id} | {h1: x.value(cell.id), h2: x.value(cell.id)})
            u = StepFunction(space, {h1: Fraction(s), h2: Fraction(-s)})
            found = _pair(xr, u, delta, Pattern.DIFFUSE_SPLIT, _refined_y(y, space, cell.id))
            if found:
                return found
    return None


def _refined_y(y: StepFunction, space: MeasureSpace, split_id: str) -> StepFunction:
    """``y`` on the split space; a shared cell is split along with ``x``."""
    if y.space == space:
        return y
    vals = {}
    for cid in space.ids:
        base = cid.split("#")[0] if cid.startswith(split_id + "#") else cid
        if base in y.space:
            vals[cid] = y.value(base)
    return StepFunction(space, vals)


def non_extreme_witness(x: StepFunction, y: StepFunction, report: ExtremeReport | None = None,
                        pattern: Pattern | str | None = None) -> WitnessPair:
    """Two distinct members of the orbit whose midpoint is ``x``.

    Patterns are tried in the order FourLevel, OutsideSupport, DiffuseSplit
    unless ``pattern`` picks one. Every returned pair has been checked with
    ``majorize``.
    """
    if report is None:
        report = extreme_point_check(x, y)
    if report.extreme:
        raise PreconditionError("x is an extreme point; there is no witness")
    order = [Pattern(pattern)] if pattern else list(Pattern)
    for p in order:
        if p is Pattern.FOUR_LEVEL:
            found = _four_level(x, y)
        elif p is Pattern.OUTSIDE_SUPPORT:
            found = _outside_support(x, y)
        else:
            found = _diffuse_split(x, y, report)
        if found:
            return found
    raise NoApplicablePattern("x is not extreme but no supported perturbation pattern applies")


def witness_problems(w: WitnessPair, x: StepFunction, y: StepFunction) -> list[str]:
    """Midpoint, distinctness and orbit membership, checked exactly."""
    problems = []
    space = w.x1.space
    xe = _refined_y(x, space, _split_id(x.space, space))
    ye = _refined_y(y, space, _split_id(x.space, space))
    if w.x1.space != w.x2.space:
        return ["x1 and x2 live on different spaces"]
    if (w.x1 + w.x2).scale(Fraction(1, 2)) != xe:
        problems.append("midpoint differs from x")
    if w.x1 == w.x2:
        problems.append("x1 equals x2")
    for name, f in (("x1", w.x1), ("x2", w.x2)):
        if not majorize(f, ye):
            problems.append(f"{name} is not majorized by y")
    if w.delta <= 0:
        problems.append("delta is not positive")
    return problems


def _split_id(original: MeasureSpace, refined: MeasureSpace) -> str:
    for cid in original.ids:
        if cid not in refined:
            return cid
    return "\0"


# ---------------------------------------------------------------- vertex oracle

def _rank(rows: list[list[Fraction]], width: int) -> int:
    basis: list[tuple[int, list[Fraction]]] = []
    for row in rows:
        r = list(row)
        for piv, b in basis:
            if r[piv]:
                f = r[piv] / b[piv]
                r = [u - f * v for u, v in zip(r, b)]
        piv = next((i for i, v in enumerate(r) if v), None)
        if piv is not None:
            basis.append((piv, r))
            if len(basis) == width:
                break
    return len(basis)


def extreme_vertex_oracle(x: StepFunction, y: StepFunction, ambient_slots: int | None = None) -> bool:
    """Vertex test for ``x`` in the orbit polytope, by exact linear algebra.

    Coordinates are the ``n`` atoms plus ``ambient_slots`` extra atoms of the
    same weight standing for room in the infinite remainder (default ``n``).
    ``z`` lies in the orbit iff for every coordinate set ``S``
    ``sum_S z <= L_{y+}(|S| w) / w`` and ``-sum_S z <= L_{y-}(|S| w) / w``,
    with ``w sum z = tau(y)``. ``x`` is a vertex iff its tight constraints
    have full rank.
    """
    n = len(x.space)
    cells = x.space.cells
    if not x.space.infinite or x.space != y.space or n == 0 or n > 5:
        raise PreconditionError("vertex oracle needs one infinite-ambient space of at most 5 atoms")
    w = cells[0].weight
    if any(c.kind is not Kind.ATOM or c.weight != w for c in cells):
        raise PreconditionError("vertex oracle needs atoms of equal weight")
    if not majorize(x, y):
        raise NotMajorized("x is not majorized by y")
    extra = n if ambient_slots is None else ambient_slots
    dim = n + extra
    z = list(x.values) + [Fraction(0)] * extra
    cap_pos = [_partial_lorenz(mu(pos_part(y)), k * w) / w for k in range(dim + 1)]
    cap_neg = [_partial_lorenz(mu(neg_part(y)), k * w) / w for k in range(dim + 1)]
    tight = [[Fraction(1)] * dim]
    for k in range(1, dim + 1):
        for subset in itertools.combinations(range(dim), k):
            total = sum((z[i] for i in subset), Fraction(0))
            if total == cap_pos[k] or -total == cap_neg[k]:
                tight.append([Fraction(int(i in subset)) for i in range(dim)])
    return _rank(tight, dim) == dim
