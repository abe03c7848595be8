"""Block decomposition and block transfers for infinite-trace spaces.

For ``x`` majorized by ``y`` on a space with infinite ambient, the supports
are cut into finitely many blocks ``(A_n, B_n)`` of equal finite measure,
with ``A_n`` on the ``y`` side and ``B_n`` on the ``x`` side, such that ``x``
restricted to ``B_n`` is majorized by ``y`` restricted to ``A_n``. Padding
measure is drawn from an adjoined infinite diffuse piece and carries ids of
the form ``pad/...``. A doubly stochastic map per block then assembles into
one operator on the enlarged space sending ``y (+) 0`` to ``x (+) 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotMajorized, PreconditionError
from .majorization import majorize
from .measure import Ambient, Cell, Kind, MeasureSpace, StepFunction, neg_part, pos_part, trace
from .transfer import TransferMap, apply_transfer, construct_transfer, verify_transfer

PAD_PREFIX = "pad/"


@dataclass(frozen=True)
class Selection:
    cell_id: str
    weight: Fraction


@dataclass(frozen=True)
class BlockPair:
    a_cells: tuple[Selection, ...]
    b_cells: tuple[Selection, ...]
    block_measure: Fraction


@dataclass(frozen=True)
class _Piece:
    cell: Cell
    start: Fraction
    end: Fraction


def _layout(part: StepFunction) -> list[_Piece]:
    """Cells of a nonnegative function laid out along its decreasing rearrangement."""
    cells = sorted(((c, v) for c, v in part.items() if v > 0), key=lambda p: -p[1])
    out, t = [], Fraction(0)
    for c, _ in cells:
        out.append(_Piece(c, t, t + c.weight))
        t += c.weight
    return out


def _lorenz_at(layout: list[_Piece], part: StepFunction, t: Fraction) -> Fraction:
    total = Fraction(0)
    for p in layout:
        if p.start >= t:
            break
        total += part.value(p.cell.id) * (min(p.end, t) - p.start)
    return total


def _inside_atom(layout: list[_Piece], t: Fraction) -> bool:
    return any(p.cell.kind is Kind.ATOM and p.start < t < p.end for p in layout)


def _admissible_cuts(xp: StepFunction, yp: StepFunction) -> tuple[list[Fraction], Fraction | None]:
    """Touching points of the two Lorenz curves usable as block boundaries.

    Returns the cut list and, when ``tau(y_+) > tau(x_+)``, the start of the
    remainder region (the last usable cut); otherwise None.
    """
    lx, ly = _layout(xp), _layout(yp)
    end_x = lx[-1].end if lx else Fraction(0)
    end_y = ly[-1].end if ly else Fraction(0)
    points = sorted({Fraction(0), end_x, end_y} | {p.end for p in lx} | {p.end for p in ly})
    cuts = [
        t for t in points
        if _lorenz_at(ly, yp, t) == _lorenz_at(lx, xp, t) and not _inside_atom(lx, t) and not _inside_atom(ly, t)
    ]
    if trace(yp) == trace(xp):
        return cuts, None
    return cuts, cuts[-1]


def _slice(layout: list[_Piece], a: Fraction, b: Fraction) -> list[Selection]:
    out = []
    for p in layout:
        lo, hi = max(p.start, a), min(p.end, b)
        if lo < hi:
            out.append(Selection(p.cell.id, hi - lo))
    return out


def _measure(sel: list[Selection]) -> Fraction:
    return sum((s.weight for s in sel), Fraction(0))


def partition_decompose(x: StepFunction, y: StepFunction) -> list[BlockPair]:
    """Cut the supports of a majorized pair into balanced blocks.

    Positive parts are cut at every point where their Lorenz curves touch and
    no atom is split, likewise for negative parts. If ``tau(x_+) < tau(y_+)``
    the pieces after the last touching point on each sign form one remainder
    block; there the positive surplus and the negative surplus cancel, so the
    traces agree. Each block is padded to a common finite measure.
    """
    if not (x.space.infinite and y.space.infinite):
        raise PreconditionError("partition_decompose needs infinite ambient spaces")
    if not majorize(x, y):
        raise NotMajorized("x is not majorized by y")
    raw: list[tuple[list[Selection], list[Selection], Fraction]] = []
    remainder_a: list[Selection] = []
    remainder_b: list[Selection] = []
    for part in (pos_part, neg_part):
        xp, yp = part(x), part(y)
        lx, ly = _layout(xp), _layout(yp)
        cuts, rest = _admissible_cuts(xp, yp)
        if rest is not None:
            cuts = [t for t in cuts if t <= rest]
        for a, b in zip(cuts, cuts[1:]):
            raw.append((_slice(ly, a, b), _slice(lx, a, b), b - a))
        if rest is not None:
            remainder_a += _slice(ly, rest, ly[-1].end if ly else rest)
            remainder_b += _slice(lx, rest, lx[-1].end if lx else rest)
    if remainder_a or remainder_b:
        raw.append((remainder_a, remainder_b, max(_measure(remainder_a), _measure(remainder_b))))

    blocks = []
    for k, (sel_a, sel_b, size) in enumerate(raw, 1):
        pad_a, pad_b = size - _measure(sel_a), size - _measure(sel_b)
        if pad_a > 0:
            sel_a = sel_a + [Selection(f"{PAD_PREFIX}A{k}", pad_a)]
        if pad_b > 0:
            sel_b = sel_b + [Selection(f"{PAD_PREFIX}B{k}", pad_b)]
        blocks.append(BlockPair(tuple(sel_a), tuple(sel_b), size))
    return blocks


def _block_function(sel: tuple[Selection, ...], f: StepFunction) -> StepFunction:
    cells, values = [], []
    for s in sel:
        if s.cell_id.startswith(PAD_PREFIX):
            cells.append(Cell(s.cell_id, s.weight, Kind.DIFFUSE))
            values.append(Fraction(0))
        else:
            kind = f.space.cell(s.cell_id).kind
            cells.append(Cell(s.cell_id, s.weight, kind))
            values.append(f.value(s.cell_id))
    return StepFunction(MeasureSpace(tuple(cells), Ambient.FINITE), tuple(values))


def block_functions(block: BlockPair, x: StepFunction, y: StepFunction) -> tuple[StepFunction, StepFunction]:
    """``(x on B, y on A)`` as step functions on finite spaces."""
    return _block_function(block.b_cells, x), _block_function(block.a_cells, y)


def partition_problems(x: StepFunction, y: StepFunction, blocks: list[BlockPair]) -> list[str]:
    """Everything wrong with a partition; empty when it is sound."""
    problems = []
    for side, f, attr in (("A", y, "a_cells"), ("B", x, "b_cells")):
        used: dict[str, Fraction] = {}
        for blk in blocks:
            for s in getattr(blk, attr):
                if s.cell_id.startswith(PAD_PREFIX):
                    continue
                used[s.cell_id] = used.get(s.cell_id, Fraction(0)) + s.weight
                cell = f.space.cell(s.cell_id)
                if cell.kind is Kind.ATOM and s.weight != cell.weight:
                    problems.append(f"{side}: atom {s.cell_id} split")
        for c, v in f.items():
            want = c.weight if v != 0 else Fraction(0)
            if used.get(c.id, Fraction(0)) != want:
                problems.append(f"{side}: cell {c.id} covered {used.get(c.id, 0)} of {want}")
    for k, blk in enumerate(blocks, 1):
        if _measure(list(blk.a_cells)) != blk.block_measure or _measure(list(blk.b_cells)) != blk.block_measure:
            problems.append(f"block {k}: unbalanced")
            continue
        xb, ya = block_functions(blk, x, y)
        if not majorize(xb, ya):
            problems.append(f"block {k}: restricted pair not majorized")
    return problems


@dataclass(frozen=True)
class BlockTransfer:
    blocks: tuple[tuple[BlockPair, TransferMap], ...]

    def image(self, y: StepFunction) -> dict[str, list[tuple[Fraction, Fraction]]]:
        """Apply every block map to ``y``; returns x-side id -> [(piece weight, value)]."""
        out: dict[str, list[tuple[Fraction, Fraction]]] = {}
        for blk, a in self.blocks:
            ya = _block_function(blk.a_cells, y)
            img = apply_transfer(a, ya)
            for s, v in zip(blk.b_cells, img.values):
                out.setdefault(s.cell_id, []).append((s.weight, v))
        return out

    def maps_to(self, x: StepFunction, y: StepFunction) -> bool:
        """Exact check that the assembled map sends ``y (+) 0`` to ``x (+) 0``."""
        img = self.image(y)
        for cid, pieces in img.items():
            want = Fraction(0) if cid.startswith(PAD_PREFIX) else x.value(cid)
            if any(v != want for _, v in pieces):
                return False
        return all(cid in img for cid in x.support())


def block_transfer(x: StepFunction, y: StepFunction, max_slots: int | None = None) -> BlockTransfer:
    """Doubly stochastic block maps on the enlarged space sending ``y`` to ``x``."""
    blocks = partition_decompose(x, y)
    out = []
    for blk in blocks:
        xb, ya = block_functions(blk, x, y)
        a = construct_transfer(xb, ya, max_slots)
        if verify_transfer(a):
            raise AssertionError("block map failed verification")
        out.append((blk, a))
    return BlockTransfer(tuple(out))
