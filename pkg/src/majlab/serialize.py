"""JSON encodings of spaces, functions, maps and verdicts.

Rationals are written as decimal-free ``"p/q"`` strings and infinite
lengths as ``"inf"``. Every parse error is a :class:`DataError` naming the
offending field.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import DataError
from .extremal import ExtremeReport, WitnessPair
from .forcing import (
    Contradiction,
    ForcedEntry,
    ForcedFeasiblePrefix,
    ForcedInfeasible,
    ForcedRow,
    ForcingResult,
    Induction,
    InfeasibilityCertificate,
    Justification,
    Underdetermined,
)
from .infinite import BlockPair, BlockTransfer
from .majorization import MajorizationVerdict
from .measure import Ambient, Cell, Kind, MeasureSpace, StepFunction
from .rational import format_ext, format_rational, parse_rational
from .transfer import BirkhoffDecomposition, TransferMap


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=True) + "\n"


def load_json(path: str | Path, field: str = "input") -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON ({exc.msg} at line {exc.lineno})", field) from None
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}", field) from None


def _require(obj: Any, key: str, field: str):
    if not isinstance(obj, dict):
        raise DataError("expected an object", field)
    if key not in obj:
        raise DataError(f"missing key {key!r}", field)
    return obj[key]


def _num(v) -> str | float:
    if isinstance(v, float):
        return v
    return format_rational(v)


# ---------------------------------------------------------------- spaces and functions

def space_to_json(space: MeasureSpace) -> dict:
    return {
        "cells": [{"id": c.id, "weight": format_rational(c.weight), "kind": c.kind.value} for c in space.cells],
        "ambient": space.ambient.value,
    }


def space_from_json(obj: Any, field: str = "space") -> MeasureSpace:
    cells_raw = _require(obj, "cells", field)
    if not isinstance(cells_raw, list):
        raise DataError("expected a list", f"{field}.cells")
    cells = []
    for i, c in enumerate(cells_raw):
        where = f"{field}.cells[{i}]"
        cid = _require(c, "id", where)
        if not isinstance(cid, str) or not cid:
            raise DataError("id must be a non-empty string", f"{where}.id")
        weight = parse_rational(_require(c, "weight", where), f"{where}.weight")
        if weight <= 0:
            raise DataError(f"weight must be positive, got {c['weight']!r}", f"{where}.weight")
        kind = c.get("kind", "atom")
        if kind not in ("atom", "diffuse"):
            raise DataError(f"kind must be 'atom' or 'diffuse', got {kind!r}", f"{where}.kind")
        cells.append(Cell(cid, weight, Kind(kind)))
    ambient = obj.get("ambient", "finite")
    if ambient not in ("finite", "infinite"):
        raise DataError(f"ambient must be 'finite' or 'infinite', got {ambient!r}", f"{field}.ambient")
    return MeasureSpace(tuple(cells), Ambient(ambient))


def function_to_json(f: StepFunction) -> dict:
    return {"space": space_to_json(f.space), "values": {c.id: _num(v) for c, v in f.items()}}


def function_from_json(obj: Any, field: str = "function") -> StepFunction:
    space = space_from_json(_require(obj, "space", field), f"{field}.space")
    raw = _require(obj, "values", field)
    if isinstance(raw, list):
        if len(raw) != len(space):
            raise DataError(f"expected {len(space)} values, got {len(raw)}", f"{field}.values")
        raw = dict(zip(space.ids, raw))
    if not isinstance(raw, dict):
        raise DataError("expected an object mapping cell id to value", f"{field}.values")
    values = {}
    for cid, v in raw.items():
        if cid not in space:
            raise DataError(f"unknown cell id {cid!r}", f"{field}.values")
        values[cid] = parse_rational(v, f"{field}.values.{cid}")
    return StepFunction(space, values)


def load_function(path: str | Path, field: str = "function") -> StepFunction:
    return function_from_json(load_json(path, field), field)


# ---------------------------------------------------------------- verdicts and maps

def verdict_to_json(v: MajorizationVerdict) -> dict:
    return {
        "holds": v.holds,
        "witness_t": None if v.witness_t is None else format_rational(v.witness_t),
        "reason": v.reason.value,
    }


def map_to_json(a: TransferMap) -> dict:
    return {
        "domain": space_to_json(a.domain),
        "codomain": space_to_json(a.codomain),
        "entries": [[_num(v) for v in row] for row in a.entries],
    }


def map_from_json(obj: Any, field: str = "map") -> TransferMap:
    domain = space_from_json(_require(obj, "domain", field), f"{field}.domain")
    codomain = space_from_json(_require(obj, "codomain", field), f"{field}.codomain")
    rows = _require(obj, "entries", field)
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise DataError("expected a list of rows", f"{field}.entries")
    entries = tuple(
        tuple(parse_rational(v, f"{field}.entries[{i}][{j}]") for j, v in enumerate(r)) for i, r in enumerate(rows)
    )
    return TransferMap(domain, codomain, entries)


def decomposition_to_json(d: BirkhoffDecomposition) -> dict:
    return {"terms": [{"coefficient": format_rational(c), "permutation": list(p)} for c, p in d.terms]}


def _selections(sel) -> list:
    return [{"id": s.cell_id, "weight": format_rational(s.weight)} for s in sel]


def block_to_json(b: BlockPair) -> dict:
    return {"a": _selections(b.a_cells), "b": _selections(b.b_cells), "measure": format_rational(b.block_measure)}


def blocks_to_json(blocks: list[BlockPair]) -> dict:
    return {"blocks": [block_to_json(b) for b in blocks]}


def block_transfer_to_json(bt: BlockTransfer) -> dict:
    return {"blocks": [block_to_json(b) | {"map": map_to_json(a)} for b, a in bt.blocks]}


# ---------------------------------------------------------------- forcing

def _row_to_json(r: ForcedRow) -> dict:
    return {
        "row": r.row,
        "entries": [{"column": e.column, "value": format_rational(e.value), "justification": e.justification.value} for e in r.entries],
    }


def _row_from_json(obj: Any, field: str) -> ForcedRow:
    entries = []
    for i, e in enumerate(_require(obj, "entries", field)):
        where = f"{field}.entries[{i}]"
        try:
            just = Justification(_require(e, "justification", where))
        except ValueError:
            raise DataError("unknown justification", f"{where}.justification") from None
        entries.append(ForcedEntry(int(_require(e, "column", where)), parse_rational(_require(e, "value", where), f"{where}.value"), just))
    return ForcedRow(int(_require(obj, "row", field)), tuple(entries))


def certificate_to_json(c: InfeasibilityCertificate) -> dict:
    ind = c.induction
    con = c.contradiction
    return {
        "family": c.family,
        "forced_rows": [_row_to_json(r) for r in c.forced_rows],
        "induction": None if ind is None else {"base_row": ind.base_row, "offsets": list(ind.offsets), "identities": list(ind.identities)},
        "contradiction": {
            "kind": con.kind,
            "index": con.index,
            "cell": con.cell_id,
            "required": format_rational(con.required),
            "available": format_rational(con.available),
        },
    }


def certificate_from_json(obj: Any, field: str = "certificate") -> InfeasibilityCertificate:
    rows = tuple(_row_from_json(r, f"{field}.forced_rows[{i}]") for i, r in enumerate(_require(obj, "forced_rows", field)))
    ind_raw = obj.get("induction")
    ind = None
    if ind_raw is not None:
        ind = Induction(int(ind_raw["base_row"]), tuple(ind_raw["offsets"]), tuple(ind_raw["identities"]))
    con = _require(obj, "contradiction", field)
    contradiction = Contradiction(
        con["kind"], int(con["index"]), con["cell"],
        parse_rational(con["required"], f"{field}.contradiction.required"),
        parse_rational(con["available"], f"{field}.contradiction.available"),
    )
    return InfeasibilityCertificate(_require(obj, "family", field), rows, ind, contradiction)


def forcing_to_json(r: ForcingResult) -> dict:
    if isinstance(r, ForcedInfeasible):
        return {"result": "ForcedInfeasible", "certificate": certificate_to_json(r.certificate)}
    if isinstance(r, ForcedFeasiblePrefix):
        return {"result": "ForcedFeasiblePrefix", "rows": [_row_to_json(x) for x in r.rows]}
    assert isinstance(r, Underdetermined)
    return {"result": "Underdetermined", "row": r.row, "reason": r.reason, "rows": [_row_to_json(x) for x in r.rows]}


# ---------------------------------------------------------------- extremal

def report_to_json(r: ExtremeReport) -> dict:
    def level(v):
        return {
            "sign": v.sign,
            "level": format_rational(v.level),
            "interval": [format_rational(v.start), format_ext(v.end)],
            "verdict": v.verdict.value,
            "reason": v.reason,
        }

    return {
        "extreme": r.extreme,
        "per_level": [level(v) for v in r.per_level],
        "failing_level": None if r.failing_level is None else level(r.failing_level),
    }


def witness_to_json(w: WitnessPair) -> dict:
    return {
        "pattern": w.pattern.value,
        "delta": format_rational(w.delta),
        "x1": function_to_json(w.x1),
        "x2": function_to_json(w.x2),
    }


# ---------------------------------------------------------------- matrices

def _matrix_entry(v, field: str):
    if isinstance(v, str):
        return parse_rational(v, field)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise DataError(f"expected a number or 'p/q' string, got {v!r}", field)
    return v


def presentation_from_json(obj: Any, field: str = "matrix", tolerance: float | None = None):
    """``{"eigs", "basis"[, "signs"]}`` (exact) or ``{"n", "entries_re", "entries_im"}``.

    A dense matrix with rational string entries, zero imaginary part and no
    off-diagonal entries stays on the exact path.
    """
    from .hermitian import DEFAULT_TOLERANCE, SpectralPresentation

    tol = DEFAULT_TOLERANCE if tolerance is None else tolerance
    if not isinstance(obj, dict):
        raise DataError("expected an object", field)
    if "eigs" in obj:
        eigs = obj["eigs"]
        if not isinstance(eigs, list):
            raise DataError("expected a list", f"{field}.eigs")
        vals = [parse_rational(v, f"{field}.eigs[{i}]") for i, v in enumerate(eigs)]
        basis = obj.get("basis", "identity")
        if basis != "identity" and not (isinstance(basis, list) and all(isinstance(b, int) for b in basis)):
            raise DataError("basis must be 'identity' or a list of indices", f"{field}.basis")
        if isinstance(basis, list) and len(basis) != len(vals):
            raise DataError(f"basis must have length {len(vals)}", f"{field}.basis")
        return SpectralPresentation.from_eigs(vals, basis, obj.get("signs"))
    n = _require(obj, "n", field)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise DataError("n must be a positive integer", f"{field}.n")
    re_rows = _require(obj, "entries_re", field)
    im_rows = obj.get("entries_im", [[0] * n for _ in range(n)])
    grids = []
    for key, rows in (("entries_re", re_rows), ("entries_im", im_rows)):
        if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
            raise DataError(f"expected an {n}x{n} list of lists", f"{field}.{key}")
        grids.append([[_matrix_entry(v, f"{field}.{key}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(rows)])
    re_g, im_g = grids
    exact = all(isinstance(v, Fraction) for r in re_g for v in r) and all(v == 0 for r in im_g for v in r)
    if exact:
        return SpectralPresentation.from_rational_matrix(re_g, tol)
    return SpectralPresentation.from_matrix(
        [[complex(float(re_g[i][j]), float(im_g[i][j])) for j in range(n)] for i in range(n)], tol
    )


def presentation_to_json(p) -> dict:
    if p.exact:
        return {"eigs": [format_rational(v) for v in p.eigenvalues], "basis": list(p.permutation), "signs": list(p.signs)}
    m = p.matrix()
    return {
        "n": p.n,
        "entries_re": [[float(v.real) for v in row] for row in m],
        "entries_im": [[float(v.imag) for v in row] for row in m],
    }

