"""Hermitian matrices: eigenvalue majorization and doubly stochastic maps.

A matrix is held through a spectral presentation ``U diag(eigs) U*`` with
eigenvalues sorted in decreasing order. The exact path allows only signed
permutation bases and rational eigenvalues, so everything stays in
Fractions. The numeric path diagonalizes with numpy and compares with a
tolerance.

A doubly stochastic map from ``Y`` to ``X`` is built as
``Z -> U_x diag(A d) U_x*`` with ``d`` the diagonal of ``U_y* Z U_y`` and
``A`` a doubly stochastic matrix sending the eigenvalues of ``Y`` to those
of ``X``. Taking the diagonal is a conditional expectation, so the
composite is positive, unital and trace preserving.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DataError, IncompatibleSpaces, NotMajorized, PreconditionError
from .majorization import MajorizationVerdict, Reason, convex_trace, majorize
from .measure import PiecewiseLinearConvex, SpectralScale, StepFunction, lambda_scale
from .transfer import TransferMap, construct_transfer, t_transform_chain, verify_transfer
from .measure import MeasureSpace

DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SpectralPresentation:
    """``eigenvalues`` decrease; column ``i`` of the basis is an eigenvector.

    Exact: ``permutation[i]`` is the coordinate of eigenvector ``i`` and
    ``signs[i]`` its sign. Numeric: ``unitary`` holds the eigenvectors.
    """

    eigenvalues: tuple
    permutation: tuple[int, ...] | None = None
    signs: tuple[int, ...] | None = None
    unitary: np.ndarray | None = None
    tolerance: float | None = None

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def exact(self) -> bool:
        return self.unitary is None

    @classmethod
    def from_eigs(cls, eigs: Sequence, basis: str | Sequence[int] = "identity", signs: Sequence[int] | None = None) -> "SpectralPresentation":
        """Exact presentation ``P diag(eigs) P*`` for a signed permutation ``P``."""
        vals = [Fraction(v) for v in eigs]
        n = len(vals)
        perm = list(range(n)) if basis == "identity" else [int(p) for p in basis]
        if sorted(perm) != list(range(n)):
            raise DataError("basis is not a permutation of 0..n-1", "basis")
        sg = [1] * n if signs is None else [int(s) for s in signs]
        if len(sg) != n or any(s not in (1, -1) for s in sg):
            raise DataError("signs must be a list of +1/-1 of length n", "signs")
        order = sorted(range(n), key=lambda i: (-vals[i], i))
        return cls(tuple(vals[i] for i in order), tuple(perm[i] for i in order), tuple(sg[i] for i in order))

    @classmethod
    def from_matrix(cls, matrix, tolerance: float = DEFAULT_TOLERANCE) -> "SpectralPresentation":
        """Numeric presentation of a Hermitian matrix via a dense eigensolver."""
        a = np.asarray(matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DataError("matrix must be square", "entries_re")
        scale = max(1.0, float(np.linalg.norm(a)))
        if np.linalg.norm(a - a.conj().T) > tolerance * scale:
            raise DataError("matrix is not Hermitian within tolerance", "entries_im")
        w, v = np.linalg.eigh(a)
        order = sorted(range(len(w)), key=lambda i: (-w[i], i))
        p = cls(tuple(float(w[i]) for i in order), unitary=v[:, order], tolerance=tolerance)
        p.check()
        return p

    @classmethod
    def from_rational_matrix(cls, rows: Sequence[Sequence[Fraction]], tolerance: float = DEFAULT_TOLERANCE) -> "SpectralPresentation":
        """Exact when the matrix is diagonal, numeric otherwise."""
        n = len(rows)
        if all(rows[i][j] == 0 for i in range(n) for j in range(n) if i != j):
            return cls.from_eigs([rows[i][i] for i in range(n)])
        return cls.from_matrix([[float(v) for v in r] for r in rows], tolerance)

    def check(self) -> None:
        if self.exact:
            return
        u = self.unitary
        n = self.n
        tol = self.tolerance or DEFAULT_TOLERANCE
        if np.linalg.norm(u.conj().T @ u - np.eye(n)) > tol * max(1, n):
            raise PreconditionError("basis is not unitary within tolerance")

    def matrix(self):
        """The presented matrix: Fractions on the exact path, a numpy array otherwise."""
        if self.exact:
            out = [[Fraction(0)] * self.n for _ in range(self.n)]
            for i, p in enumerate(self.permutation):
                out[p][p] = self.eigenvalues[i]
            return out
        u = self.unitary
        return u @ np.diag(self.eigenvalues) @ u.conj().T

    def compress(self, z):
        """Diagonal of ``U* Z U`` as a vector."""
        if self.exact:
            return [Fraction(z[p][p]) for p in self.permutation]
        u = self.unitary
        return np.real(np.einsum("ji,jk,ki->i", u.conj(), np.asarray(z, dtype=complex), u))

    def expand(self, d):
        """``U diag(d) U*``."""
        if self.exact:
            out = [[Fraction(0)] * self.n for _ in range(self.n)]
            for i, p in enumerate(self.permutation):
                out[p][p] = d[i]
            return out
        u = self.unitary
        return u @ np.diag(np.asarray(d, dtype=float)) @ u.conj().T


def _eigen_function(p: SpectralPresentation) -> StepFunction:
    return StepFunction.on_atoms(p.eigenvalues)


def eigen_scale(p: SpectralPresentation) -> SpectralScale:
    """Decreasing eigenvalues as a unit-weight signed scale of total trace ``n``."""
    return lambda_scale(_eigen_function(p))


def _same_dimension(x: SpectralPresentation, y: SpectralPresentation) -> None:
    if x.n != y.n:
        raise IncompatibleSpaces(f"dimensions differ: {x.n} vs {y.n}")


def _tol(x: SpectralPresentation, y: SpectralPresentation, tolerance: float | None) -> float:
    if tolerance is not None:
        return tolerance
    return max(x.tolerance or DEFAULT_TOLERANCE, y.tolerance or DEFAULT_TOLERANCE)


def _numeric_majorize(xs: Sequence[float], ys: Sequence[float], tol: float) -> MajorizationVerdict:
    scale = max(1.0, max(abs(v) for v in list(xs) + list(ys)))
    sx = sy = 0.0
    for k, (a, b) in enumerate(zip(xs, ys), 1):
        sx, sy = sx + a, sy + b
        if k < len(xs) and sx > sy + tol * scale * k:
            return MajorizationVerdict(False, Fraction(k), Reason.LORENZ_POS)
    if abs(sx - sy) > tol * scale * len(xs):
        return MajorizationVerdict(False, None, Reason.TRACE_MISMATCH)
    return MajorizationVerdict(True)


def hermitian_majorize(x: SpectralPresentation, y: SpectralPresentation, tolerance: float | None = None) -> MajorizationVerdict:
    """Is the eigenvalue vector of ``x`` majorized by that of ``y``?"""
    _same_dimension(x, y)
    if x.exact and y.exact:
        return majorize(_eigen_function(x), _eigen_function(y))
    return _numeric_majorize(x.eigenvalues, y.eigenvalues, _tol(x, y, tolerance))


@dataclass(frozen=True)
class CompositeTransfer:
    analyze: SpectralPresentation
    core: TransferMap
    synthesize: SpectralPresentation

    def apply(self, z):
        d = self.analyze.compress(z)
        if self.analyze.exact and self.synthesize.exact:
            v = [sum((a * b for a, b in zip(row, d)), Fraction(0)) for row in self.core.entries]
        else:
            v = np.array(self.core.entries, dtype=float) @ np.asarray(d, dtype=float)
            return np.asarray(self.synthesize.expand(v), dtype=complex)
        return self.synthesize.expand(v)


def _numeric_core(xs: Sequence[float], ys: Sequence[float], tol: float) -> list[list[float]]:
    """Dense doubly stochastic matrix from a float T-transform chain on sorted vectors."""
    n = len(xs)
    scale = max(1.0, max(abs(v) for v in list(xs) + list(ys)))
    steps, _ = t_transform_chain(list(xs), list(ys), eps=tol * scale)
    rows = np.eye(n)
    for st in steps:
        ri, rj = rows[st.i].copy(), rows[st.j].copy()
        rows[st.i] = st.c * ri + (1 - st.c) * rj
        rows[st.j] = (1 - st.c) * ri + st.c * rj
    return rows.tolist()


def construct_hermitian_transfer(x: SpectralPresentation, y: SpectralPresentation, tolerance: float | None = None) -> CompositeTransfer:
    """A positive unital trace-preserving map sending ``Y`` to ``X``."""
    if not hermitian_majorize(x, y, tolerance):
        raise NotMajorized("eigenvalues of X are not majorized by those of Y")
    if x.exact and y.exact:
        core = construct_transfer(_eigen_function(x), _eigen_function(y))
    else:
        tol = _tol(x, y, tolerance)
        space = MeasureSpace.atoms([1] * x.n)
        core = TransferMap(space, space, tuple(tuple(r) for r in _numeric_core(x.eigenvalues, y.eigenvalues, tol)))
        bad = verify_transfer(core, tol * max(1, x.n))
        if bad:
            raise ArithmeticError(f"numeric core map failed verification: {bad[0].describe()}")
    return CompositeTransfer(y, core, x)


@dataclass(frozen=True)
class AUReport:
    eigen_majorization: bool
    hinge_sums: bool
    convex_traces: bool

    @property
    def agree(self) -> bool:
        return self.eigen_majorization == self.hinge_sums == self.convex_traces


def au_suite(x: SpectralPresentation, y: SpectralPresentation, tolerance: float | None = None) -> AUReport:
    """Eigenvalue majorization, hinge sums and hinge-family traces, side by side.

    Hinge sums compare ``sum (lambda_i - t)_+`` directly on the eigenvalue
    lists at every eigenvalue ``t``, together with equal traces. The convex
    traces route applies each hinge and the two linear maps ``t`` and ``-t``
    through the step-function calculus.
    """
    _same_dimension(x, y)
    b = bool(hermitian_majorize(x, y, tolerance))
    xs, ys = list(x.eigenvalues), list(y.eigenvalues)
    levels = sorted(set(xs) | set(ys))
    exact = x.exact and y.exact
    tol = 0 if exact else _tol(x, y, tolerance) * max(1.0, *(abs(v) for v in xs + ys)) * x.n

    def hinge(vals, t):
        return sum((v - t for v in vals if v > t), 0 * t)

    e = abs(sum(xs) - sum(ys)) <= tol and all(hinge(xs, t) <= hinge(ys, t) + tol for t in levels)
    if exact:
        fx, fy = _eigen_function(x), _eigen_function(y)
        family = [PiecewiseLinearConvex.hinge(t) for t in levels]
        family += [PiecewiseLinearConvex.linear(Fraction(1)), PiecewiseLinearConvex.linear(Fraction(-1))]
        f = all(convex_trace(fx, fy, g) for g in family)
    else:
        f = all(
            sum(max(v - t, 0.0) for v in xs) <= sum(max(v - t, 0.0) for v in ys) + tol for t in levels
        ) and sum(xs) <= sum(ys) + tol and -sum(xs) <= -sum(ys) + tol
    return AUReport(b, e, f)


def frobenius_distance(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)))
