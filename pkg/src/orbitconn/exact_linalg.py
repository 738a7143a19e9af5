"""Exact sparse linear algebra over the rationals.

Scalars are :class:`fractions.Fraction`.  Matrices are stored row-wise as
sparse dicts.  Elimination runs on integer rows (denominators cleared per
row) through one of two interchangeable kernels:

* ``compiled`` -- the Cython int64 kernel with overflow traps, and
* ``python``   -- the big-integer pure-Python kernel.

The compiled kernel is used when importable; if it overflows on a system the
same system is rerun on the Python kernel, so results never depend on which
kernel ran.  Pivoting is deterministic: rows are scanned in ``scan_order``
(fewest nonzeros first, ties by lowest index) and each new pivot sits at the
lowest nonzero column of its reduced row.
"""

from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Iterator, Mapping, Sequence

from . import _echelon_py

try:
    from . import _echelon as _echelon_c
except ImportError:  # pragma: no cover - depends on build
    _echelon_c = None

log = logging.getLogger(__name__)

__all__ = [
    "AffineSolution",
    "DimensionMismatch",
    "Infeasible",
    "MatrixQ",
    "available_backends",
    "backend",
    "inverse",
    "nullspace",
    "rank",
    "solve_affine",
    "use_backend",
]

ZERO = Fraction(0)


class DimensionMismatch(ValueError):
    """Matrix and right-hand side (or operands) have incompatible shapes."""


# ---------------------------------------------------------------------------
# kernel selection

_BACKEND = "compiled" if _echelon_c is not None else "python"


def available_backends() -> list[str]:
    return (["compiled"] if _echelon_c is not None else []) + ["python"]


def backend() -> str:
    """Name of the elimination kernel currently in use."""
    return _BACKEND


@contextmanager
def use_backend(name: str) -> Iterator[None]:
    """Temporarily force a kernel (``"compiled"`` or ``"python"``)."""
    global _BACKEND
    if name not in available_backends():
        raise ValueError(f"backend {name!r} not available; have {available_backends()}")
    old = _BACKEND
    _BACKEND = name
    try:
        yield
    finally:
        _BACKEND = old


def _run_kernel(rows, pivot_limit: int, ncols_total: int):
    if _BACKEND == "compiled":
        try:
            return _echelon_c.echelon(rows, pivot_limit, ncols_total)
        except OverflowError:
            log.debug("int64 kernel overflowed; rerunning on big-integer kernel")
    return _echelon_py.echelon(rows, pivot_limit, ncols_total)


def scan_order(rows) -> list[int]:
    """Order in which rows enter elimination: sparsest first, then by index.

    The set of pivot columns (hence every solution and nullspace basis) does
    not depend on this order; sparsest-first keeps integer growth small.
    """
    return sorted(range(len(rows)), key=lambda i: (len(rows[i][0]), i))


def _echelon(rows, pivot_limit: int, ncols_total: int, order: list[int] | None = None):
    """Echelon ``rows`` in ``order``; sources and bad index refer to ``rows``."""
    if order is None:
        order = scan_order(rows)
    pivots, sources, bad, bad_row = _run_kernel([rows[i] for i in order], pivot_limit, ncols_total)
    return pivots, [order[k] for k in sources], (order[bad] if bad >= 0 else -1), bad_row


# ---------------------------------------------------------------------------
# matrices


class MatrixQ:
    """Immutable sparse rational matrix.

    No stored entry is zero and every index is in range.
    """

    __slots__ = ("_nrows", "_ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[Mapping[int, Fraction]] | None = None):
        if nrows < 0 or ncols < 0:
            raise DimensionMismatch("negative shape")
        self._nrows = nrows
        self._ncols = ncols
        if rows is None:
            rows = [{} for _ in range(nrows)]
        if len(rows) != nrows:
            raise DimensionMismatch(f"expected {nrows} rows, got {len(rows)}")
        clean = []
        for r in rows:
            d = {}
            for c, v in r.items():
                if not 0 <= c < ncols:
                    raise DimensionMismatch(f"column {c} outside 0..{ncols - 1}")
                if v:
                    d[c] = Fraction(v)
            clean.append(d)
        self._rows = tuple(clean)

    @classmethod
    def from_dense(cls, data: Sequence[Sequence], ncols: int | None = None) -> MatrixQ:
        data = [list(r) for r in data]
        if ncols is None:
            ncols = len(data[0]) if data else 0
        if any(len(r) != ncols for r in data):
            raise DimensionMismatch("ragged dense matrix")
        return cls(len(data), ncols, [{j: v for j, v in enumerate(r) if v} for r in data])

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Mapping[tuple[int, int], Fraction]) -> MatrixQ:
        rows: list[dict[int, Fraction]] = [{} for _ in range(nrows)]
        for (i, j), v in entries.items():
            if not 0 <= i < nrows:
                raise DimensionMismatch(f"row {i} outside 0..{nrows - 1}")
            rows[i][j] = v
        return cls(nrows, ncols, rows)

    @classmethod
    def identity(cls, n: int) -> MatrixQ:
        return cls(n, n, [{i: Fraction(1)} for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> MatrixQ:
        return cls(nrows, ncols)

    @property
    def shape(self) -> tuple[int, int]:
        return self._nrows, self._ncols

    @property
    def nrows(self) -> int:
        return self._nrows

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def rows(self) -> tuple[dict[int, Fraction], ...]:
        return self._rows

    @property
    def entries(self) -> dict[tuple[int, int], Fraction]:
        return {(i, j): v for i, r in enumerate(self._rows) for j, v in r.items()}

    def nnz(self) -> int:
        return sum(len(r) for r in self._rows)

    def to_dense(self) -> list[list[Fraction]]:
        out = [[ZERO] * self._ncols for _ in range(self._nrows)]
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                out[i][j] = v
        return out

    def transpose(self) -> MatrixQ:
        cols: list[dict[int, Fraction]] = [{} for _ in range(self._ncols)]
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                cols[j][i] = v
        return MatrixQ(self._ncols, self._nrows, cols)

    def matvec(self, x: Sequence) -> list[Fraction]:
        if len(x) != self._ncols:
            raise DimensionMismatch(f"vector length {len(x)} != {self._ncols}")
        return [sum((v * x[j] for j, v in r.items()), ZERO) for r in self._rows]

    def rmatvec(self, y: Sequence) -> list[Fraction]:
        """Return ``yᵀA``."""
        if len(y) != self._nrows:
            raise DimensionMismatch(f"vector length {len(y)} != {self._nrows}")
        out = [ZERO] * self._ncols
        for yi, r in zip(y, self._rows):
            if yi:
                for j, v in r.items():
                    out[j] += yi * v
        return out

    def __matmul__(self, other: MatrixQ) -> MatrixQ:
        if self._ncols != other._nrows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        rows = []
        for r in self._rows:
            acc: dict[int, Fraction] = {}
            for k, v in r.items():
                for j, w in other._rows[k].items():
                    acc[j] = acc.get(j, ZERO) + v * w
            rows.append(acc)
        return MatrixQ(self._nrows, other._ncols, rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatrixQ):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.shape, tuple(tuple(sorted(r.items())) for r in self._rows)))

    def __repr__(self) -> str:
        return f"MatrixQ({self._nrows}x{self._ncols}, nnz={self.nnz()})"


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class AffineSolution:
    """Solution set ``particular + span(nullspace_basis)`` of ``Ax = b``."""

    particular: tuple[Fraction, ...]
    nullspace_basis: tuple[tuple[Fraction, ...], ...]
    pivot_columns: tuple[int, ...] = field(default=(), compare=False)
    feasible = True

    @property
    def dim(self) -> int:
        return len(self.nullspace_basis)


@dataclass(frozen=True)
class Infeasible:
    """``Ax = b`` has no solution; ``yᵀA = 0`` and ``yᵀb ≠ 0``.

    ``certificate`` maps row index to the (integer, content-1) coefficient of
    ``y``; rows not listed have coefficient zero.
    """

    certificate: dict[int, Fraction]
    nrows: int
    feasible = False

    def vector(self) -> list[Fraction]:
        y = [ZERO] * self.nrows
        for i, v in self.certificate.items():
            y[i] = v
        return y


# ---------------------------------------------------------------------------
# operations


def _integer_row(row: Mapping[int, Fraction], extra: Iterable[tuple[int, Fraction]] = ()):
    items = sorted([(c, Fraction(v)) for c, v in row.items() if v] + [(c, Fraction(v)) for c, v in extra if v])
    if not items:
        return [], []
    den = lcm(*(v.denominator for _, v in items))
    vals = [v.numerator * (den // v.denominator) for _, v in items]
    g = gcd(*vals)
    return [c for c, _ in items], [v // g for v in vals]


def rank(A: MatrixQ) -> int:
    """Exact rank of ``A`` over the rationals."""
    rows = [_integer_row(r) for r in A.rows]
    pivots, _, _, _ = _echelon(rows, A.ncols, A.ncols)
    return len(pivots)


def _back_substitute(pivots, ncols: int, with_rhs: bool):
    """Solve an echelon system.

    Returns the particular solution (free variables zero) and the nullspace
    basis (one vector per free column, unit there).
    """
    piv_cols = [cols[0] for cols, _ in pivots]
    is_pivot = set(piv_cols)
    free = [j for j in range(ncols) if j not in is_pivot]
    free_pos = {j: k for k, j in enumerate(free)}
    # expr[p] = (constant, {free_index: coeff}) with x_p = constant + Σ coeff * t_free
    expr: dict[int, tuple[Fraction, dict[int, Fraction]]] = {}
    for cols, vals in sorted(pivots, key=lambda pv: -pv[0][0]):
        p = cols[0]
        lead = Fraction(vals[0])
        const = ZERO
        lin: dict[int, Fraction] = {}
        for c, v in zip(cols[1:], vals[1:]):
            if c == ncols:
                if with_rhs:
                    const += v
                continue
            if c in free_pos:
                k = free_pos[c]
                lin[k] = lin.get(k, ZERO) - v
            else:
                c0, l0 = expr[c]
                const -= v * c0
                for k, w in l0.items():
                    lin[k] = lin.get(k, ZERO) - v * w
        expr[p] = (const / lead, {k: w / lead for k, w in lin.items() if w})
    particular = [ZERO] * ncols
    for p, (c0, _) in expr.items():
        particular[p] = c0
    basis = []
    for k, j in enumerate(free):
        v = [ZERO] * ncols
        v[j] = Fraction(1)
        for p, (_, lin) in expr.items():
            w = lin.get(k)
            if w:
                v[p] = w
        basis.append(tuple(v))
    return tuple(particular), tuple(basis), tuple(sorted(piv_cols))


def nullspace(A: MatrixQ) -> list[tuple[Fraction, ...]]:
    """Basis of ``{x : Ax = 0}``; one vector per non-pivot column."""
    rows = [_integer_row(r) for r in A.rows]
    pivots, _, _, _ = _echelon(rows, A.ncols, A.ncols)
    _, basis, _ = _back_substitute(pivots, A.ncols, with_rhs=False)
    return list(basis)


def solve_affine(A: MatrixQ, b: Sequence) -> AffineSolution | Infeasible:
    """Solve ``Ax = b`` exactly.

    Returns the full solution set, or an :class:`Infeasible` carrying a
    left-kernel certificate.
    """
    if len(b) != A.nrows:
        raise DimensionMismatch(f"rhs length {len(b)} != {A.nrows} rows")
    n = A.ncols
    rows = [_integer_row(r, [(n, bi)]) for r, bi in zip(A.rows, b)]
    order = scan_order(rows)
    pivots, sources, bad, _ = _echelon(rows, n, n + 1, order)
    if bad < 0:
        particular, basis, piv_cols = _back_substitute(pivots, n, with_rhs=True)
        return AffineSolution(particular, basis, piv_cols)
    position = {i: k for k, i in enumerate(order)}
    return Infeasible(_certificate(A, b, sorted(sources, key=position.__getitem__), bad), A.nrows)


def _certificate(A: MatrixQ, b: Sequence, sources: list[int], bad: int) -> dict[int, Fraction]:
    # Replay only the rows that produced pivots before the bad row, plus the
    # bad row, in the original scan order, with one tag column per replayed
    # row beyond the rhs column.  The tags of the reduced bad row are the
    # left-kernel combination.
    n = A.ncols
    subset = list(sources) + [bad]
    tag0 = n + 1
    rows = []
    for k, i in enumerate(subset):
        # scale the tag by the same factor that clears the row's denominators
        items = [(c, Fraction(v)) for c, v in A.rows[i].items()] + [(n, Fraction(b[i]))]
        den = lcm(*(v.denominator for _, v in items if v)) if any(v for _, v in items) else 1
        cols = sorted(c for c, v in items if v)
        vals_map = {c: v.numerator * (den // v.denominator) for c, v in items if v}
        cols.append(tag0 + k)
        vals_map[tag0 + k] = den
        rows.append((cols, [vals_map[c] for c in cols]))
    _, _, bad2, bad_row = _echelon(rows, n, tag0 + len(subset), list(range(len(rows))))
    if bad2 != len(subset) - 1:
        raise RuntimeError("certificate replay diverged from the original elimination")
    cols, vals = bad_row
    y = {subset[c - tag0]: Fraction(v) for c, v in zip(cols, vals) if c >= tag0}
    g = gcd(*(int(v) for v in y.values()))
    y = {i: v / g for i, v in sorted(y.items())}
    # exact self-check: yᵀA = 0, yᵀb ≠ 0
    acc: dict[int, Fraction] = {}
    for i, yi in y.items():
        for j, v in A.rows[i].items():
            acc[j] = acc.get(j, ZERO) + yi * v
    if any(acc.values()) or sum((yi * Fraction(b[i]) for i, yi in y.items()), ZERO) == 0:
        raise RuntimeError("left-kernel certificate failed verification")
    return y


def inverse(A: MatrixQ) -> MatrixQ:
    """Exact inverse of a square nonsingular matrix."""
    n, m = A.shape
    if n != m:
        raise DimensionMismatch("inverse of a non-square matrix")
    cols = []
    for j in range(n):
        e = [ZERO] * n
        e[j] = Fraction(1)
        sol = solve_affine(A, e)
        if not sol.feasible or sol.dim:
            raise ZeroDivisionError("matrix is singular")
        cols.append(sol.particular)
    return MatrixQ(n, n, [{j: cols[j][i] for j in range(n) if cols[j][i]} for i in range(n)])
