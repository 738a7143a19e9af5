"""Invariant connections on a nilpotent orbit as an exact affine system.

An invariant connection is a linear map ``Γ: g -> End(g/h)`` with

* ``I``    ``Γ_α = ad α`` induced on ``g/h`` for ``α ∈ h``;
* ``IIp``  ``Γ_[α,ξ] = [Γ_α, Γ_ξ]`` for ``α ∈ h``, ``ξ ∈ g``;
* ``ADH``  (optional normalization) ``Γ_[h,ξ] = [ad h, Γ_ξ]``.

Condition ``I`` pins ``Γ`` on ``h``, so the unknowns are only the slices
``Γ_m`` for ``m`` in the complement basis, and ``IIp``/``ADH`` become affine
equations in them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable

import numpy as np

from .exact_linalg import AffineSolution, Infeasible, MatrixQ, solve_affine
from .lie_core import LieElement
from .orbits import OrbitContext, induced_operator

log = logging.getLogger(__name__)

__all__ = [
    "ConnectionSpace",
    "ConstraintSystem",
    "GammaTensor",
    "MissingConditionI",
    "ADH",
    "I",
    "IIP",
    "assemble",
    "average_equivalence_check",
    "covariant_derivative",
    "parse_conditions",
    "satisfies_iip",
    "solve_connection_space",
]

I, IIP, ADH = "I", "IIp", "adh"
_CANON = {"i": I, "iip": IIP, "ii'": IIP, "adh": ADH}

TAG_I, TAG_IIP, TAG_ADH = "COND_I_FOLDED", "COND_IIP", "COND_ADH"


class MissingConditionI(ValueError):
    pass


def parse_conditions(spec: str | Iterable[str]) -> frozenset[str]:
    """``"I,IIp,adh"`` -> ``{"I", "IIp", "adh"}`` (case-insensitive)."""
    items = spec.split(",") if isinstance(spec, str) else list(spec)
    out = set()
    for item in items:
        key = item.strip().lower()
        if not key:
            continue
        if key not in _CANON:
            raise ValueError(f"unknown condition {item!r}; expected I, IIp, adh")
        out.add(_CANON[key])
    return frozenset(out)


def _zeros(n: int) -> np.ndarray:
    return np.full((n, n), Fraction(0), dtype=object)


@dataclass(eq=False)
class GammaTensor:
    """``Γ`` as one ``dim m x dim m`` slice per Chevalley basis vector of ``g``.

    ``homogeneous`` tensors are directions in the solution space: their
    condition-I slices vanish instead of equalling the induced operators.
    """

    entries: np.ndarray  # shape (dim g, dim m, dim m), object dtype
    ctx: OrbitContext = field(repr=False)
    homogeneous: bool = False

    def slice(self, b: int) -> np.ndarray:
        return self.entries[b]

    def of(self, x: LieElement) -> np.ndarray:
        """``Γ_x`` for an arbitrary element ``x``."""
        n = self.ctx.dim_m
        out = _zeros(n)
        for b, c in x.sparse().items():
            out = out + c * self.entries[b]
        return out

    def __add__(self, other: GammaTensor) -> GammaTensor:
        return GammaTensor(self.entries + other.entries, self.ctx, self.homogeneous and other.homogeneous)

    def __sub__(self, other: GammaTensor) -> GammaTensor:
        return GammaTensor(self.entries - other.entries, self.ctx, self.homogeneous and other.homogeneous)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GammaTensor):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(np.all(self.entries == other.entries))

    def sparse_entries(self) -> list[tuple[int, int, int, Fraction]]:
        return [(b, r, c, v) for (b, r, c), v in np.ndenumerate(self.entries) if v != 0]


@dataclass(frozen=True)
class ConstraintSystem:
    """Assembled affine system ``matrix · x = rhs`` for the free slices.

    Unknown ``j*n*n + r*n + c`` is entry ``(r, c)`` of ``Γ_{m_j}`` where
    ``n = dim m``.
    """

    matrix: MatrixQ
    rhs: tuple[Fraction, ...]
    tags: tuple[str, ...]
    conditions: frozenset[str]
    dim_m: int
    raw_row_count: int

    @property
    def unknown_count(self) -> int:
        return self.matrix.ncols

    def unknown_index(self, j: int, r: int, c: int) -> int:
        n = self.dim_m
        return (j * n + r) * n + c

    def unknown_layout(self, k: int) -> tuple[int, int, int]:
        """Flat unknown index -> ``(complement index, row, col)``."""
        n = self.dim_m
        j, rest = divmod(k, n * n)
        return (j,) + divmod(rest, n)


@dataclass(eq=False)
class ConnectionSpace:
    """Affine set of solutions ``particular + span(homogeneous_basis)``."""

    particular: GammaTensor
    homogeneous_basis: list[GammaTensor]
    conditions_used: frozenset[str]

    @property
    def dim(self) -> int:
        return len(self.homogeneous_basis)

    def sample_points(self) -> list[GammaTensor]:
        """The particular solution and particular ± each basis direction."""
        pts = [self.particular]
        for d in self.homogeneous_basis:
            pts.append(self.particular + d)
            pts.append(self.particular - d)
        return pts


def _constant_slices(ctx: OrbitContext) -> list[np.ndarray]:
    """Condition-I part of ``Γ_b`` for every Chevalley basis vector ``b``."""
    ops = ctx.centralizer_operators
    out = []
    for hc, _ in ctx.basis_decomposition:
        M = _zeros(ctx.dim_m)
        for i, c in hc.items():
            M = M + c * ops[i]
        out.append(M)
    return out


def _normalized_row(row: dict[int, Fraction], rhs: Fraction):
    """Primitive integer form with positive leading coefficient, or ``None``."""
    items = sorted((k, v) for k, v in row.items() if v)
    if not items:
        return None if rhs == 0 else ((), (1,), 1)
    vals = [v for _, v in items] + [rhs]
    den = lcm(*(v.denominator for v in vals))
    ints = [v.numerator * (den // v.denominator) for v in vals]
    g = gcd(*ints)
    if ints[0] < 0:
        g = -g
    ints = [v // g for v in ints]
    return tuple(k for k, _ in items), tuple(ints[:-1]), ints[-1]


def assemble(ctx: OrbitContext, conditions: Iterable[str]) -> ConstraintSystem:
    """Build the affine system for ``Γ`` restricted to the complement slices.

    Condition ``I`` is folded into the right-hand side.  ``ADH`` blocks are
    placed before ``IIp`` blocks; each block is one equation per matrix entry
    for a pair (operator element, Chevalley basis vector).  Exact duplicate
    and zero rows are dropped.
    """
    conditions = frozenset(conditions)
    if I not in conditions:
        raise MissingConditionI("condition I is required to fix Γ on the isotropy algebra")
    L = ctx.algebra
    n = ctx.dim_m
    const = _constant_slices(ctx)
    decomp = ctx.basis_decomposition

    blocks: list[tuple[str, LieElement, np.ndarray]] = []
    if ADH in conditions:
        blocks.append((TAG_ADH, ctx.triple.h, induced_operator(ctx, ctx.triple.h)))
    if IIP in conditions:
        for z, op in zip(ctx.centralizer_basis, ctx.centralizer_operators):
            blocks.append((TAG_IIP, z, op))

    seen: set = set()
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    tags: list[str] = []
    raw = 0
    nn = n * n
    for tag, x, A in blocks:
        a_row = [[(k, A[r, k]) for k in range(n) if A[r, k] != 0] for r in range(n)]
        a_col = [[(k, A[k, c]) for k in range(n) if A[k, c] != 0] for c in range(n)]
        xs = x.sparse()
        for b in range(ctx.dim_g):
            w = L.bracket_sparse(xs, {b: Fraction(1)})
            # Γ_w = const_w + Σ_j mw[j] U_j
            const_w = _zeros(n)
            mw: dict[int, Fraction] = {}
            for t, c in w.items():
                const_w = const_w + c * const[t]
                for j, v in decomp[t][1].items():
                    mw[j] = mw.get(j, 0) + c * v
            mb = decomp[b][1]
            K = const_w - A.dot(const[b]) + const[b].dot(A)
            for r in range(n):
                for c in range(n):
                    raw += 1
                    row: dict[int, Fraction] = {}
                    for j, v in mw.items():
                        if v:
                            key = j * nn + r * n + c
                            row[key] = row.get(key, 0) + v
                    for j, v in mb.items():
                        base = j * nn
                        for k, a in a_row[r]:
                            key = base + k * n + c
                            row[key] = row.get(key, 0) - v * a
                        for k, a in a_col[c]:
                            key = base + r * n + k
                            row[key] = row.get(key, 0) + v * a
                    norm = _normalized_row(row, -K[r, c])
                    if norm is None or norm in seen:
                        continue
                    seen.add(norm)
                    cols, vals, rv = norm
                    rows.append({k: Fraction(v) for k, v in zip(cols, vals)})
                    rhs.append(Fraction(rv))
                    tags.append(tag if cols else TAG_I)
    matrix = MatrixQ(len(rows), ctx.dim_m * nn, rows)
    log.debug("assembled %d rows (%d raw) over %d unknowns", len(rows), raw, matrix.ncols)
    return ConstraintSystem(matrix, tuple(rhs), tuple(tags), conditions, n, raw)


def _tensor_from_solution(ctx: OrbitContext, x, homogeneous: bool) -> GammaTensor:
    n = ctx.dim_m
    nn = n * n
    U = [np.array(list(x[j * nn : (j + 1) * nn]), dtype=object).reshape(n, n) for j in range(n)]
    const = _constant_slices(ctx)
    entries = np.empty((ctx.dim_g, n, n), dtype=object)
    for b, (_, mc) in enumerate(ctx.basis_decomposition):
        M = _zeros(n) if homogeneous else const[b].copy()
        for j, v in mc.items():
            M = M + v * U[j]
        entries[b] = M
    return GammaTensor(entries, ctx, homogeneous)


def solve_connection_space(sys: ConstraintSystem, ctx: OrbitContext) -> ConnectionSpace | Infeasible:
    """Solve the system; returns the connection space or the infeasibility
    certificate from the solver."""
    sol = solve_affine(sys.matrix, sys.rhs)
    if isinstance(sol, Infeasible):
        return sol
    assert isinstance(sol, AffineSolution)
    particular = _tensor_from_solution(ctx, sol.particular, homogeneous=False)
    basis = [_tensor_from_solution(ctx, v, homogeneous=True) for v in sol.nullspace_basis]
    return ConnectionSpace(particular, basis, sys.conditions)


def satisfies_condition_i(gamma: GammaTensor) -> bool:
    ctx = gamma.ctx
    for z, op in zip(ctx.centralizer_basis, ctx.centralizer_operators):
        target = _zeros(ctx.dim_m) if gamma.homogeneous else op
        if not np.all(gamma.of(z) == target):
            return False
    return True


def satisfies_iip(gamma: GammaTensor) -> bool:
    """Recheck ``Γ_[α,ξ] = [ad α, Γ_ξ]`` for centralizer ``α`` and every
    Chevalley ``ξ``, straight from the tensor.

    The equation is linear in ``Γ`` once ``ad α`` is fixed, so the same test
    applies to homogeneous directions."""
    ctx = gamma.ctx
    L = ctx.algebra
    for z, op in zip(ctx.centralizer_basis, ctx.centralizer_operators):
        for b in range(ctx.dim_g):
            lhs = gamma.of(L.bracket(z, L.basis_element(b)))
            G = gamma.slice(b)
            if not np.all(lhs == op.dot(G) - G.dot(op)):
                return False
    return True


def satisfies_adh(gamma: GammaTensor) -> bool:
    ctx = gamma.ctx
    L = ctx.algebra
    H = induced_operator(ctx, ctx.triple.h)
    for b in range(ctx.dim_g):
        lhs = gamma.of(L.bracket(ctx.triple.h, L.basis_element(b)))
        G = gamma.slice(b)
        if not np.all(lhs == H.dot(G) - G.dot(H)):
            return False
    return True


def covariant_derivative(gamma: GammaTensor, xi: LieElement, eta: LieElement) -> np.ndarray:
    """``∇_{ξ*} η*`` at the base point: ``Γ_ξ η̄ + [ξ, η]̄``."""
    ctx = gamma.ctx
    return gamma.of(xi).dot(ctx.coset(eta)) + ctx.coset(ctx.algebra.bracket(xi, eta))


def is_feasible(ctx: OrbitContext, conditions: Iterable[str]) -> bool:
    return not isinstance(solve_connection_space(assemble(ctx, conditions), ctx), Infeasible)


def average_equivalence_check(ctx: OrbitContext) -> bool:
    """Feasibility with ``{I, IIp}`` equals feasibility with ``{I, IIp, adh}``."""
    return is_feasible(ctx, {I, IIP}) == is_feasible(ctx, {I, IIP, ADH})
