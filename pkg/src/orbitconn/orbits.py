"""Nilpotent orbits: sl2-triples, centralizers and the coset space g/h.

For a nilpotent ``e`` the isotropy algebra is ``h = z(e)``.  An
:class:`OrbitContext` fixes a Jacobson-Morozov triple ``(f, h, e)``, a basis of
``z(e)`` and a complement ``m`` both made of exact ``ad h`` eigenvectors;
``m`` gives coordinates on ``g/h``.

Orbit file format (one record per non-blank line, ``#`` starts a comment)::

    <label> = <term> [+|- <term> ...]
    <term>  = [<coeff>*][<c1>,<c2>,...]

``[c1,...]`` is a root in simple-root coordinates (negative entries allowed,
giving ``f`` vectors) and ``<coeff>`` is an integer or ``p/q`` rational,
default 1.  Example::

    # C2 subregular
    sub = [1,0] + [0,1]
    odd = 1/2*[1,1] - [0,1]
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from .exact_linalg import MatrixQ, inverse, nullspace, solve_affine
from .lie_core import LieAlgebra, LieElement, ad_matrix

__all__ = [
    "NoTriple",
    "NotHStable",
    "NotNilpotent",
    "OrbitContext",
    "OrbitFileError",
    "Sl2Triple",
    "build_context",
    "centralizer",
    "coset_project",
    "graded_complement",
    "induced_operator",
    "jacobson_morozov",
    "load_orbit_file",
    "orbit_catalog",
    "parse_orbit_text",
    "weighted_dynkin",
]


class NotNilpotent(ValueError):
    pass


class NoTriple(RuntimeError):
    """No sl2-triple through a nilpotent element; indicates a bug."""


class NotHStable(ValueError):
    """The element does not normalize ``h``; the induced operator is undefined."""


class OrbitFileError(ValueError):
    pass


def _dense(M: MatrixQ) -> np.ndarray:
    out = np.full(M.shape, Fraction(0), dtype=object)
    for (i, j), v in M.entries.items():
        out[i, j] = v
    return out


def _is_zero(a: np.ndarray) -> bool:
    return not any(x != 0 for x in a.flat)


@dataclass(frozen=True)
class Sl2Triple:
    f: LieElement
    h: LieElement
    e: LieElement

    def holds(self, L: LieAlgebra) -> bool:
        return (
            L.bracket(self.h, self.e) == 2 * self.e
            and L.bracket(self.h, self.f) == -2 * self.f
            and L.bracket(self.e, self.f) == self.h
        )


def is_nilpotent(L: LieAlgebra, e: LieElement) -> bool:
    M = _dense(ad_matrix(L, e))
    P = M
    # ad e is nilpotent iff (ad e)^dim = 0
    k = 1
    while k < L.dim:
        P = P.dot(P)
        k *= 2
        if _is_zero(P):
            return True
    return _is_zero(P)


def centralizer(L: LieAlgebra, e: LieElement) -> list[LieElement]:
    """Basis of ``z(e) = ker ad e``."""
    return [LieElement(v) for v in nullspace(ad_matrix(L, e))]


def jacobson_morozov(L: LieAlgebra, e: LieElement) -> Sl2Triple:
    """Complete a nilpotent ``e`` to an sl2-triple ``(f, h, e)``.

    ``h`` is taken in ``im(ad e)`` with ``[h, e] = 2e``, preferring an ``h``
    inside the Cartan subalgebra when one exists; then ``f`` solves
    ``[e, f] = h``, ``[h, f] = -2f``.
    """
    if e.is_zero() or not is_nilpotent(L, e):
        raise NotNilpotent("element is not a nonzero nilpotent")
    n, l = L.dim, L.rank
    ade = ad_matrix(L, e)
    ade2 = ade @ ade
    # h = [e, z]; [h, e] = -ad_e^2 z = 2e
    rhs = [-2 * c for c in e.coords]
    cartan_rows = [dict(ade.rows[k]) for k in range(l, n)]
    sol = solve_affine(MatrixQ(2 * n - l, n, list(ade2.rows) + cartan_rows), rhs + [0] * (n - l))
    if not sol.feasible:
        sol = solve_affine(ade2, rhs)
        if not sol.feasible:
            raise NoTriple("no h in im(ad e) with [h, e] = 2e")
    h = LieElement(tuple(ade.matvec(sol.particular)))
    adh = ad_matrix(L, h)
    shifted = MatrixQ(n, n, [{**r, i: r.get(i, 0) + 2} for i, r in enumerate(adh.rows)])
    system = MatrixQ(2 * n, n, list(ade.rows) + list(shifted.rows))
    fsol = solve_affine(system, list(h.coords) + [0] * n)
    if not fsol.feasible:
        raise NoTriple("no f completing the triple")
    triple = Sl2Triple(LieElement(fsol.particular), h, e)
    if not triple.holds(L):
        raise NoTriple("triple relations failed")
    return triple


def _eigenspaces(L: LieAlgebra, h: LieElement) -> list[tuple[int, list[LieElement]]]:
    """Integer eigenspaces of ``ad h``, ascending by eigenvalue."""
    adh = ad_matrix(L, h)
    rows = adh.rows
    if all(set(r) <= {i} for i, r in enumerate(rows)):
        spaces: dict[int, list[LieElement]] = {}
        for i, r in enumerate(rows):
            w = r.get(i, Fraction(0))
            if w.denominator != 1:
                raise ArithmeticError("non-integral ad h eigenvalue")
            spaces.setdefault(int(w), []).append(L.basis_element(i))
        return sorted(spaces.items())
    bound = int(max(sum(abs(v) for v in r.values()) for r in rows))
    out = []
    total = 0
    for k in range(-bound, bound + 1):
        shifted = MatrixQ(L.dim, L.dim, [{**r, i: r.get(i, 0) - k} for i, r in enumerate(rows)])
        vecs = nullspace(shifted)
        if vecs:
            out.append((k, [LieElement(v) for v in vecs]))
            total += len(vecs)
    if total != L.dim:
        raise ArithmeticError("ad h is not diagonalizable with integer eigenvalues")
    return out


def _graded_split(L: LieAlgebra, triple: Sl2Triple):
    """Graded bases of ``z(e)`` and of a complement ``m``."""
    zb, zw, mb, mw = [], [], [], []
    for k, U in _eigenspaces(L, triple.h):
        images = [L.bracket(triple.e, u) for u in U]
        A = MatrixQ(L.dim, len(U), [{j: im[i] for j, im in enumerate(images) if im[i]} for i in range(L.dim)])
        sol = solve_affine(A, [0] * L.dim)
        # kernel vectors are unit on the non-pivot columns; the pivot columns
        # pick eigenvectors completing the kernel to the whole eigenspace
        for y in sol.nullspace_basis:
            v = LieElement.zero(L.dim)
            for j, c in enumerate(y):
                if c:
                    v = v + c * U[j]
            zb.append(v)
            zw.append(k)
        for j in sol.pivot_columns:
            mb.append(U[j])
            mw.append(k)
    return zb, zw, mb, mw


def graded_complement(L: LieAlgebra, triple: Sl2Triple, centralizer_basis: Sequence[LieElement]):
    """Complement ``m`` to ``z(e)`` spanned by ``ad h`` eigenvectors.

    Returns ``(complement_basis, weights)``.
    """
    zb, _, mb, mw = _graded_split(L, triple)
    if len(zb) != len(centralizer_basis):
        raise ValueError("centralizer basis does not span z(e)")
    return mb, mw


def weighted_dynkin(L: LieAlgebra, h: LieElement) -> tuple[int, ...] | None:
    """Weighted Dynkin labels of ``h`` after moving it to the dominant chamber.

    Only defined when ``h`` lies in the Cartan subalgebra; otherwise ``None``.
    """
    l = L.rank
    if any(h.coords[l:]):
        return None
    rs = L.root_system
    hv = list(h.coords[:l])

    def labels(v):
        return [sum(v[k] * rs.cartan_matrix[k][j] for k in range(l)) for j in range(l)]

    lab = labels(hv)
    while any(x < 0 for x in lab):
        i = next(j for j, x in enumerate(lab) if x < 0)
        hv = rs.weyl_reflect_coweight(hv, i)
        lab = labels(hv)
    if any(Fraction(x).denominator != 1 for x in lab):
        raise ArithmeticError("non-integral weighted Dynkin label")
    return tuple(int(x) for x in lab)


@dataclass(frozen=True, eq=False)
class OrbitContext:
    """Orbit point ``e`` with its triple and the splitting ``g = h ⊕ m``."""

    algebra: LieAlgebra
    triple: Sl2Triple
    centralizer_basis: tuple[LieElement, ...]
    centralizer_weights: tuple[int, ...]
    complement_basis: tuple[LieElement, ...]
    weights: tuple[int, ...]
    label: str
    dynkin: tuple[int, ...] | None = None
    _inv: MatrixQ = field(default=None, repr=False)

    @property
    def dim_g(self) -> int:
        return self.algebra.dim

    @property
    def dim_h(self) -> int:
        return len(self.centralizer_basis)

    @property
    def dim_m(self) -> int:
        return len(self.complement_basis)

    @property
    def e(self) -> LieElement:
        return self.triple.e

    def decompose(self, x: LieElement | Sequence) -> tuple[list[Fraction], list[Fraction]]:
        """Coordinates of ``x`` over the centralizer and complement bases."""
        c = self._inv.matvec(list(x))
        return c[: self.dim_h], c[self.dim_h :]

    @cached_property
    def basis_decomposition(self) -> tuple[tuple[dict[int, Fraction], dict[int, Fraction]], ...]:
        """Sparse (h-part, m-part) coordinates of every Chevalley basis vector."""
        out = []
        inv_cols = self._inv.transpose().rows
        for b in range(self.dim_g):
            col = inv_cols[b]
            out.append(
                (
                    {i: v for i, v in col.items() if i < self.dim_h},
                    {i - self.dim_h: v for i, v in col.items() if i >= self.dim_h},
                )
            )
        return tuple(out)

    def coset(self, x: LieElement | Sequence) -> np.ndarray:
        return np.array(self.decompose(x)[1], dtype=object)

    @cached_property
    def centralizer_operators(self) -> tuple[np.ndarray, ...]:
        return tuple(induced_operator(self, z) for z in self.centralizer_basis)


def build_context(L: LieAlgebra, e: LieElement, label: str) -> OrbitContext:
    triple = jacobson_morozov(L, e)
    zb, zw, mb, mw = _graded_split(L, triple)
    if len(mb) % 2:
        raise ArithmeticError("odd-dimensional orbit; the element cannot be nilpotent")
    cols = list(zb) + list(mb)
    B = MatrixQ(L.dim, L.dim, [{j: c[i] for j, c in enumerate(cols) if c[i]} for i in range(L.dim)])
    return OrbitContext(
        algebra=L,
        triple=triple,
        centralizer_basis=tuple(zb),
        centralizer_weights=tuple(zw),
        complement_basis=tuple(mb),
        weights=tuple(mw),
        label=label,
        dynkin=weighted_dynkin(L, triple.h),
        _inv=inverse(B),
    )


def coset_project(ctx: OrbitContext, x: LieElement) -> np.ndarray:
    """The ``m``-component of ``x``: coordinates of ``x + h`` in ``g/h``."""
    return ctx.coset(x)


def induced_operator(ctx: OrbitContext, x: LieElement) -> np.ndarray:
    """Matrix of the operator induced by ``ad x`` on ``g/h``.

    Raises :class:`NotHStable` unless ``[x, h] ⊆ h``.
    """
    L = ctx.algebra
    for z in ctx.centralizer_basis:
        if any(ctx.coset(L.bracket(x, z))):
            raise NotHStable("ad x does not preserve the isotropy algebra")
    n = ctx.dim_m
    M = np.full((n, n), Fraction(0), dtype=object)
    for j, m in enumerate(ctx.complement_basis):
        M[:, j] = ctx.coset(L.bracket(x, m))
    return M


def _minimal_element(L: LieAlgebra) -> LieElement:
    return L.e(L.root_system.highest_root)


def _regular_element(L: LieAlgebra) -> LieElement:
    out = LieElement.zero(L.dim)
    for r in L.root_system.simple_roots:
        out = out + L.e(r)
    return out


_TERM = re.compile(r"^\s*(?:([+-]?\s*\d+(?:/\d+)?)\s*\*\s*)?\[([^\]]*)\]\s*$")


def parse_orbit_text(text: str) -> list[tuple[str, list[tuple[tuple[int, ...], Fraction]]]]:
    """Parse orbit records; returns ``[(label, [(root, coeff), ...]), ...]``."""
    records = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise OrbitFileError(f"line {lineno}: expected '<label> = <terms>'")
        label, body = (s.strip() for s in line.split("=", 1))
        if not label or not re.fullmatch(r"[\w.-]+", label):
            raise OrbitFileError(f"line {lineno}: bad label {label!r}")
        # split on +/- that are not inside brackets and not part of a coefficient sign
        pieces = re.split(r"(?<=\])\s*(?=[+-])", body)
        terms = []
        for piece in pieces:
            piece = piece.strip()
            sign = 1
            if piece.startswith(("+", "-")) and "[" in piece and not re.match(r"^[+-]\s*\d", piece):
                sign = -1 if piece[0] == "-" else 1
                piece = piece[1:].strip()
            m = _TERM.match(piece)
            if not m:
                raise OrbitFileError(f"line {lineno}: cannot parse term {piece!r}")
            coeff = Fraction(m.group(1).replace(" ", "")) if m.group(1) else Fraction(1)
            try:
                root = tuple(int(t) for t in m.group(2).split(","))
            except ValueError:
                raise OrbitFileError(f"line {lineno}: bad root {m.group(2)!r}") from None
            terms.append((root, sign * coeff))
        if not terms:
            raise OrbitFileError(f"line {lineno}: empty element")
        records.append((label, terms))
    return records


def load_orbit_file(path: str | Path):
    return parse_orbit_text(Path(path).read_text())


def element_from_terms(L: LieAlgebra, terms) -> LieElement:
    out = LieElement.zero(L.dim)
    for root, coeff in terms:
        if len(root) != L.rank:
            raise OrbitFileError(f"root {root} has wrong length for {L.name}")
        out = out + L.e(root, coeff)
    return out


def orbit_catalog(L: LieAlgebra, orbit_records=()) -> list[OrbitContext]:
    """Minimal and regular orbits (deduplicated), then any user records."""
    out: list[OrbitContext] = []
    seen = set()
    for label, e in (("minimal", _minimal_element(L)), ("regular", _regular_element(L))):
        ctx = build_context(L, e, label)
        key = (ctx.dim_h, ctx.dynkin)
        if key in seen:
            continue
        seen.add(key)
        out.append(ctx)
    for label, terms in orbit_records:
        out.append(build_context(L, element_from_terms(L, terms), label))
    return out
