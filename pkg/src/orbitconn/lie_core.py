"""Simple Lie algebras in a Chevalley basis with integer structure constants.

Supported types: A1..A4, B2..B4, C2..C4, D4 and G2.

Root realizations (Bourbaki numbering, standard ε-coordinates)::

    A_n  α_i = ε_i - ε_{i+1}                      in Z^{n+1}
    B_n  α_i = ε_i - ε_{i+1} (i < n),  α_n = ε_n
    C_n  α_i = ε_i - ε_{i+1} (i < n),  α_n = 2ε_n
    D_n  α_i = ε_i - ε_{i+1} (i < n),  α_n = ε_{n-1} + ε_n
    G_2  α_1 = ε_1 - ε_2,  α_2 = -2ε_1 + ε_2 + ε_3   in Z^3

Basis order: ``h_1..h_l`` (simple coroots), then ``e_α`` for every positive
root, then ``f_α = e_{-α}`` for every positive root.  Positive roots are
listed by height, ties broken by simple-root coordinates.

Sign convention: ``[e_α, e_β] = N_{α,β} e_{α+β}`` with ``N_{α,β} = ±(p+1)``
where ``p`` is the largest integer such that ``β - pα`` is a root.  Positive
roots are totally ordered lexicographically on simple-root coordinates.  For
each non-simple positive root ξ its extraspecial pair ``(α, ξ-α)`` uses the
smallest α in that order with ξ-α a root, and ``N`` on extraspecial pairs is
taken positive.  All other signs follow from the standard identities
(antisymmetry, ``N_{-α,-β} = -N_{α,β}``, the three-root cyclic relation and
the four-root relation).  ``verify_jacobi`` guards the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, Sequence

from .exact_linalg import MatrixQ

__all__ = [
    "LieAlgebra",
    "LieElement",
    "RootSystem",
    "SUPPORTED",
    "UnsupportedType",
    "ad_matrix",
    "bracket",
    "build_algebra",
    "parse_algebra_name",
    "verify_jacobi",
]

SUPPORTED: dict[str, tuple[int, ...]] = {
    "A": (1, 2, 3, 4),
    "B": (2, 3, 4),
    "C": (2, 3, 4),
    "D": (4,),
    "G": (2,),
}

Root = tuple[int, ...]


class UnsupportedType(ValueError):
    pass


def parse_algebra_name(name: str) -> tuple[str, int]:
    """``"C3"`` -> ``("C", 3)``; raises :class:`UnsupportedType`."""
    name = name.strip()
    if len(name) < 2 or not name[1:].isdigit():
        raise UnsupportedType(f"cannot parse algebra name {name!r}")
    letter, rank = name[0].upper(), int(name[1:])
    if rank not in SUPPORTED.get(letter, ()):
        raise UnsupportedType(f"unsupported algebra {name!r}")
    return letter, rank


def _unit(n: int, i: int, scale: int = 1) -> list[int]:
    v = [0] * n
    v[i] = scale
    return v


def _simple_roots_eps(letter: str, rank: int) -> list[Root]:
    if letter == "G":
        return [(1, -1, 0), (-2, 1, 1)]
    dim = rank + 1 if letter == "A" else rank
    out = []
    for i in range(rank - 1):
        v = [0] * dim
        v[i], v[i + 1] = 1, -1
        out.append(tuple(v))
    last = [0] * dim
    if letter == "A":
        last[rank - 1], last[rank] = 1, -1
    elif letter == "B":
        last[rank - 1] = 1
    elif letter == "C":
        last[rank - 1] = 2
    elif letter == "D":
        last[rank - 2], last[rank - 1] = 1, 1
    out.append(tuple(last))
    return out


def _dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def _add(u: Root, v: Root) -> Root:
    return tuple(a + b for a, b in zip(u, v))


def _neg(u: Root) -> Root:
    return tuple(-a for a in u)


def _is_positive(u: Root) -> bool:
    return all(a >= 0 for a in u) and any(u)


@dataclass(frozen=True)
class RootSystem:
    """Root system of a simple Lie algebra.

    Roots are integer vectors in simple-root coordinates; ``eps`` maps each
    root to its ε-coordinates.
    """

    type_letter: str
    rank: int
    simple_roots_eps: tuple[Root, ...]
    positive_roots: tuple[Root, ...]
    cartan_matrix: tuple[tuple[int, ...], ...]

    @classmethod
    def build(cls, letter: str, rank: int) -> RootSystem:
        simple = _simple_roots_eps(letter, rank)
        gram = [[_dot(a, b) for b in simple] for a in simple]
        # cartan[i][j] = <α_j, α_i^∨> = 2(α_i, α_j)/(α_i, α_i)
        cartan = tuple(tuple(2 * gram[i][j] // gram[i][i] for j in range(rank)) for i in range(rank))
        units = [tuple(_unit(rank, i)) for i in range(rank)]
        known = set(units)
        layer = list(units)
        while layer:
            nxt = []
            for beta in layer:
                for i in range(rank):
                    p = 0
                    while tuple(b - (p + 1) * (j == i) for j, b in enumerate(beta)) in known:
                        p += 1
                    pairing = sum(beta[j] * cartan[i][j] for j in range(rank))
                    if p - pairing > 0:
                        cand = tuple(b + (j == i) for j, b in enumerate(beta))
                        if cand not in known:
                            known.add(cand)
                            nxt.append(cand)
            layer = nxt
        positive = tuple(sorted(known, key=lambda r: (sum(r), r)))
        return cls(letter, rank, tuple(simple), positive, cartan)

    @cached_property
    def simple_roots(self) -> tuple[Root, ...]:
        return tuple(tuple(_unit(self.rank, i)) for i in range(self.rank))

    @cached_property
    def roots(self) -> tuple[Root, ...]:
        return self.positive_roots + tuple(_neg(r) for r in self.positive_roots)

    @cached_property
    def root_set(self) -> frozenset[Root]:
        return frozenset(self.roots)

    @cached_property
    def highest_root(self) -> Root:
        return max(self.positive_roots, key=sum)

    @cached_property
    def gram(self) -> tuple[tuple[int, ...], ...]:
        s = self.simple_roots_eps
        return tuple(tuple(_dot(a, b) for b in s) for a in s)

    def eps(self, root: Sequence) -> tuple:
        """ε-coordinates of a vector given in simple-root coordinates."""
        dim = len(self.simple_roots_eps[0])
        return tuple(sum(root[i] * self.simple_roots_eps[i][k] for i in range(self.rank)) for k in range(dim))

    def inner(self, u: Sequence, v: Sequence) -> int:
        g = self.gram
        return sum(u[i] * g[i][j] * v[j] for i in range(self.rank) for j in range(self.rank) if u[i] and v[j])

    def pairing(self, root: Sequence, i: int) -> int:
        """``<root, α_i^∨>``."""
        return sum(root[j] * self.cartan_matrix[i][j] for j in range(self.rank))

    def coroot_coords(self, root: Root) -> tuple[int, ...]:
        """``root^∨`` in the basis of simple coroots."""
        rr = self.inner(root, root)
        out = []
        for i in range(self.rank):
            c = Fraction(root[i] * self.gram[i][i], rr)
            if c.denominator != 1:
                raise ArithmeticError("non-integral coroot coordinates")
            out.append(int(c))
        return tuple(out)

    def weyl_reflect_coweight(self, h: Sequence, i: int) -> list:
        """Apply the simple reflection ``s_i`` to a Cartan element given in
        simple-coroot coordinates."""
        val = sum(h[k] * self.cartan_matrix[k][i] for k in range(self.rank))
        out = list(h)
        out[i] -= val
        return out

    def expected_root_count(self) -> int:
        l = self.rank
        return {"A": l * (l + 1), "B": 2 * l * l, "C": 2 * l * l, "D": 2 * l * (l - 1), "G": 12}[self.type_letter]


class _StructureConstants:
    """Compute ``N_{α,β}`` by the extraspecial-pair recursion."""

    def __init__(self, rs: RootSystem):
        self.rs = rs
        self.roots = rs.root_set
        self.memo: dict[tuple[Root, Root], int] = {}
        self.extraspecial: dict[Root, tuple[Root, Root]] = {}
        lex = sorted(rs.positive_roots)
        for xi in rs.positive_roots:
            if sum(xi) == 1:
                continue
            for a in lex:
                b = tuple(x - y for x, y in zip(xi, a))
                if b in self.roots and _is_positive(b):
                    self.extraspecial[xi] = (a, b)
                    break

    def _p(self, a: Root, b: Root) -> int:
        p = 0
        cur = b
        while True:
            cur = tuple(x - y for x, y in zip(cur, a))
            if cur not in self.roots:
                return p
            p += 1

    def norm(self, r: Root) -> int:
        return self.rs.inner(r, r)

    def __call__(self, a: Root, b: Root) -> int:
        s = _add(a, b)
        if s not in self.roots:
            return 0
        key = (a, b)
        if key not in self.memo:
            self.memo[key] = self._compute(a, b, s)
        return self.memo[key]

    def _compute(self, a: Root, b: Root, s: Root) -> int:
        pa, pb = _is_positive(a), _is_positive(b)
        if pa and pb:
            if a > b:
                return -self(b, a)
            a1, b1 = self.extraspecial[s]
            if (a, b) == (a1, b1):
                return self._p(a, b) + 1
            t = Fraction(0)
            d1 = tuple(x - y for x, y in zip(b, a1))
            if d1 in self.roots:
                t += Fraction(self(b, _neg(a1)) * self(a, _neg(b1)), self.norm(d1))
            d2 = tuple(x - y for x, y in zip(a, a1))
            if d2 in self.roots:
                t += Fraction(self(_neg(a1), a) * self(b, _neg(b1)), self.norm(d2))
            val = self.norm(s) * t / self(a1, b1)
            if val.denominator != 1:
                raise ArithmeticError(f"non-integral structure constant for {a}, {b}")
            return int(val)
        if not pa and not pb:
            return -self(_neg(a), _neg(b))
        # mixed signs: rotate a + b + c = 0 to a same-sign pair
        c = _neg(s)
        pc = _is_positive(c)
        if pb == pc:
            # N_{a,b}/(c,c) = N_{b,c}/(a,a)
            val = Fraction(self.norm(c) * self(b, c), self.norm(a))
        else:
            # N_{a,b}/(c,c) = N_{c,a}/(b,b)
            val = Fraction(self.norm(c) * self(c, a), self.norm(b))
        if val.denominator != 1:
            raise ArithmeticError(f"non-integral structure constant for {a}, {b}")
        return int(val)


@dataclass(frozen=True, eq=False)
class LieElement:
    """Element of a Lie algebra as exact coordinates over the basis."""

    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))

    @classmethod
    def zero(cls, dim: int) -> LieElement:
        return cls((Fraction(0),) * dim)

    @classmethod
    def basis(cls, dim: int, i: int, coeff=1) -> LieElement:
        c = [Fraction(0)] * dim
        c[i] = Fraction(coeff)
        return cls(tuple(c))

    @classmethod
    def from_sparse(cls, dim: int, items: Mapping[int, Fraction]) -> LieElement:
        c = [Fraction(0)] * dim
        for i, v in items.items():
            c[i] += v
        return cls(tuple(c))

    def sparse(self) -> dict[int, Fraction]:
        return {i: v for i, v in enumerate(self.coords) if v}

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __add__(self, other: LieElement) -> LieElement:
        return LieElement(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: LieElement) -> LieElement:
        return LieElement(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> LieElement:
        return LieElement(tuple(-a for a in self.coords))

    def __mul__(self, k) -> LieElement:
        k = Fraction(k)
        return LieElement(tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LieElement):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __repr__(self) -> str:
        return f"LieElement({self.sparse()})"


@dataclass(frozen=True)
class LieAlgebra:
    """A Lie algebra given by sparse integer structure constants.

    ``structure[(i, j)]`` maps basis index ``k`` to the coefficient of
    ``b_k`` in ``[b_i, b_j]``; absent pairs bracket to zero.
    """

    root_system: RootSystem
    basis_labels: tuple[str, ...]
    structure: Mapping[tuple[int, int], Mapping[int, int]] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    @property
    def rank(self) -> int:
        return self.root_system.rank

    @property
    def name(self) -> str:
        return f"{self.root_system.type_letter}{self.root_system.rank}"

    @cached_property
    def _root_index(self) -> dict[Root, int]:
        rs = self.root_system
        P = len(rs.positive_roots)
        idx = {}
        for k, r in enumerate(rs.positive_roots):
            idx[r] = rs.rank + k
            idx[_neg(r)] = rs.rank + P + k
        return idx

    def root_index(self, root: Sequence[int]) -> int:
        """Basis index of the root vector ``e_root`` (negative roots give ``f``)."""
        try:
            return self._root_index[tuple(root)]
        except KeyError:
            raise ValueError(f"{tuple(root)} is not a root of {self.name}") from None

    @cached_property
    def basis_roots(self) -> tuple[Root | None, ...]:
        """Root of each basis vector; ``None`` for Cartan elements."""
        out: list[Root | None] = [None] * self.dim
        for r, i in self._root_index.items():
            out[i] = r
        return tuple(out)

    def h(self, i: int) -> LieElement:
        return LieElement.basis(self.dim, i)

    def e(self, root: Sequence[int], coeff=1) -> LieElement:
        return LieElement.basis(self.dim, self.root_index(root), coeff)

    def f(self, root: Sequence[int], coeff=1) -> LieElement:
        return LieElement.basis(self.dim, self.root_index(_neg(tuple(root))), coeff)

    def basis_element(self, i: int) -> LieElement:
        return LieElement.basis(self.dim, i)

    def bracket_sparse(self, x: Mapping[int, Fraction], y: Mapping[int, Fraction]) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        st = self.structure
        for i, a in x.items():
            for j, b in y.items():
                sc = st.get((i, j))
                if sc:
                    ab = a * b
                    for k, c in sc.items():
                        out[k] = out.get(k, 0) + ab * c
        return {k: v for k, v in out.items() if v}

    def bracket(self, x: LieElement, y: LieElement) -> LieElement:
        return LieElement.from_sparse(self.dim, self.bracket_sparse(x.sparse(), y.sparse()))


def build_algebra(type_letter: str, rank: int) -> LieAlgebra:
    """Chevalley-basis Lie algebra of the given type and rank."""
    letter = type_letter.upper()
    if rank not in SUPPORTED.get(letter, ()):
        raise UnsupportedType(f"unsupported algebra {type_letter}{rank}")
    rs = RootSystem.build(letter, rank)
    if len(rs.roots) != rs.expected_root_count():
        raise ArithmeticError(f"root generation produced {len(rs.roots)} roots")
    N = _StructureConstants(rs)
    l = rs.rank
    P = len(rs.positive_roots)
    labels = [f"h{i + 1}" for i in range(l)]
    labels += ["e" + "".join(map(str, r)) for r in rs.positive_roots]
    labels += ["f" + "".join(map(str, r)) for r in rs.positive_roots]
    index: dict[Root, int] = {}
    for k, r in enumerate(rs.positive_roots):
        index[r] = l + k
        index[_neg(r)] = l + P + k
    structure: dict[tuple[int, int], dict[int, int]] = {}

    def put(i: int, j: int, vec: dict[int, int]):
        vec = {k: v for k, v in vec.items() if v}
        if vec:
            structure[(i, j)] = vec
            structure[(j, i)] = {k: -v for k, v in vec.items()}

    for r, ir in index.items():
        for i in range(l):
            put(i, ir, {ir: rs.pairing(r, i)})
    for r, ir in index.items():
        for s, js in index.items():
            if ir >= js:
                continue
            tot = _add(r, s)
            if not any(tot):
                # [e_r, e_{-r}] = h_r
                put(ir, js, dict(enumerate(rs.coroot_coords(r))))
            elif tot in rs.root_set:
                put(ir, js, {index[tot]: N(r, s)})
    return LieAlgebra(rs, tuple(labels), structure)


def bracket(L: LieAlgebra, x: LieElement, y: LieElement) -> LieElement:
    return L.bracket(x, y)


def ad_matrix(L: LieAlgebra, x: LieElement) -> MatrixQ:
    """Matrix of ``y -> [x, y]`` (column ``j`` is ``[x, b_j]``)."""
    xs = x.sparse()
    rows: list[dict[int, Fraction]] = [{} for _ in range(L.dim)]
    for j in range(L.dim):
        for k, v in L.bracket_sparse(xs, {j: Fraction(1)}).items():
            rows[k][j] = v
    return MatrixQ(L.dim, L.dim, rows)


def verify_jacobi(L: LieAlgebra) -> bool:
    """True iff ``[x,[y,z]] + [y,[z,x]] + [z,[x,y]] = 0`` on all basis triples."""
    one = Fraction(1)
    n = L.dim
    unit = [{i: one} for i in range(n)]
    br = {}
    for i, j in product(range(n), repeat=2):
        v = L.structure.get((i, j))
        br[i, j] = {k: Fraction(c) for k, c in v.items()} if v else {}
    for i, j, k in product(range(n), repeat=3):
        acc: dict[int, Fraction] = {}
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            for t, v in L.bracket_sparse(unit[a], br[b, c]).items():
                acc[t] = acc.get(t, 0) + v
        if any(acc.values()):
            return False
    return True


def iter_basis(L: LieAlgebra) -> Iterable[LieElement]:
    return (L.basis_element(i) for i in range(L.dim))
