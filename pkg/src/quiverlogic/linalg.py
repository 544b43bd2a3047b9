"""Exact linear algebra over the rationals.

Dense matrices with ``fractions.Fraction`` entries, subspaces stored as
canonical reduced-row-echelon bases, and the lattice operations (kernel,
image, intersection, sum, projection, preimage, quotients) that the rest
of the engine is built on.

Subspaces are canonical: two subspaces are equal iff their fields compare
equal, which makes set-level decisions (containment, equality of
interpretations) purely structural.  All values are immutable and all
functions are pure, so everything here is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


class DimensionMismatchError(ValueError):
    """Operands have incompatible shapes or ambient dimensions."""


class IndexOutOfRangeError(ValueError):
    """A coordinate index falls outside the ambient dimension."""


class NotASubspaceError(ValueError):
    """A claimed inclusion of subspaces does not hold."""


class MapDoesNotDescendError(ValueError):
    """A linear map fails to respect the given quotient presentations."""


def _rat(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Matrix:
    """Dense rational matrix, row-major, immutable."""

    rows: int
    cols: int
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows:
            raise DimensionMismatchError("row count does not match entries")
        for r in self.entries:
            if len(r) != self.cols:
                raise DimensionMismatchError("column count does not match entries")

    @staticmethod
    def from_rows(rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        data = tuple(tuple(_rat(x) for x in row) for row in rows)
        if data:
            ncols = len(data[0])
        elif cols is not None:
            ncols = cols
        else:
            ncols = 0
        return Matrix(len(data), ncols, data)

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix(n, n, tuple(
            tuple(_ONE if i == j else _ZERO for j in range(n)) for i in range(n)))

    @staticmethod
    def zeros(rows: int, cols: int) -> "Matrix":
        row = tuple(_ZERO for _ in range(cols))
        return Matrix(rows, cols, tuple(row for _ in range(rows)))

    def entry(self, i: int, j: int) -> Fraction:
        return self.entries[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.entries)

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows,
                      tuple(tuple(self.entries[i][j] for i in range(self.rows))
                            for j in range(self.cols)))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("matrix addition shape mismatch")
        return Matrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(r1, r2))
            for r1, r2 in zip(self.entries, other.entries)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols,
                      tuple(tuple(-x for x in r) for r in self.entries))

    def scale(self, c) -> "Matrix":
        c = _rat(c)
        return Matrix(self.rows, self.cols,
                      tuple(tuple(c * x for x in r) for r in self.entries))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatchError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        ot = other.transpose().entries
        return Matrix(self.rows, other.cols, tuple(
            tuple(sum((a * b for a, b in zip(r, c)), _ZERO) for c in ot)
            for r in self.entries))

    def apply(self, vec: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Multiply this matrix by a column vector."""
        if len(vec) != self.cols:
            raise DimensionMismatchError("vector length does not match columns")
        return tuple(sum((a * b for a, b in zip(r, vec)), _ZERO) for r in self.entries)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows:
            raise DimensionMismatchError("hstack row mismatch")
        return Matrix(self.rows, self.cols + other.cols, tuple(
            r1 + r2 for r1, r2 in zip(self.entries, other.entries)))

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.cols != other.cols:
            raise DimensionMismatchError("vstack column mismatch")
        return Matrix(self.rows + other.rows, self.cols, self.entries + other.entries)


def _rref_rows(rows: list[list[Fraction]], ncols: int,
               pivot_cols: int | None = None) -> tuple[list[list[Fraction]], list[int]]:
    """In-place Gauss-Jordan elimination; returns (rows, pivot columns).

    Pivots are only searched in the first ``pivot_cols`` columns (row
    operations still apply to the full width), which is what augmented
    multi-RHS solving needs.
    """
    nrows = len(rows)
    pivots: list[int] = []
    piv = 0
    for col in range(ncols if pivot_cols is None else pivot_cols):
        pr = None
        for r in range(piv, nrows):
            if rows[r][col]:
                pr = r
                break
        if pr is None:
            continue
        rows[piv], rows[pr] = rows[pr], rows[piv]
        lead = rows[piv][col]
        if lead != 1:
            rows[piv] = [x / lead for x in rows[piv]]
        prow = rows[piv]
        for r in range(nrows):
            if r != piv and rows[r][col]:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], prow)]
        pivots.append(col)
        piv += 1
        if piv == nrows:
            break
    return rows, pivots


def rref(m: Matrix) -> Matrix:
    """Unique reduced row-echelon form; same shape, zero rows at the bottom."""
    rows, _ = _rref_rows([list(r) for r in m.entries], m.cols)
    rows.sort(key=lambda r: next((i for i, x in enumerate(r) if x), m.cols))
    return Matrix(m.rows, m.cols, tuple(tuple(r) for r in rows))


def rank(m: Matrix) -> int:
    _, pivots = _rref_rows([list(r) for r in m.entries], m.cols)
    return len(pivots)


@dataclass(frozen=True)
class Subspace:
    """Subspace of Q^ambient_dim with a canonical RREF row basis (no zero rows)."""

    ambient_dim: int
    basis: Matrix

    def __post_init__(self):
        if self.basis.cols != self.ambient_dim:
            raise DimensionMismatchError("basis ambient mismatch")

    @property
    def dim(self) -> int:
        return self.basis.rows

    def basis_rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self.basis.entries

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim


def span(vectors: Iterable[Sequence], ambient_dim: int) -> Subspace:
    """Canonical subspace spanned by the given row vectors."""
    vecs = [[_rat(x) for x in v] for v in vectors]
    for v in vecs:
        if len(v) != ambient_dim:
            raise DimensionMismatchError("spanning vector has wrong length")
    rows, pivots = _rref_rows(vecs, ambient_dim)
    rows.sort(key=lambda r: next((i for i, x in enumerate(r) if x), ambient_dim))
    basis = tuple(tuple(r) for r in rows[: len(pivots)])
    return Subspace(ambient_dim, Matrix(len(basis), ambient_dim, basis))


def zero_subspace(ambient_dim: int) -> Subspace:
    return Subspace(ambient_dim, Matrix(0, ambient_dim, ()))


def full_space(ambient_dim: int) -> Subspace:
    return Subspace(ambient_dim, Matrix.identity(ambient_dim))


def kernel(m: Matrix) -> Subspace:
    """Solution space of m v = 0, canonicalized; dim = cols - rank(m)."""
    rows, pivots = _rref_rows([list(r) for r in m.entries], m.cols)
    pivot_set = set(pivots)
    free = [c for c in range(m.cols) if c not in pivot_set]
    vectors = []
    for fc in free:
        v = [_ZERO] * m.cols
        v[fc] = _ONE
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        vectors.append(v)
    return span(vectors, m.cols)


def image(m: Matrix) -> Subspace:
    """Column space of m, canonicalized; dim = rank(m)."""
    return span([m.column(j) for j in range(m.cols)], m.rows)


def contains(u: Subspace, v: Subspace) -> bool:
    """True iff v is contained in u."""
    if u.ambient_dim != v.ambient_dim:
        raise DimensionMismatchError("containment requires equal ambient dimensions")
    if v.dim > u.dim:
        return False
    if u.is_full():
        return True
    pivots = [next(i for i, x in enumerate(row) if x) for row in u.basis.entries]
    for vec in v.basis.entries:
        w = list(vec)
        for p, urow in zip(pivots, u.basis.entries):
            if w[p]:
                f = w[p]
                w = [a - f * b for a, b in zip(w, urow)]
        if any(w):
            return False
    return True


def subspace_sum(u: Subspace, v: Subspace) -> Subspace:
    if u.ambient_dim != v.ambient_dim:
        raise DimensionMismatchError("sum requires equal ambient dimensions")
    return span(u.basis.entries + v.basis.entries, u.ambient_dim)


def intersect(u: Subspace, v: Subspace) -> Subspace:
    """Canonical basis of u ∩ v."""
    if u.ambient_dim != v.ambient_dim:
        raise DimensionMismatchError("intersection requires equal ambient dimensions")
    if u.is_full():
        return v
    if v.is_full():
        return u
    if u.is_zero() or v.is_zero():
        return zero_subspace(u.ambient_dim)
    # Solve s·U = t·V; the matched point s·U spans the intersection.
    a, b = u.dim, v.dim
    stacked = u.basis.transpose().hstack((-v.basis).transpose())
    sol = kernel(stacked)
    vectors = []
    for st in sol.basis.entries:
        s = st[:a]
        vec = [_ZERO] * u.ambient_dim
        for coeff, row in zip(s, u.basis.entries):
            if coeff:
                vec = [x + coeff * y for x, y in zip(vec, row)]
        vectors.append(vec)
    return span(vectors, u.ambient_dim)


def project(s: Subspace, coords: Iterable[int]) -> Subspace:
    """Image of s under the coordinate projection onto ``coords`` (sorted)."""
    sel = sorted(set(coords))
    for c in sel:
        if c < 0 or c >= s.ambient_dim:
            raise IndexOutOfRangeError(f"coordinate {c} outside ambient {s.ambient_dim}")
    return span([[row[c] for c in sel] for row in s.basis.entries], len(sel))


def constraint_matrix(s: Subspace) -> Matrix:
    """Matrix C with s = kernel(C); rows span the annihilator of s."""
    return kernel(s.basis).basis if s.dim else Matrix.identity(s.ambient_dim)


def preimage(m: Matrix, s: Subspace) -> Subspace:
    """{x : m x ∈ s}."""
    if s.ambient_dim != m.rows:
        raise DimensionMismatchError("preimage target ambient mismatch")
    if s.is_full():
        return full_space(m.cols)
    return kernel(constraint_matrix(s) @ m)


def map_subspace(m: Matrix, s: Subspace) -> Subspace:
    """Image m(s)."""
    if s.ambient_dim != m.cols:
        raise DimensionMismatchError("map_subspace source ambient mismatch")
    mt = m.transpose()
    return span([mt.apply(row) for row in s.basis.entries], m.rows)


def solve(a: Matrix, rhs: Sequence[Sequence[Fraction]]) -> list[tuple[Fraction, ...] | None]:
    """Particular solutions of a x = b for each column vector b in rhs.

    Returns one solution per right-hand side, or None where inconsistent.
    """
    k = len(rhs)
    aug = [list(row) + [_rat(rhs[j][i]) for j in range(k)] for i, row in enumerate(a.entries)]
    rows, pivots = _rref_rows(aug, a.cols + k, pivot_cols=a.cols)
    out: list[tuple[Fraction, ...] | None] = []
    rank_a = len(pivots)
    for j in range(k):
        col = a.cols + j
        if any(rows[r][col] != 0 for r in range(rank_a, len(rows))):
            out.append(None)
            continue
        x = [_ZERO] * a.cols
        for i, p in enumerate(pivots):
            x[p] = rows[i][col]
        out.append(tuple(x))
    return out


def quotient_dim(big: Subspace, small: Subspace) -> int:
    if big.ambient_dim != small.ambient_dim:
        raise DimensionMismatchError("quotient requires equal ambient dimensions")
    if not contains(big, small):
        raise NotASubspaceError("small is not contained in big")
    return big.dim - small.dim


class QuotientSpace:
    """Quotient big/small with a deterministic completion basis.

    The completion extends small's RREF basis by the earliest rows of big's
    RREF basis that are independent of it; when big is the full space those
    rows are the standard vectors, so the completion is the lexicographically
    least choice of standard vectors independent of small.
    """

    def __init__(self, big: Subspace, small: Subspace):
        if big.ambient_dim != small.ambient_dim:
            raise DimensionMismatchError("quotient requires equal ambient dimensions")
        if not contains(big, small):
            raise NotASubspaceError("small is not contained in big")
        self.big = big
        self.small = small
        self.ambient_dim = big.ambient_dim
        completion: list[tuple[Fraction, ...]] = []
        current = small
        for row in big.basis.entries:
            if current.dim == big.dim:
                break
            cand = subspace_sum(current, span([row], big.ambient_dim))
            if cand.dim > current.dim:
                completion.append(row)
                current = cand
        self.completion = tuple(completion)
        self.qdim = big.dim - small.dim
        # Columns: small basis then completion; coordinates of v in the
        # completion part are the quotient coordinates.
        cols = list(small.basis.entries) + list(self.completion)
        self._solve_matrix = Matrix.from_rows(cols, big.ambient_dim).transpose() \
            if cols else Matrix.zeros(big.ambient_dim, 0)

    def coords(self, vector: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Quotient coordinates of a vector of big (error if outside big)."""
        if self._solve_matrix.cols == 0:
            if any(vector):
                raise NotASubspaceError("vector outside the subspace")
            return ()
        sol = solve(self._solve_matrix, [list(vector)])[0]
        if sol is None:
            raise NotASubspaceError("vector outside the subspace")
        return sol[self.small.dim:]

    def lift(self, qcoords: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Representative vector with the given quotient coordinates."""
        v = [_ZERO] * self.ambient_dim
        for c, row in zip(qcoords, self.completion):
            if c:
                v = [x + c * y for x, y in zip(v, row)]
        return tuple(v)


def induced_map(m: Matrix,
                dom: tuple[Subspace, Subspace],
                cod: tuple[Subspace, Subspace]) -> Matrix:
    """Matrix of the map big/small -> big'/small' induced by m on quotient bases.

    Raises MapDoesNotDescendError unless m maps dom.big into cod.big and
    dom.small into cod.small.
    """
    dom_q = QuotientSpace(*dom)
    cod_q = QuotientSpace(*cod)
    if m.cols != dom_q.ambient_dim or m.rows != cod_q.ambient_dim:
        raise DimensionMismatchError("map shape does not match quotient ambients")
    if not contains(cod[0], map_subspace(m, dom[0])):
        raise MapDoesNotDescendError("map does not send dom.big into cod.big")
    if not contains(cod[1], map_subspace(m, dom[1])):
        raise MapDoesNotDescendError("map does not send dom.small into cod.small")
    cols = [cod_q.coords(m.apply(c)) for c in dom_q.completion]
    return Matrix(cod_q.qdim, dom_q.qdim,
                  tuple(tuple(col[i] for col in cols) for i in range(cod_q.qdim)))
