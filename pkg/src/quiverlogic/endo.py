"""Endomorphism algebras of restricted representations.

An endomorphism of T restricted to a finite full subdiagram F assigns a
square matrix to every vertex of F so that every edge map of F commutes
with the assignment.  The whole algebra is computed as the kernel of one
stacked linear system over the flattened per-vertex matrix entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import (DimensionMismatchError, Matrix, Subspace, contains,
                     full_space, induced_map, kernel, map_subspace)
from .quiver import Representation, Subdiagram
from .category import DefinableObject


class DoesNotPreserveError(RuntimeError):
    """Raised when an endomorphism fails to preserve a definable subspace.

    Naturality guarantees preservation, so this surfacing is a test hook
    for internal consistency rather than an expected user-facing error.
    """


@dataclass(frozen=True)
class EndAlgebra:
    """Basis of the commutant algebra over a finite full subdiagram.

    The ambient space is the product of the per-vertex matrix spaces,
    flattened row-major vertex by vertex in subdiagram order.
    """

    subdiagram: Subdiagram
    dims: tuple[int, ...]
    basis: Subspace

    @property
    def dim(self) -> int:
        return self.basis.dim

    def block_offsets(self) -> list[int]:
        offsets = []
        off = 0
        for n in self.dims:
            offsets.append(off)
            off += n * n
        return offsets

    def element(self, vector) -> "EndElement":
        offsets = self.block_offsets()
        blocks = []
        for (n, off) in zip(self.dims, offsets):
            blocks.append(Matrix(n, n, tuple(
                tuple(Fraction(vector[off + i * n + j]) for j in range(n))
                for i in range(n))))
        return EndElement(self.subdiagram, self.dims, tuple(blocks))

    def elements(self) -> list["EndElement"]:
        return [self.element(row) for row in self.basis.basis_rows()]


@dataclass(frozen=True)
class EndElement:
    subdiagram: Subdiagram
    dims: tuple[int, ...]
    blocks: tuple[Matrix, ...]

    def block_of(self, vertex: str) -> Matrix:
        return self.blocks[self.subdiagram.vertices.index(vertex)]

    def flatten(self) -> tuple[Fraction, ...]:
        return tuple(x for b in self.blocks for row in b.entries for x in row)


def compute_end(rep: Representation, sub: Subdiagram | None = None) -> EndAlgebra:
    """Solve all edge-commutation constraints as one stacked kernel.

    The unknowns are the entries of one square matrix per subdiagram vertex;
    each edge c -> d contributes the equations of T(f)·a(c) = a(d)·T(f).
    """
    if sub is None:
        sub = Subdiagram.of(rep.quiver)
    verts = sub.vertices
    dims = tuple(rep.dim_of(v) for v in verts)
    offsets = []
    off = 0
    for n in dims:
        offsets.append(off)
        off += n * n
    n_unknowns = off
    v_index = {v: i for i, v in enumerate(verts)}

    def unknown(v: str, i: int, j: int) -> int:
        k = v_index[v]
        return offsets[k] + i * dims[k] + j

    rows = []
    for e in sub.edges():
        t_mat = rep.mat_of(e.name)
        ns = rep.dim_of(e.source)
        nt = rep.dim_of(e.target)
        # (T(f)·a(c))_ij - (a(d)·T(f))_ij = 0 for all i < nt, j < ns
        for i in range(nt):
            for j in range(ns):
                row = [Fraction(0)] * n_unknowns
                for k in range(ns):
                    if t_mat.entries[i][k]:
                        row[unknown(e.source, k, j)] += t_mat.entries[i][k]
                for k in range(nt):
                    if t_mat.entries[k][j]:
                        row[unknown(e.target, i, k)] -= t_mat.entries[k][j]
                if any(row):
                    rows.append(tuple(row))
    space = kernel(Matrix(len(rows), n_unknowns, tuple(rows))) if rows \
        else full_space(n_unknowns)
    return EndAlgebra(sub, dims, space)


def end_identity(alg: EndAlgebra) -> EndElement:
    return EndElement(alg.subdiagram, alg.dims,
                      tuple(Matrix.identity(n) for n in alg.dims))


def end_multiply(a: EndElement, b: EndElement) -> EndElement:
    """Vertex-wise composition a∘b."""
    if a.subdiagram != b.subdiagram or a.dims != b.dims:
        raise DimensionMismatchError("elements live over different subdiagrams")
    return EndElement(a.subdiagram, a.dims,
                      tuple(x @ y for x, y in zip(a.blocks, b.blocks)))


def end_add(a: EndElement, b: EndElement) -> EndElement:
    if a.subdiagram != b.subdiagram or a.dims != b.dims:
        raise DimensionMismatchError("elements live over different subdiagrams")
    return EndElement(a.subdiagram, a.dims,
                      tuple(x + y for x, y in zip(a.blocks, b.blocks)))


def end_scale(a: EndElement, c) -> EndElement:
    return EndElement(a.subdiagram, a.dims,
                      tuple(x.scale(c) for x in a.blocks))


def contains_element(alg: EndAlgebra, e: EndElement) -> bool:
    """Whether the element lies in the span of the algebra basis."""
    from .linalg import span, subspace_sum
    vec = e.flatten()
    cand = span([vec], alg.basis.ambient_dim)
    return subspace_sum(alg.basis, cand).dim == alg.basis.dim


def block_action_matrix(e: EndElement, context: tuple[str, ...],
                        rep: Representation) -> Matrix:
    """Block-diagonal action of the element on a context's ambient space."""
    amb = sum(rep.dim_of(s) for s in context)
    rows: list[tuple[Fraction, ...]] = []
    off = 0
    for s in context:
        if s not in e.subdiagram.vertices:
            raise DimensionMismatchError(
                f"context sort {s!r} is outside the algebra's subdiagram")
        block = e.block_of(s)
        n = rep.dim_of(s)
        for i in range(n):
            row = [Fraction(0)] * amb
            row[off:off + n] = block.entries[i]
            rows.append(tuple(row))
        off += n
    return Matrix(amb, amb, tuple(rows))


def act_on_object(e: EndElement, obj: DefinableObject,
                  rep: Representation) -> Matrix:
    """Quotient matrix of the element's action on a definable object.

    Naturality makes every definable K and K' invariant under the algebra;
    a violation raises DoesNotPreserveError, which indicates a bug rather
    than bad input.
    """
    a = block_action_matrix(e, obj.context, rep)
    if not contains(obj.K, map_subspace(a, obj.K)):
        raise DoesNotPreserveError("element does not preserve K")
    if not contains(obj.K_prime, map_subspace(a, obj.K_prime)):
        raise DoesNotPreserveError("element does not preserve K'")
    return induced_map(a, (obj.K, obj.K_prime), (obj.K, obj.K_prime))
