"""Diagrams and their representations in finite-dimensional rational spaces.

A quiver is a plain oriented graph: vertices name the sorts, edges name the
linear maps.  There is deliberately no composition law on edges; composite
behaviour only arises later through terms built over the quiver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .linalg import Matrix


class UnknownVertexError(ValueError):
    pass


class UnknownEdgeError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex names")
        if len({e.name for e in self.edges}) != len(self.edges):
            raise ValueError("duplicate edge names")
        vset = set(self.vertices)
        for e in self.edges:
            if e.source not in vset or e.target not in vset:
                raise UnknownVertexError(
                    f"edge {e.name!r} references unknown vertex")

    @staticmethod
    def build(vertices: Iterable[str],
              edges: Iterable[tuple[str, str, str]]) -> "Quiver":
        """Edges given as (name, source, target) triples."""
        return Quiver(tuple(vertices), tuple(Edge(*e) for e in edges))

    def vertex_index(self, name: str) -> int:
        try:
            return self.vertices.index(name)
        except ValueError:
            raise UnknownVertexError(f"unknown vertex {name!r}") from None

    def has_vertex(self, name: str) -> bool:
        return name in self.vertices

    def edge(self, name: str) -> Edge:
        for e in self.edges:
            if e.name == name:
                return e
        raise UnknownEdgeError(f"unknown edge {name!r}")

    def has_edge(self, name: str) -> bool:
        return any(e.name == name for e in self.edges)


@dataclass(frozen=True)
class Representation:
    """Assignment of a Q-vector space to each vertex and a matrix to each edge.

    dims and mats are aligned with quiver.vertices and quiver.edges; the
    matrix of an edge c -> d has shape dims[d] x dims[c].
    """

    quiver: Quiver
    dims: tuple[int, ...]
    mats: tuple[Matrix, ...]

    @staticmethod
    def build(quiver: Quiver, dims: dict[str, int],
              mats: dict[str, Matrix]) -> "Representation":
        for v in dims:
            if not quiver.has_vertex(v):
                raise UnknownVertexError(f"unknown vertex {v!r}")
        for e in mats:
            if not quiver.has_edge(e):
                raise UnknownEdgeError(f"unknown edge {e!r}")
        dtuple = tuple(dims.get(v, 0) for v in quiver.vertices)
        mtuple = []
        for e in quiver.edges:
            m = mats.get(e.name)
            if m is None:
                m = Matrix.zeros(dtuple[quiver.vertex_index(e.target)],
                                 dtuple[quiver.vertex_index(e.source)])
            mtuple.append(m)
        return Representation(quiver, dtuple, tuple(mtuple))

    def dim_of(self, vertex: str) -> int:
        return self.dims[self.quiver.vertex_index(vertex)]

    def mat_of(self, edge_name: str) -> Matrix:
        for e, m in zip(self.quiver.edges, self.mats):
            if e.name == edge_name:
                return m
        raise UnknownEdgeError(f"unknown edge {edge_name!r}")


def validate(rep: Representation) -> list[str]:
    """Shape violations as human-readable strings; empty iff well-formed."""
    violations = []
    if len(rep.dims) != len(rep.quiver.vertices):
        violations.append("dims length does not match vertex count")
        return violations
    if len(rep.mats) != len(rep.quiver.edges):
        violations.append("mats length does not match edge count")
        return violations
    for d, v in zip(rep.dims, rep.quiver.vertices):
        if d < 0:
            violations.append(f"vertex {v!r} has negative dimension {d}")
    for e, m in zip(rep.quiver.edges, rep.mats):
        want_rows = rep.dims[rep.quiver.vertex_index(e.target)]
        want_cols = rep.dims[rep.quiver.vertex_index(e.source)]
        if (m.rows, m.cols) != (want_rows, want_cols):
            violations.append(
                f"edge {e.name!r}: matrix is {m.rows}x{m.cols}, "
                f"expected {want_rows}x{want_cols}")
    return violations


@dataclass(frozen=True)
class Subdiagram:
    """Full subdiagram: a vertex subset together with all edges between them."""

    quiver: Quiver
    vertices: tuple[str, ...]

    def __post_init__(self):
        for v in self.vertices:
            if not self.quiver.has_vertex(v):
                raise UnknownVertexError(f"unknown vertex {v!r}")

    @staticmethod
    def of(quiver: Quiver, vertices: Iterable[str] | None = None) -> "Subdiagram":
        if vertices is None:
            return Subdiagram(quiver, quiver.vertices)
        keep = set(vertices)
        return Subdiagram(quiver, tuple(v for v in quiver.vertices if v in keep))

    def edges(self) -> tuple[Edge, ...]:
        keep = set(self.vertices)
        return tuple(e for e in self.quiver.edges
                     if e.source in keep and e.target in keep)

    def full_quiver(self) -> Quiver:
        return Quiver(self.vertices, self.edges())


def restrict(rep: Representation, vertices: Iterable[str]) -> Representation:
    """Restriction of rep to the full subdiagram on the given vertices."""
    sub = Subdiagram.of(rep.quiver, vertices)
    q = sub.full_quiver()
    dims = {v: rep.dim_of(v) for v in q.vertices}
    mats = {e.name: rep.mat_of(e.name) for e in q.edges}
    return Representation.build(q, dims, mats)
