"""Session files: one quiver, named representations, named formulas.

Text form (UTF-8, ``#`` comments to end of line):

    quiver {
      vertex d;
      edge f: d -> d;
    }
    rep nil {
      dim d = 2;
      map f = [[0,1],[0,0]];
    }
    formula ker_f (x:d) := f(x) = 0;

Matrix entries are integers or rationals ``p/q``.  A JSON file with the
same content is accepted interchangeably:

    {"quiver": {"vertices": ["d"], "edges": [["f", "d", "d"]]},
     "reps": {"nil": {"dims": {"d": 2}, "mats": {"f": [["0", "1"], ["0", "0"]]}}},
     "formulas": {"ker_f": {"context": "x:d", "text": "f(x) = 0"}}}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .linalg import Matrix
from .quiver import Quiver, Representation
from .formula import RegularFormula, parse_formula


class SessionError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


@dataclass(frozen=True)
class Session:
    quiver: Quiver
    reps: dict[str, Representation]
    formulas: dict[str, RegularFormula]

    def rep(self, name: str) -> Representation:
        if name not in self.reps:
            raise KeyError(f"unknown representation {name!r}")
        return self.reps[name]

    def formula(self, name: str) -> RegularFormula:
        if name not in self.formulas:
            raise KeyError(f"unknown formula {name!r}")
        return self.formulas[name]


def _strip_comments(text: str) -> str:
    out = []
    for line in text.split("\n"):
        i = line.find("#")
        out.append(line if i < 0 else line[:i])
    return "\n".join(out)


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek_char(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take_name(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and \
                (self.text[self.pos].isalnum() or self.text[self.pos] in "_'"):
            self.pos += 1
        if self.pos == start:
            raise SessionError("expected a name", start)
        return self.text[start:self.pos]

    def take_int(self) -> int:
        self.skip_ws()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start or self.text[start:self.pos] == "-":
            raise SessionError("expected an integer", start)
        return int(self.text[start:self.pos])

    def expect(self, token: str):
        self.skip_ws()
        if not self.text.startswith(token, self.pos):
            raise SessionError(f"expected {token!r}", self.pos)
        self.pos += len(token)

    def try_take(self, token: str) -> bool:
        self.skip_ws()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def take_until(self, stop: str) -> str:
        start = self.pos
        i = self.text.find(stop, self.pos)
        if i < 0:
            raise SessionError(f"missing {stop!r}", start)
        self.pos = i + len(stop)
        return self.text[start:i]

    def take_rational(self) -> Fraction:
        num = self.take_int()
        if self.try_take("/"):
            den = self.take_int()
            if den == 0:
                raise SessionError("zero denominator", self.pos)
            return Fraction(num, den)
        return Fraction(num)

    def take_matrix(self) -> list[list[Fraction]]:
        self.expect("[")
        rows: list[list[Fraction]] = []
        if self.try_take("]"):
            return rows
        while True:
            self.expect("[")
            row: list[Fraction] = []
            if not self.try_take("]"):
                while True:
                    row.append(self.take_rational())
                    if self.try_take("]"):
                        break
                    self.expect(",")
            rows.append(row)
            if self.try_take("]"):
                break
            self.expect(",")
        return rows


def _build_matrix(rows: list[list[Fraction]], want_rows: int,
                  want_cols: int) -> Matrix:
    if not rows or not any(rows):
        # Degenerate literals stand for the zero map of the declared shape.
        if all(len(r) == 0 for r in rows):
            return Matrix.zeros(want_rows, want_cols)
    return Matrix.from_rows(rows, cols=want_cols if not rows else None)


def parse_session_text(text: str) -> Session:
    r = _Reader(_strip_comments(text))
    quiver: Quiver | None = None
    raw_reps: list[tuple[str, dict[str, int], dict[str, list[list[Fraction]]]]] = []
    raw_formulas: list[tuple[str, str, str]] = []
    while not r.at_end():
        kw = r.take_name()
        if kw == "quiver":
            if quiver is not None:
                raise SessionError("duplicate quiver section", r.pos)
            r.expect("{")
            vertices: list[str] = []
            edges: list[tuple[str, str, str]] = []
            while not r.try_take("}"):
                stmt = r.take_name()
                if stmt == "vertex":
                    vertices.append(r.take_name())
                    r.expect(";")
                elif stmt == "edge":
                    name = r.take_name()
                    r.expect(":")
                    src = r.take_name()
                    r.expect("->")
                    tgt = r.take_name()
                    r.expect(";")
                    edges.append((name, src, tgt))
                else:
                    raise SessionError(f"unknown quiver statement {stmt!r}", r.pos)
            try:
                quiver = Quiver.build(vertices, edges)
            except ValueError as exc:
                raise SessionError(str(exc)) from exc
        elif kw == "rep":
            name = r.take_name()
            r.expect("{")
            dims: dict[str, int] = {}
            mats: dict[str, list[list[Fraction]]] = {}
            while not r.try_take("}"):
                stmt = r.take_name()
                if stmt == "dim":
                    v = r.take_name()
                    r.expect("=")
                    dims[v] = r.take_int()
                    r.expect(";")
                elif stmt == "map":
                    e = r.take_name()
                    r.expect("=")
                    mats[e] = r.take_matrix()
                    r.expect(";")
                else:
                    raise SessionError(f"unknown rep statement {stmt!r}", r.pos)
            raw_reps.append((name, dims, mats))
        elif kw == "formula":
            name = r.take_name()
            r.expect("(")
            ctx_text = r.take_until(")")
            r.expect(":=")
            body = r.take_until(";")
            raw_formulas.append((name, ctx_text.strip(), body.strip()))
        else:
            raise SessionError(f"unknown section {kw!r}", r.pos)
    return _assemble(quiver, raw_reps, raw_formulas)


def _assemble(quiver, raw_reps, raw_formulas) -> Session:
    if quiver is None:
        raise SessionError("session has no quiver section")
    reps: dict[str, Representation] = {}
    for name, dims, mats in raw_reps:
        if name in reps:
            raise SessionError(f"duplicate rep name {name!r}")
        for v in dims:
            if not quiver.has_vertex(v):
                raise SessionError(f"rep {name!r}: unknown vertex {v!r}")
        matrices: dict[str, Matrix] = {}
        for e_name, rows in mats.items():
            if not quiver.has_edge(e_name):
                raise SessionError(f"rep {name!r}: unknown edge {e_name!r}")
            e = quiver.edge(e_name)
            want_rows = dims.get(e.target, 0)
            want_cols = dims.get(e.source, 0)
            try:
                matrices[e_name] = _build_matrix(rows, want_rows, want_cols)
            except ValueError as exc:
                raise SessionError(f"rep {name!r}, edge {e_name!r}: {exc}") from exc
        reps[name] = Representation.build(quiver, dims, matrices)
    formulas: dict[str, RegularFormula] = {}
    for name, ctx_text, body in raw_formulas:
        if name in formulas:
            raise SessionError(f"duplicate formula name {name!r}")
        formulas[name] = parse_formula(body, quiver, ctx_text)
    return Session(quiver, reps, formulas)


def parse_session_json(data: dict) -> Session:
    qd = data.get("quiver")
    if qd is None:
        raise SessionError("session has no quiver object")
    edges = []
    for e in qd.get("edges", []):
        if isinstance(e, dict):
            edges.append((e["name"], e["source"], e["target"]))
        else:
            edges.append(tuple(e))
    try:
        quiver = Quiver.build(list(qd.get("vertices", [])), edges)
    except ValueError as exc:
        raise SessionError(str(exc)) from exc
    raw_reps = []
    for name, rd in data.get("reps", {}).items():
        dims = {v: int(n) for v, n in rd.get("dims", {}).items()}
        mats = {}
        for e_name, rows in rd.get("mats", {}).items():
            mats[e_name] = [[Fraction(str(x)) for x in row] for row in rows]
        raw_reps.append((name, dims, mats))
    raw_formulas = []
    for name, fd in data.get("formulas", {}).items():
        raw_formulas.append((name, fd.get("context", ""), fd["text"]))
    return _assemble(quiver, raw_reps, raw_formulas)


def parse_session(text: str) -> Session:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SessionError(f"invalid JSON: {exc}") from exc
        return parse_session_json(data)
    return parse_session_text(text)


def load_session(path: str) -> Session:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_session(fh.read())
