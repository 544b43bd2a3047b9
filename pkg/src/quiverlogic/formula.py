"""Terms and regular formulas over a quiver's language.

A term from sort ``a`` to sort ``c`` is a rational linear combination of
composable edge paths; a regular formula is kept in existential-conjunctive
normal form: context variables, bound (existentially quantified) variables,
and equation rows.  Each row fixes a target sort and assigns one term per
variable; it encodes "sum of the terms applied to their variables equals 0".

The module also hosts the text grammar for formulas:

    formula  := "exists" bindings "." conj | conj
    bindings := var ":" sort { "," var ":" sort }
    conj     := eq { "&" eq }
    eq       := expr "=" expr
    expr     := mono { ("+"|"-") mono }
    mono     := [ rational "*" ] app | rational
    app      := var | edge "(" app ")"
    rational := integer [ "/" positive-integer ]

The context is declared separately as "var:sort" pairs; the literal 0 is
the zero term of the row's target sort.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .linalg import Matrix
from .quiver import Quiver, Representation, UnknownEdgeError


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownSortError(ValueError):
    pass


class NonComposablePathError(ValueError):
    pass


class EquationSortMismatchError(ValueError):
    pass


class ContextMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Term:
    """Linear combination of paths from ``source`` to ``target``.

    Paths are tuples of edge names in order of application: the path
    (e1, e2) denotes the composite "apply e1, then e2".
    """

    source: str
    target: str
    summands: tuple[tuple[Fraction, tuple[str, ...]], ...]

    def is_zero(self) -> bool:
        return all(c == 0 for c, _ in self.summands)

    def max_path_len(self) -> int:
        return max((len(p) for c, p in self.summands if c != 0), default=0)


def zero_term(source: str, target: str) -> Term:
    return Term(source, target, ())


def identity_term(sort: str) -> Term:
    return Term(sort, sort, ((Fraction(1), ()),))


def path_term(quiver: Quiver, source: str, path: Sequence[str],
              coeff=Fraction(1)) -> Term:
    """Single-path term, validated against the quiver."""
    if not quiver.has_vertex(source):
        raise UnknownSortError(f"unknown sort {source!r}")
    at = source
    for name in path:
        e = quiver.edge(name)
        if e.source != at:
            raise NonComposablePathError(
                f"edge {name!r} expects source {e.source!r}, path is at {at!r}")
        at = e.target
    return Term(source, at, ((Fraction(coeff), tuple(path)),))


def term_add(a: Term, b: Term) -> Term:
    if (a.source, a.target) != (b.source, b.target):
        raise EquationSortMismatchError("cannot add terms of different sorts")
    return Term(a.source, a.target, a.summands + b.summands)


def term_scale(t: Term, c) -> Term:
    c = Fraction(c)
    return Term(t.source, t.target, tuple((c * k, p) for k, p in t.summands))


def term_neg(t: Term) -> Term:
    return term_scale(t, -1)


def _collect_term(t: Term) -> Term:
    acc: dict[tuple[str, ...], Fraction] = {}
    for c, p in t.summands:
        acc[p] = acc.get(p, Fraction(0)) + c
    kept = sorted(((p, c) for p, c in acc.items() if c != 0),
                  key=lambda pc: (len(pc[0]), pc[0]))
    return Term(t.source, t.target, tuple((c, p) for p, c in kept))


def term_matrix(t: Term, rep: Representation) -> Matrix:
    """Matrix of the term under the representation.

    For a summand with path (e1, ..., ek) this is T(ek)···T(e1); the empty
    path contributes the identity, and a term with no summands is the zero
    map from the source space to the target space.
    """
    if not rep.quiver.has_vertex(t.source) or not rep.quiver.has_vertex(t.target):
        raise UnknownSortError("term sorts not present in the representation")
    out = Matrix.zeros(rep.dim_of(t.target), rep.dim_of(t.source))
    for c, path in t.summands:
        if c == 0:
            continue
        m = Matrix.identity(rep.dim_of(t.source))
        for name in path:
            m = rep.mat_of(name) @ m
        out = out + m.scale(c)
    return out


@dataclass(frozen=True)
class Equation:
    """One equation row: the terms, applied to their variables, sum to zero."""

    target: str
    terms: tuple[Term, ...]

    def max_path_len(self) -> int:
        return max((t.max_path_len() for t in self.terms), default=0)


@dataclass(frozen=True)
class RegularFormula:
    context: tuple[str, ...]
    bound: tuple[str, ...]
    equations: tuple[Equation, ...]

    def variables(self) -> tuple[str, ...]:
        return self.context + self.bound


@dataclass(frozen=True)
class Sequent:
    context: tuple[str, ...]
    lhs: RegularFormula
    rhs: RegularFormula

    def __post_init__(self):
        if self.lhs.context != self.context or self.rhs.context != self.context:
            raise ContextMismatchError("sequent sides must share the context")


def top(context: Sequence[str], bound: Sequence[str] = ()) -> RegularFormula:
    return RegularFormula(tuple(context), tuple(bound), ())


def _term_key(t: Term):
    return tuple((len(p), p, c.numerator, c.denominator) for c, p in t.summands)


def _equation_key(eq: Equation):
    return (eq.max_path_len(), eq.target, tuple(_term_key(t) for t in eq.terms))


def normalize(f: RegularFormula) -> RegularFormula:
    """Collect summands, drop zero summands and all-zero rows, order rows.

    Rows are sorted by (max path length, target sort, term shape) and exact
    duplicates are dropped; the result is idempotent and has the same
    interpretation in every representation.
    """
    rows = []
    for eq in f.equations:
        terms = tuple(_collect_term(t) for t in eq.terms)
        if all(t.is_zero() for t in terms):
            continue
        rows.append(Equation(eq.target, terms))
    rows = sorted(set(rows), key=_equation_key)
    return RegularFormula(f.context, f.bound, tuple(rows))


# ---------------------------------------------------------------------------
# parsing


_SYMBOLS = ("(", ")", ":", ",", ".", "&", "=", "+", "-", "*", "/")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        if ch in _SYMBOLS:
            tokens.append((ch, ch, i))
            i += 1
            continue
        raise FormulaSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, quiver: Quiver, variables: list[tuple[str, str]]):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.quiver = quiver
        self.variables = variables          # (name, sort) pairs, context first
        self.var_index = {name: i for i, (name, _) in enumerate(variables)}
        if len(self.var_index) != len(variables):
            raise FormulaSyntaxError("duplicate variable name", 0)

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            raise FormulaSyntaxError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return tok

    def declare(self, name: str, sort: str, pos: int):
        if not self.quiver.has_vertex(sort):
            raise UnknownSortError(f"unknown sort {sort!r}")
        if name in self.var_index:
            raise FormulaSyntaxError(f"duplicate variable {name!r}", pos)
        self.var_index[name] = len(self.variables)
        self.variables.append((name, sort))

    def parse_rational(self) -> Fraction:
        tok = self.expect("int")
        num = int(tok[1])
        if self.peek()[0] == "/":
            self.next()
            dtok = self.expect("int")
            den = int(dtok[1])
            if den == 0:
                raise FormulaSyntaxError("zero denominator", dtok[2])
            return Fraction(num, den)
        return Fraction(num)

    def parse_app(self) -> tuple[int, tuple[str, ...]]:
        """Returns (variable index, path in application order)."""
        tok = self.expect("name")
        name = tok[1]
        if self.peek()[0] == "(":
            if not self.quiver.has_edge(name):
                raise UnknownEdgeError(f"unknown edge {name!r}")
            self.next()
            var, path = self.parse_app()
            self.expect(")")
            edge = self.quiver.edge(name)
            at = self.variables[var][1] if not path else self.quiver.edge(path[-1]).target
            if edge.source != at:
                raise NonComposablePathError(
                    f"edge {name!r} expects source {edge.source!r}, got {at!r}")
            return var, path + (name,)
        if name not in self.var_index:
            raise FormulaSyntaxError(f"unknown variable {name!r}", tok[2])
        return self.var_index[name], ()

    def parse_mono(self):
        """Returns (coeff, var, path, pos) or None for the zero literal."""
        kind, _, pos = self.peek()
        if kind == "int":
            c = self.parse_rational()
            if self.peek()[0] == "*":
                self.next()
                var, path = self.parse_app()
                return (c, var, path, pos)
            if c != 0:
                raise FormulaSyntaxError(
                    "only the literal 0 may stand alone in an equation", pos)
            return None
        var, path = self.parse_app()
        return (Fraction(1), var, path, pos)

    def parse_expr(self) -> list:
        monos = []
        m = self.parse_mono()
        if m is not None:
            monos.append(m)
        while self.peek()[0] in ("+", "-"):
            sign = Fraction(1) if self.next()[0] == "+" else Fraction(-1)
            m = self.parse_mono()
            if m is not None:
                monos.append((sign * m[0], m[1], m[2], m[3]))
        return monos

    def parse_eq(self) -> Equation | None:
        lhs = self.parse_expr()
        eq_tok = self.expect("=")
        rhs = self.parse_expr()
        monos = lhs + [(-c, v, p, pos) for (c, v, p, pos) in rhs]
        if not monos:
            return None
        target = None
        for c, var, path, pos in monos:
            t = self.variables[var][1] if not path else self.quiver.edge(path[-1]).target
            if target is None:
                target = t
            elif target != t:
                raise EquationSortMismatchError(
                    f"equation mixes target sorts {target!r} and {t!r}")
        terms = []
        for i, (_, sort) in enumerate(self.variables):
            summands = tuple((c, p) for c, v, p, _ in monos if v == i)
            terms.append(Term(sort, target, summands))
        _ = eq_tok
        return Equation(target, tuple(terms))

    def parse_formula(self) -> RegularFormula:
        n_context = len(self.variables)
        if self.peek()[:2] == ("name", "exists"):
            self.next()
            while True:
                vtok = self.expect("name")
                self.expect(":")
                stok = self.expect("name")
                self.declare(vtok[1], stok[1], vtok[2])
                if self.peek()[0] != ",":
                    break
                self.next()
            self.expect(".")
        rows = []
        while True:
            eq = self.parse_eq()
            if eq is not None:
                rows.append(eq)
            if self.peek()[0] != "&":
                break
            self.next()
        self.expect("end")
        context = tuple(s for _, s in self.variables[:n_context])
        bound = tuple(s for _, s in self.variables[n_context:])
        return normalize(RegularFormula(context, bound, tuple(rows)))


def parse_context(text: str, quiver: Quiver) -> list[tuple[str, str]]:
    """Parse a context declaration like "x:d, y:e" into (name, sort) pairs."""
    pairs: list[tuple[str, str]] = []
    text = text.strip()
    if not text:
        return pairs
    for part in text.split(","):
        if ":" not in part:
            raise FormulaSyntaxError(f"bad context entry {part.strip()!r}", 0)
        name, sort = (x.strip() for x in part.split(":", 1))
        if not quiver.has_vertex(sort):
            raise UnknownSortError(f"unknown sort {sort!r}")
        pairs.append((name, sort))
    return pairs


def parse_formula(text: str, quiver: Quiver,
                  context: str | Sequence[tuple[str, str]] = ()) -> RegularFormula:
    """Parse formula text against the quiver; context declared separately."""
    if isinstance(context, str):
        pairs = parse_context(context, quiver)
    else:
        pairs = list(context)
        for _, sort in pairs:
            if not quiver.has_vertex(sort):
                raise UnknownSortError(f"unknown sort {sort!r}")
    return _Parser(text, quiver, pairs).parse_formula()


# ---------------------------------------------------------------------------
# printing


def _var_names(f: RegularFormula) -> list[str]:
    return [f"x{i + 1}" for i in range(len(f.context))] + \
           [f"y{i + 1}" for i in range(len(f.bound))]


def _render_app(var: str, path: tuple[str, ...]) -> str:
    out = var
    for edge in path:
        out = f"{edge}({out})"
    return out


def _render_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_formula(f: RegularFormula) -> str:
    """Canonical text; parse(format(f)) == f for normal-form f."""
    names = _var_names(f)
    parts = []
    for eq in f.equations:
        monos = []
        for i in range(len(names)):
            for c, p in eq.terms[i].summands:
                if c != 0:
                    monos.append((c, _render_app(names[i], p)))
        if not monos:
            parts.append("0 = 0")
            continue
        pieces = []
        first_c, first_app = monos[0]
        if first_c < 0:
            pieces.append("0")
            monos = [(-first_c, first_app)] + monos[1:]
            signs = ["-"] + ["-" if c < 0 else "+" for c, _ in monos[1:]]
        else:
            signs = [""] + ["-" if c < 0 else "+" for c, _ in monos[1:]]
        for (c, app), sign in zip(monos, signs):
            mag = abs(c)
            body = app if mag == 1 else f"{_render_coeff(mag)}*{app}"
            pieces.append(body if not sign else f"{sign} {body}")
        parts.append(" ".join(pieces) + " = 0")
    body = " & ".join(parts) if parts else "0 = 0"
    if f.bound:
        binds = ", ".join(f"y{i + 1}:{s}" for i, s in enumerate(f.bound))
        return f"exists {binds} . {body}"
    return body


def format_context(f: RegularFormula) -> str:
    return ", ".join(f"x{i + 1}:{s}" for i, s in enumerate(f.context))


# ---------------------------------------------------------------------------
# formula combinators (used to synthesize definability certificates)


def _pad_terms(eq: Equation, sorts: Sequence[str], at: int) -> Equation:
    """Insert zero terms for new variables at position ``at``."""
    terms = eq.terms[:at] + tuple(zero_term(s, eq.target) for s in sorts) + eq.terms[at:]
    return Equation(eq.target, terms)


def conj(f: RegularFormula, g: RegularFormula) -> RegularFormula:
    """Conjunction of two formulas over one context; bound variables renamed apart."""
    if f.context != g.context:
        raise ContextMismatchError("conjunction requires a shared context")
    nc, nf = len(f.context), len(f.bound)
    rows = [_pad_terms(eq, g.bound, nc + nf) for eq in f.equations]
    rows += [_pad_terms(eq, f.bound, nc) for eq in g.equations]
    return normalize(RegularFormula(f.context, f.bound + g.bound, tuple(rows)))


def product_formula(f: RegularFormula, g: RegularFormula) -> RegularFormula:
    """Formula on the concatenated context whose meaning is the product."""
    nf_ctx, ng_ctx = len(f.context), len(g.context)
    nf_b = len(f.bound)
    context = f.context + g.context
    bound = f.bound + g.bound
    rows = []
    for eq in f.equations:
        eq = _pad_terms(eq, g.context, nf_ctx)                 # after f's context
        eq = _pad_terms(eq, g.bound, nf_ctx + ng_ctx + nf_b)   # after f's bound
        rows.append(eq)
    for eq in g.equations:
        eq = _pad_terms(eq, f.context, 0)
        eq = _pad_terms(eq, f.bound, nf_ctx + ng_ctx)
        rows.append(eq)
    return normalize(RegularFormula(context, bound, tuple(rows)))


def exists_project(f: RegularFormula, keep: Iterable[int]) -> RegularFormula:
    """Existentially quantify the context positions not in ``keep``."""
    keep = sorted(set(keep))
    for i in keep:
        if i < 0 or i >= len(f.context):
            raise IndexError(f"context position {i} out of range")
    dropped = [i for i in range(len(f.context)) if i not in keep]
    order = keep + dropped + [len(f.context) + j for j in range(len(f.bound))]
    context = tuple(f.context[i] for i in keep)
    bound = tuple(f.context[i] for i in dropped) + f.bound
    rows = [Equation(eq.target, tuple(eq.terms[i] for i in order))
            for eq in f.equations]
    return normalize(RegularFormula(context, bound, tuple(rows)))


def substitute_linear(f: RegularFormula, new_context: Sequence[str],
                      assignment: Sequence[Sequence[tuple[Fraction, int]]]) -> RegularFormula:
    """Precompose with the linear map sending new variables to old ones.

    assignment[i] lists (coeff, new position) pairs replacing old context
    variable i; all referenced positions must carry old variable i's sort.
    The result means { y : (sum of the assignment applied to y) satisfies f }.
    """
    new_context = tuple(new_context)
    for i, subst in enumerate(assignment):
        for _, p in subst:
            if new_context[p] != f.context[i]:
                raise EquationSortMismatchError(
                    f"substitution target {p} has sort {new_context[p]!r}, "
                    f"expected {f.context[i]!r}")
    rows = []
    for eq in f.equations:
        new_terms = [zero_term(s, eq.target) for s in new_context]
        for i, subst in enumerate(assignment):
            for c, p in subst:
                new_terms[p] = term_add(new_terms[p], term_scale(eq.terms[i], c))
        rows.append(Equation(eq.target, tuple(new_terms) + eq.terms[len(f.context):]))
    return normalize(RegularFormula(new_context, f.bound, tuple(rows)))


def coordinate_equality(context: Sequence[str],
                        pairs: Iterable[tuple[int, int]]) -> RegularFormula:
    """Formula asserting equality of context variables at the given positions."""
    context = tuple(context)
    rows = []
    for i, j in pairs:
        if context[i] != context[j]:
            raise EquationSortMismatchError("equated positions differ in sort")
        terms = [zero_term(s, context[i]) for s in context]
        terms[i] = identity_term(context[i])
        terms[j] = term_neg(identity_term(context[j]))
        rows.append(Equation(context[i], tuple(terms)))
    return normalize(RegularFormula(context, (), tuple(rows)))


def formula_sum(f: RegularFormula, g: RegularFormula) -> RegularFormula:
    """Formula on the shared context denoting the sum of the two subspaces."""
    if f.context != g.context:
        raise ContextMismatchError("sum requires a shared context")
    ctx = f.context
    n = len(ctx)
    bound = ctx + ctx + f.bound + g.bound
    rows = []
    for i, s in enumerate(ctx):
        terms = [zero_term(t, s) for t in ctx + bound]
        terms[i] = identity_term(s)
        terms[n + i] = term_neg(identity_term(s))          # first copy
        terms[2 * n + i] = term_neg(identity_term(s))      # second copy
        rows.append(Equation(s, tuple(terms)))
    for eq in f.equations:
        terms = [zero_term(t, eq.target) for t in ctx + bound]
        for i in range(n):
            terms[n + i] = eq.terms[i]
        for j in range(len(f.bound)):
            terms[3 * n + j] = eq.terms[n + j]
        rows.append(Equation(eq.target, tuple(terms)))
    for eq in g.equations:
        terms = [zero_term(t, eq.target) for t in ctx + bound]
        for i in range(n):
            terms[2 * n + i] = eq.terms[i]
        for j in range(len(g.bound)):
            terms[3 * n + len(f.bound) + j] = eq.terms[n + j]
        rows.append(Equation(eq.target, tuple(terms)))
    return normalize(RegularFormula(ctx, bound, tuple(rows)))
