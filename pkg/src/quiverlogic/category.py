"""The definable-quotient category of a representation, at finite scale.

Objects are quotient presentations K/K' of definable subspaces in a shared
context; morphisms carry both a concrete matrix on fixed quotient bases and
a formula certificate whose interpretation is the graph relation of the map
(the pullback of the quotient map along the two projections).  The matrix is
the computational identity of a morphism; the certificate witnesses that the
morphism lives in the definable world rather than in ambient linear algebra.

The relation calculus at the bottom of the module checks the composition
conditions characterizing which relations between quotient pairs are the
graphs of linear maps, and converts between the two encodings.  Equivalence
relations are stored additively: a pair (x, y) is related iff x - y lies in
the stored submodule.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .linalg import (DimensionMismatchError, Matrix, QuotientSpace, Subspace,
                     contains, full_space, induced_map, intersect, kernel,
                     map_subspace, project, span, subspace_sum, zero_subspace)
from .formula import (RegularFormula, conj, coordinate_equality,
                      exists_project, formula_sum, identity_term, normalize,
                      product_formula, substitute_linear, term_neg, top,
                      zero_term, Equation, Term)
from .interp import Budget, enumerate_formulas_in_context, interpret
from .quiver import Representation


class NotASubobjectError(ValueError):
    pass


class NotFunctionalError(ValueError):
    def __init__(self, condition: str, message: str):
        super().__init__(message)
        self.condition = condition


class NotComposableError(ValueError):
    pass


class NotAnEquivalenceError(ValueError):
    pass


@dataclass(frozen=True)
class DefinableObject:
    """Quotient presentation K/K' with definability certificates."""

    context: tuple[str, ...]
    K: Subspace
    K_prime: Subspace
    cert_K: RegularFormula
    cert_K_prime: RegularFormula

    @property
    def qdim(self) -> int:
        return self.K.dim - self.K_prime.dim

    @property
    def ambient_dim(self) -> int:
        return self.K.ambient_dim


def same_presentation(a: DefinableObject, b: DefinableObject) -> bool:
    """Equality of the underlying quotient data, ignoring certificates."""
    return (a.context == b.context and a.K == b.K and a.K_prime == b.K_prime)


@dataclass(frozen=True)
class DefinableMorphism:
    """Morphism between quotient presentations.

    ``map`` is the matrix on the deterministic quotient bases; ``graph`` is
    the pullback relation {(x, y) : x in K_dom, map[x] = [y]} and
    ``graph_cert`` a formula interpreting to it.
    """

    dom: DefinableObject
    cod: DefinableObject
    map: Matrix
    graph_cert: RegularFormula
    graph: Subspace


def same_morphism(f: DefinableMorphism, g: DefinableMorphism) -> bool:
    """Morphism equality: same presentations and same quotient matrix."""
    return (same_presentation(f.dom, g.dom) and same_presentation(f.cod, g.cod)
            and f.map == g.map)


def zero_point_formula(context: Sequence[str]) -> RegularFormula:
    """The formula pinning every context variable to zero."""
    context = tuple(context)
    rows = []
    for i, s in enumerate(context):
        terms = [zero_term(t, s) for t in context]
        terms[i] = identity_term(s)
        rows.append(Equation(s, tuple(terms)))
    return normalize(RegularFormula(context, (), tuple(rows)))


def make_object(phi: RegularFormula, psi: RegularFormula,
                rep: Representation) -> DefinableObject:
    """Object with K = [[phi]] and K' = [[psi]]; psi must cut a subspace of K."""
    if phi.context != psi.context:
        raise NotASubobjectError("subobject formula must share the context")
    k = interpret(phi, rep)
    kp = interpret(psi, rep)
    if not contains(k, kp):
        raise NotASubobjectError(
            "the second formula does not define a subspace of the first")
    return DefinableObject(phi.context, k, kp, normalize(phi), normalize(psi))


def _product_subspace(u: Subspace, v: Subspace) -> Subspace:
    """u x v inside the concatenated ambient; block bases stay canonical."""
    m, n = u.ambient_dim, v.ambient_dim
    zero_u = (Fraction(0),) * m
    zero_v = (Fraction(0),) * n
    rows = [r + zero_v for r in u.basis.entries]
    rows += [zero_u + r for r in v.basis.entries]
    return Subspace(m + n, Matrix(len(rows), m + n, tuple(rows)))


def _ambient_graph(l_mat: Matrix, dom: DefinableObject,
                   cod: DefinableObject) -> Subspace:
    """Pullback relation of the quotient map induced by an ambient matrix."""
    m, n = dom.ambient_dim, cod.ambient_dim
    rows = [k + l_mat.apply(k) for k in dom.K.basis.entries]
    zero_m = (Fraction(0),) * m
    rows += [zero_m + kp for kp in cod.K_prime.basis.entries]
    return span(rows, m + n)


def _graph_matrix(graph: Subspace, dom: DefinableObject,
                  cod: DefinableObject) -> Matrix:
    """Quotient matrix read off a saturated graph relation."""
    dq = QuotientSpace(dom.K, dom.K_prime)
    cq = QuotientSpace(cod.K, cod.K_prime)
    m = dom.ambient_dim
    basis = graph.basis
    bx = Matrix(basis.rows, m, tuple(r[:m] for r in basis.entries))
    by = Matrix(basis.rows, cod.ambient_dim, tuple(r[m:] for r in basis.entries))
    from .linalg import solve
    sols = solve(bx.transpose(), [c for c in dq.completion])
    cols = []
    for sol in sols:
        if sol is None:
            raise NotFunctionalError("totality", "graph is not total on the domain")
        y = by.transpose().apply(sol)
        cols.append(cq.coords(y))
    return Matrix(cq.qdim, dq.qdim,
                  tuple(tuple(col[i] for col in cols) for i in range(cq.qdim)))


def make_morphism(dom: DefinableObject, cod: DefinableObject,
                  theta: RegularFormula, rep: Representation) -> DefinableMorphism:
    """Morphism defined by a functional formula over the concatenated context.

    The graph of theta is saturated by K'-parts and the three functionality
    conditions are verified semantically: the saturated graph must lie in
    K_dom x K_cod, project onto all of K_dom, and relate zero only to
    elements of cod.K'.  The returned matrix acts on quotient bases.
    """
    if theta.context != dom.context + cod.context:
        raise NotFunctionalError(
            "context", "theta's context must be dom.context ++ cod.context")
    g = interpret(theta, rep)
    g_sat = subspace_sum(g, _product_subspace(dom.K_prime, cod.K_prime))
    m, n = dom.ambient_dim, cod.ambient_dim
    if not contains(_product_subspace(dom.K, cod.K), g_sat):
        raise NotFunctionalError(
            "graph", "graph is not contained in the product of the presentations")
    if not contains(project(g_sat, range(m)), dom.K):
        raise NotFunctionalError("totality", "graph is not total on the domain")
    zero_fiber = intersect(g_sat, _product_subspace(zero_subspace(m), full_space(n)))
    if not contains(cod.K_prime, project(zero_fiber, range(m, m + n))):
        raise NotFunctionalError(
            "single-valued", "graph is not single-valued modulo cod.K'")
    cert = formula_sum(theta, product_formula(dom.cert_K_prime, cod.cert_K_prime))
    return DefinableMorphism(dom, cod, _graph_matrix(g_sat, dom, cod), cert, g_sat)


def _shift_context(f: RegularFormula, new_context: Sequence[str],
                   offset: int) -> RegularFormula:
    """Reinterpret f's context at the given offset inside a larger context."""
    assignment = [[(Fraction(1), offset + i)] for i in range(len(f.context))]
    return substitute_linear(f, new_context, assignment)


def _difference_formula(f: RegularFormula, new_context: Sequence[str],
                        plus: int, minus: int) -> RegularFormula:
    """Formula asserting that (block at plus) - (block at minus) satisfies f."""
    assignment = [[(Fraction(1), plus + i), (Fraction(-1), minus + i)]
                  for i in range(len(f.context))]
    return substitute_linear(f, new_context, assignment)


def identity_morphism(obj: DefinableObject) -> DefinableMorphism:
    ctx2 = obj.context + obj.context
    n = len(obj.context)
    cert = conj(_shift_context(obj.cert_K, ctx2, 0),
                _difference_formula(obj.cert_K_prime, ctx2, 0, n))
    graph = _ambient_graph(Matrix.identity(obj.ambient_dim), obj, obj)
    return DefinableMorphism(obj, obj, Matrix.identity(obj.qdim), cert, graph)


def zero_morphism(dom: DefinableObject, cod: DefinableObject) -> DefinableMorphism:
    cert = product_formula(dom.cert_K, cod.cert_K_prime)
    graph = _product_subspace(dom.K, cod.K_prime)
    return DefinableMorphism(dom, cod, Matrix.zeros(cod.qdim, dom.qdim),
                             cert, graph)


def compose(g: DefinableMorphism, f: DefinableMorphism) -> DefinableMorphism:
    """Composite g after f; graphs compose as relations, matrices multiply."""
    if not same_presentation(f.cod, g.dom):
        raise NotComposableError("codomain of f does not match domain of g")
    nx, ny, nz = len(f.dom.context), len(f.cod.context), len(g.cod.context)
    prod = product_formula(f.graph_cert, g.graph_cert)
    glue = coordinate_equality(prod.context,
                               [(nx + i, nx + ny + i) for i in range(ny)])
    cert = exists_project(conj(prod, glue),
                          list(range(nx)) + list(range(nx + 2 * ny, nx + 2 * ny + nz)))
    graph = relation_compose(f.graph, g.graph,
                             f.dom.ambient_dim, f.cod.ambient_dim,
                             g.cod.ambient_dim)
    return DefinableMorphism(f.dom, g.cod, g.map @ f.map, cert, graph)


def add_morphisms(f: DefinableMorphism, g: DefinableMorphism) -> DefinableMorphism:
    """Pointwise sum of two parallel morphisms."""
    if not (same_presentation(f.dom, g.dom) and same_presentation(f.cod, g.cod)):
        raise NotComposableError("morphism sum requires equal dom and cod")
    nx, ny = len(f.dom.context), len(f.cod.context)
    m, n = f.dom.ambient_dim, f.cod.ambient_dim
    # {(x, y) : exists y1 y2 with (x, y1) in G_f, (x, y2) in G_g, y = y1 + y2}
    prod = product_formula(f.graph_cert, g.graph_cert)    # (x1, y1, x2, y2)
    big_ctx = prod.context + f.cod.context                # ... + y
    prod = _shift_context(prod, big_ctx, 0)
    glue_x = coordinate_equality(big_ctx, [(i, nx + ny + i) for i in range(nx)])
    sum_rows = []
    for i, s in enumerate(f.cod.context):
        terms = [zero_term(t, s) for t in big_ctx]
        terms[2 * (nx + ny) + i] = identity_term(s)
        terms[nx + i] = term_neg(identity_term(s))
        terms[nx + ny + nx + i] = term_neg(identity_term(s))
        sum_rows.append(Equation(s, tuple(terms)))
    glue_y = normalize(RegularFormula(big_ctx, (), tuple(sum_rows)))
    cert = exists_project(conj(conj(prod, glue_x), glue_y),
                          list(range(nx)) + list(range(2 * (nx + ny),
                                                       2 * (nx + ny) + ny)))
    # Graph subspace: intersect G_f x G_g with {x1 = x2}, then map
    # (x1, y1, x2, y2) to (x1, y1 + y2).
    pair = _product_subspace(f.graph, g.graph)
    eq_rows = []
    for i in range(m):
        row = [Fraction(0)] * (2 * (m + n))
        row[i] = Fraction(1)
        row[m + n + i] = Fraction(-1)
        eq_rows.append(tuple(row))
    agree = kernel(Matrix(m, 2 * (m + n), tuple(eq_rows)))
    matched = intersect(pair, agree)
    collapse = []
    for i in range(m):
        row = [Fraction(0)] * (2 * (m + n))
        row[i] = Fraction(1)
        collapse.append(tuple(row))
    for j in range(n):
        row = [Fraction(0)] * (2 * (m + n))
        row[m + j] = Fraction(1)
        row[m + n + m + j] = Fraction(1)
        collapse.append(tuple(row))
    graph = map_subspace(Matrix(m + n, 2 * (m + n), tuple(collapse)), matched)
    return DefinableMorphism(f.dom, f.cod, f.map + g.map, cert, graph)


def scale_morphism(f: DefinableMorphism, c) -> DefinableMorphism:
    """Scalar multiple of a morphism."""
    c = Fraction(c)
    if c == 0:
        return zero_morphism(f.dom, f.cod)
    nx, ny = len(f.dom.context), len(f.cod.context)
    m, n = f.dom.ambient_dim, f.cod.ambient_dim
    # Certificate: exists y1 with theta(x, y1) and y = c*y1; the f-output
    # block goes to the existential positions nx+ny.. of the big context.
    big_ctx = f.dom.context + f.cod.context + f.cod.context
    assignment = [[(Fraction(1), i)] for i in range(nx)]
    assignment += [[(Fraction(1), nx + ny + i)] for i in range(ny)]
    shifted = substitute_linear(f.graph_cert, big_ctx, assignment)
    link_rows = []
    for i, s in enumerate(f.cod.context):
        terms = [zero_term(t, s) for t in big_ctx]
        terms[nx + i] = identity_term(s)                   # y
        terms[nx + ny + i] = Term(s, s, ((-c, ()),))       # -c * y1
        link_rows.append(Equation(s, tuple(terms)))
    link = normalize(RegularFormula(big_ctx, (), tuple(link_rows)))
    cert = exists_project(conj(shifted, link), range(nx + ny))
    scale_map = []
    for i in range(m):
        row = [Fraction(0)] * (m + n)
        row[i] = Fraction(1)
        scale_map.append(tuple(row))
    for j in range(n):
        row = [Fraction(0)] * (m + n)
        row[m + j] = c
        scale_map.append(tuple(row))
    graph = map_subspace(Matrix(m + n, m + n, tuple(scale_map)), f.graph)
    return DefinableMorphism(f.dom, f.cod, f.map.scale(c), cert, graph)


def kernel_obj(f: DefinableMorphism) -> tuple[DefinableObject, DefinableMorphism]:
    """Kernel object and its inclusion into the domain."""
    dom, cod = f.dom, f.cod
    m, n = dom.ambient_dim, cod.ambient_dim
    fiber = intersect(f.graph, _product_subspace(full_space(m), cod.K_prime))
    k_ker = project(fiber, range(m))
    cert = exists_project(
        conj(f.graph_cert, product_formula(top(dom.context), cod.cert_K_prime)),
        range(len(dom.context)))
    obj = DefinableObject(dom.context, k_ker, dom.K_prime, cert,
                          dom.cert_K_prime)
    n_ctx = len(dom.context)
    incl_cert = conj(_shift_context(cert, dom.context + dom.context, 0),
                     _difference_formula(dom.cert_K_prime,
                                         dom.context + dom.context, 0, n_ctx))
    incl_graph = _ambient_graph(Matrix.identity(m), obj, dom)
    incl_map = induced_map(Matrix.identity(m), (k_ker, dom.K_prime),
                           (dom.K, dom.K_prime))
    incl = DefinableMorphism(obj, dom, incl_map, incl_cert, incl_graph)
    return obj, incl


def cokernel_obj(f: DefinableMorphism) -> tuple[DefinableObject, DefinableMorphism]:
    """Cokernel object and the projection from the codomain onto it."""
    dom, cod = f.dom, f.cod
    m, n = dom.ambient_dim, cod.ambient_dim
    image_plus = project(f.graph, range(m, m + n))
    cert_kp = exists_project(f.graph_cert,
                             range(len(dom.context),
                                   len(dom.context) + len(cod.context)))
    obj = DefinableObject(cod.context, cod.K, image_plus, cod.cert_K, cert_kp)
    n_ctx = len(cod.context)
    proj_cert = conj(_shift_context(cod.cert_K, cod.context + cod.context, 0),
                     _difference_formula(cert_kp,
                                         cod.context + cod.context, 0, n_ctx))
    proj_graph = _ambient_graph(Matrix.identity(n), cod, obj)
    proj_map = induced_map(Matrix.identity(n), (cod.K, cod.K_prime),
                           (cod.K, image_plus))
    proj = DefinableMorphism(cod, obj, proj_map, proj_cert, proj_graph)
    return obj, proj


@dataclass(frozen=True)
class Biproduct:
    obj: DefinableObject
    inj_a: DefinableMorphism
    inj_b: DefinableMorphism
    proj_a: DefinableMorphism
    proj_b: DefinableMorphism


def biproduct(a: DefinableObject, b: DefinableObject) -> Biproduct:
    """Direct sum with its canonical injections and projections."""
    ctx = a.context + b.context
    k = _product_subspace(a.K, b.K)
    kp = _product_subspace(a.K_prime, b.K_prime)
    obj = DefinableObject(ctx, k, kp,
                          product_formula(a.cert_K, b.cert_K),
                          product_formula(a.cert_K_prime, b.cert_K_prime))
    na, nb = len(a.context), len(b.context)
    ma, mb = a.ambient_dim, b.ambient_dim

    inc_rows = [tuple(Fraction(1) if j == i else Fraction(0) for j in range(ma))
                for i in range(ma)]
    inc_rows += [(Fraction(0),) * ma] * mb
    inc_a_mat = Matrix(ma + mb, ma, tuple(inc_rows))
    inc_rows = [(Fraction(0),) * mb] * ma
    inc_rows += [tuple(Fraction(1) if j == i else Fraction(0) for j in range(mb))
                 for i in range(mb)]
    inc_b_mat = Matrix(ma + mb, mb, tuple(inc_rows))
    proj_a_mat = Matrix(ma, ma + mb, tuple(
        tuple(Fraction(1) if j == i else Fraction(0) for j in range(ma + mb))
        for i in range(ma)))
    proj_b_mat = Matrix(mb, ma + mb, tuple(
        tuple(Fraction(1) if j == ma + i else Fraction(0) for j in range(ma + mb))
        for i in range(mb)))

    ctx_ia = a.context + ctx
    cert_ia = conj(conj(_shift_context(a.cert_K, ctx_ia, 0),
                        _difference_formula(a.cert_K_prime, ctx_ia, na, 0)),
                   _shift_context(b.cert_K_prime, ctx_ia, na + na))
    ctx_ib = b.context + ctx
    cert_ib = conj(conj(_shift_context(b.cert_K, ctx_ib, 0),
                        _difference_formula(b.cert_K_prime, ctx_ib, nb + na, 0)),
                   _shift_context(a.cert_K_prime, ctx_ib, nb))
    ctx_pa = ctx + a.context
    cert_pa = conj(_shift_context(obj.cert_K, ctx_pa, 0),
                   _difference_formula(a.cert_K_prime, ctx_pa, 0, na + nb))
    ctx_pb = ctx + b.context
    cert_pb = conj(_shift_context(obj.cert_K, ctx_pb, 0),
                   _difference_formula(b.cert_K_prime, ctx_pb, na, na + nb))

    inj_a = DefinableMorphism(a, obj, induced_map(inc_a_mat, (a.K, a.K_prime),
                                                  (k, kp)),
                              cert_ia, _ambient_graph(inc_a_mat, a, obj))
    inj_b = DefinableMorphism(b, obj, induced_map(inc_b_mat, (b.K, b.K_prime),
                                                  (k, kp)),
                              cert_ib, _ambient_graph(inc_b_mat, b, obj))
    proj_a = DefinableMorphism(obj, a, induced_map(proj_a_mat, (k, kp),
                                                   (a.K, a.K_prime)),
                               cert_pa, _ambient_graph(proj_a_mat, obj, a))
    proj_b = DefinableMorphism(obj, b, induced_map(proj_b_mat, (k, kp),
                                                   (b.K, b.K_prime)),
                               cert_pb, _ambient_graph(proj_b_mat, obj, b))
    return Biproduct(obj, inj_a, inj_b, proj_a, proj_b)


@dataclass(frozen=True)
class HomSpace:
    dom: DefinableObject
    cod: DefinableObject
    basis: tuple[DefinableMorphism, ...]


def hom_space(dom: DefinableObject, cod: DefinableObject, rep: Representation,
              budget: Budget = Budget(max_context_vars=0)) -> HomSpace:
    """Basis of the definable morphisms found within the enumeration budget.

    Candidate graph formulas over the concatenated context are enumerated
    and tested for functionality; quotient matrices are collected up to
    linear span.  A budget-bounded under-approximation: completeness at the
    budget is all that is claimed.
    """
    ctx = dom.context + cod.context
    basis: list[DefinableMorphism] = []
    echelon: list[list[Fraction]] = []

    def extends(vec: list[Fraction]) -> bool:
        v = list(vec)
        for row in echelon:
            p = next((i for i, x in enumerate(row) if x), None)
            if p is not None and v[p]:
                f = v[p] / row[p]
                v = [a - f * b for a, b in zip(v, row)]
        if any(v):
            echelon.append(v)
            return True
        return False

    target_dim = dom.qdim * cod.qdim
    for theta in enumerate_formulas_in_context(rep.quiver, ctx, budget):
        if len(basis) == target_dim:
            break
        try:
            mor = make_morphism(dom, cod, theta, rep)
        except NotFunctionalError:
            continue
        flat = [x for row in mor.map.entries for x in row]
        if not flat:
            break
        if extends(flat):
            basis.append(mor)
    return HomSpace(dom, cod, tuple(basis))


# ---------------------------------------------------------------------------
# relation calculus on quotient pairs


@dataclass(frozen=True)
class RelationArrow:
    """Relation between quotient pairs, additively encoded.

    dom_module and cod_module are the submodules N with (x, y) related iff
    x - y lies in N; rel is the relation subspace inside the product.
    """

    dom_module: Subspace
    cod_module: Subspace
    rel: Subspace

    def __post_init__(self):
        if self.rel.ambient_dim != self.dom_module.ambient_dim + \
                self.cod_module.ambient_dim:
            raise DimensionMismatchError(
                "relation ambient must be the product of the two ambients")


def equivalence_relation(n_mod: Subspace) -> Subspace:
    """{(x, y) : x - y in N} as a subspace of the doubled ambient."""
    m = n_mod.ambient_dim
    rows = []
    for i in range(m):
        row = [Fraction(0)] * (2 * m)
        row[i] = Fraction(1)
        row[m + i] = Fraction(1)
        rows.append(row)
    zero_m = (Fraction(0),) * m
    rows += [list(r + zero_m) for r in n_mod.basis.entries]
    return span(rows, 2 * m)


def relation_compose(r: Subspace, s: Subspace, m: int, n: int, p: int) -> Subspace:
    """Composite of r (from Q^m to Q^n) followed by s (from Q^n to Q^p)."""
    if r.ambient_dim != m + n or s.ambient_dim != n + p:
        raise DimensionMismatchError("relation composition shape mismatch")
    left = _product_subspace(r, full_space(p))
    right = _product_subspace(full_space(m), s)
    both = intersect(left, right)
    return project(both, list(range(m)) + list(range(m + n, m + n + p)))


def relation_opposite(r: Subspace, m: int, n: int) -> Subspace:
    """Opposite relation: swap the two coordinate blocks."""
    if r.ambient_dim != m + n:
        raise DimensionMismatchError("relation opposite shape mismatch")
    return span([row[m:] + row[:m] for row in r.basis.entries], m + n)


_CONDITION_NAMES = ("RE=R", "FR=R", "E<=RoR", "RRo<=F")


def relation_violations(arrow: RelationArrow) -> tuple[str, ...]:
    """Names of the composition conditions the relation fails, in fixed order."""
    m = arrow.dom_module.ambient_dim
    n = arrow.cod_module.ambient_dim
    r = arrow.rel
    e = equivalence_relation(arrow.dom_module)
    f = equivalence_relation(arrow.cod_module)
    ro = relation_opposite(r, m, n)
    failures = []
    if relation_compose(e, r, m, m, n) != r:
        failures.append("RE=R")
    if relation_compose(r, f, m, n, n) != r:
        failures.append("FR=R")
    if not contains(relation_compose(r, ro, m, n, m), e):
        failures.append("E<=RoR")
    if not contains(f, relation_compose(ro, r, n, m, n)):
        failures.append("RRo<=F")
    return tuple(failures)


def check_relation_arrow(arrow: RelationArrow) -> bool:
    return not relation_violations(arrow)


def quotient_coordinate_matrix(n_mod: Subspace) -> Matrix:
    """Matrix of the quotient-coordinate map Q^m -> Q^(m - dim N)."""
    q = QuotientSpace(full_space(n_mod.ambient_dim), n_mod)
    cols = [q.coords(tuple(Fraction(1) if j == i else Fraction(0)
                           for j in range(n_mod.ambient_dim)))
            for i in range(n_mod.ambient_dim)]
    return Matrix(q.qdim, n_mod.ambient_dim,
                  tuple(tuple(col[i] for col in cols) for i in range(q.qdim)))


def to_induced_map(arrow: RelationArrow) -> Matrix:
    """Matrix of the quotient map a valid relation arrow encodes."""
    m = arrow.dom_module.ambient_dim
    n = arrow.cod_module.ambient_dim
    dq = QuotientSpace(full_space(m), arrow.dom_module)
    cq = QuotientSpace(full_space(n), arrow.cod_module)
    basis = arrow.rel.basis
    bx = Matrix(basis.rows, m, tuple(r[:m] for r in basis.entries))
    by = Matrix(basis.rows, n, tuple(r[m:] for r in basis.entries))
    from .linalg import solve
    sols = solve(bx.transpose(), [c for c in dq.completion])
    cols = []
    for sol in sols:
        if sol is None:
            raise NotAnEquivalenceError("relation is not total on its domain")
        cols.append(cq.coords(by.transpose().apply(sol)))
    return Matrix(cq.qdim, dq.qdim,
                  tuple(tuple(col[i] for col in cols) for i in range(cq.qdim)))


def from_induced_map(alpha: Matrix, dom_module: Subspace,
                     cod_module: Subspace) -> RelationArrow:
    """Relation arrow reconstructed from a quotient matrix via its pullback."""
    m = dom_module.ambient_dim
    n = cod_module.ambient_dim
    qx = quotient_coordinate_matrix(dom_module)
    qy = quotient_coordinate_matrix(cod_module)
    if alpha.cols != qx.rows or alpha.rows != qy.rows:
        raise DimensionMismatchError("matrix shape does not match the quotients")
    lhs = alpha @ qx
    rows = [lhs.entries[i] + tuple(-x for x in qy.entries[i])
            for i in range(alpha.rows)]
    rel = kernel(Matrix(alpha.rows, m + n, tuple(rows)))
    return RelationArrow(dom_module, cod_module, rel)
