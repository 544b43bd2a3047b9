"""Semantics: formulas as definable subspaces, sequent checks, and bounded
theory comparison of two representations over one quiver.

The interpretation of a formula stacks one matrix block per (equation,
variable) into M = [A | B] (context columns, then bound columns) and returns
the projection of ker M onto the context coordinates.  A sequent holds iff
the left interpretation is contained in the right one.

Theory comparison enumerates formulas within an explicit budget and tests,
for every ordered pair of enumerated formulas sharing a context, whether the
inclusion of interpretations agrees between the two representations.  The
search is evaluated by grouping formulas with equal interpretation pairs, so
the verdict and the reported witness are exactly those of the literal double
loop over the enumeration stream, at a fraction of the cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations as _combinations
from itertools import combinations_with_replacement, product
from typing import Iterator, Sequence

from . import linalg
from .linalg import Matrix, Subspace, contains, full_space, kernel, project, span
from .formula import (ContextMismatchError, Equation, RegularFormula, Sequent,
                      Term, _equation_key, term_matrix, top)
from .quiver import Quiver, Representation, validate


class DifferentQuiverError(ValueError):
    pass


class InvalidRepresentationError(ValueError):
    pass


@dataclass(frozen=True)
class Interpretation:
    formula: RegularFormula
    rep: Representation
    space: Subspace


def _context_dims(f: RegularFormula, rep: Representation) -> tuple[int, int]:
    amb_ctx = sum(rep.dim_of(s) for s in f.context)
    amb_bound = sum(rep.dim_of(s) for s in f.bound)
    return amb_ctx, amb_bound


def interpret(f: RegularFormula, rep: Representation) -> Subspace:
    """Definable subspace of the context space cut out by the formula."""
    amb_ctx, amb_bound = _context_dims(f, rep)
    amb = amb_ctx + amb_bound
    if not f.equations:
        return full_space(amb_ctx)
    blocks_rows = []
    for eq in f.equations:
        t_dim = rep.dim_of(eq.target)
        mats = [term_matrix(t, rep) for t in eq.terms]
        for i in range(t_dim):
            row = []
            for m in mats:
                row.extend(m.entries[i])
            blocks_rows.append(tuple(row))
    m = Matrix(len(blocks_rows), amb, tuple(blocks_rows))
    return project(kernel(m), range(amb_ctx))


def interpretation(f: RegularFormula, rep: Representation) -> Interpretation:
    return Interpretation(f, rep, interpret(f, rep))


def check_sequent(s: Sequent, rep: Representation) -> bool:
    """Validity in the representation: lhs interpretation inside rhs's."""
    if s.lhs.context != s.rhs.context:
        raise ContextMismatchError("sequent sides must share the context")
    return contains(interpret(s.rhs, rep), interpret(s.lhs, rep))


# ---------------------------------------------------------------------------
# budgets and enumeration


_DEFAULT_COEFFS = (Fraction(-1), Fraction(0), Fraction(1), Fraction(2))


@dataclass(frozen=True)
class Budget:
    """Finite enumeration budget.

    Enumerated equations carry at most one path summand per variable;
    richer per-variable combinations are reachable at larger bound-variable
    and equation budgets by flattening through fresh existentials.
    """

    max_context_vars: int = 2
    max_bound_vars: int = 2
    max_equations: int = 2
    max_path_length: int = 2
    coefficients: tuple[Fraction, ...] = _DEFAULT_COEFFS

    def nonzero_coefficients(self) -> tuple[Fraction, ...]:
        return tuple(c for c in self.coefficients if c != 0)

    def to_dict(self) -> dict:
        return {
            "max_context_vars": self.max_context_vars,
            "max_bound_vars": self.max_bound_vars,
            "max_equations": self.max_equations,
            "max_path_length": self.max_path_length,
            "coefficients": [str(c) for c in self.coefficients],
        }


def paths_from(quiver: Quiver, source: str, max_len: int) -> list[tuple[str, ...]]:
    """All edge paths из source of length <= max_len, by (length, edge order)."""
    out: list[tuple[str, ...]] = [()]
    frontier: list[tuple[tuple[str, ...], str]] = [((), source)]
    for _ in range(max_len):
        new_frontier = []
        for path, at in frontier:
            for e in quiver.edges:
                if e.source == at:
                    new_frontier.append((path + (e.name,), e.target))
        out.extend(p for p, _ in new_frontier)
        frontier = new_frontier
        if not frontier:
            break
    return out


def _path_target(quiver: Quiver, source: str, path: tuple[str, ...]) -> str:
    return source if not path else quiver.edge(path[-1]).target


def enumerate_contexts(quiver: Quiver, budget: Budget) -> Iterator[tuple[str, ...]]:
    for length in range(1, budget.max_context_vars + 1):
        yield from product(quiver.vertices, repeat=length)


def _enumerate_bounds(quiver: Quiver, budget: Budget) -> Iterator[tuple[str, ...]]:
    for length in range(budget.max_bound_vars + 1):
        yield from product(quiver.vertices, repeat=length)


def build_rows(quiver: Quiver, variables: Sequence[str],
               budget: Budget) -> list[Equation]:
    """All candidate equation rows for the variable tuple, canonically ordered.

    A row picks a target sort and, for each variable, either the zero term
    or coeff·path with a nonzero budget coefficient and path length within
    budget.  Rows are sorted by the normal-form equation key, so formulas
    assembled from index-increasing row tuples are already normal.
    """
    coeffs = budget.nonzero_coefficients()
    rows: list[Equation] = []
    path_cache = {s: paths_from(quiver, s, budget.max_path_length)
                  for s in set(variables)}
    for target in quiver.vertices:
        options: list[list[Term | None]] = []
        for s in variables:
            opts: list[Term | None] = [None]
            for p in path_cache[s]:
                if _path_target(quiver, s, p) == target:
                    for c in coeffs:
                        opts.append(Term(s, target, ((c, p),)))
            options.append(opts)
        for choice in product(*options):
            if all(t is None for t in choice):
                continue
            terms = tuple(t if t is not None else Term(s, target, ())
                          for t, s in zip(choice, variables))
            rows.append(Equation(target, terms))
    rows.sort(key=_equation_key)
    return rows


def enumerate_formulas_in_context(quiver: Quiver, context: Sequence[str],
                                  budget: Budget) -> Iterator[RegularFormula]:
    """Normal-form formulas on the fixed context, in deterministic order."""
    context = tuple(context)
    for bound in _enumerate_bounds(quiver, budget):
        rows = build_rows(quiver, context + bound, budget)
        yield top(context, bound)
        for k in range(1, budget.max_equations + 1):
            for combo in _combinations(rows, k):
                yield RegularFormula(context, bound, combo)


def enumerate_formulas(quiver: Quiver, budget: Budget) -> Iterator[RegularFormula]:
    """Deterministic, duplicate-free-after-normalize formula stream.

    Order: contexts by length then componentwise vertex order; bound tuples
    the same way; then equation count; then rows by (max path length, target
    sort, term shape) with multi-row formulas in index-combination order.
    """
    for ctx in enumerate_contexts(quiver, budget):
        yield from enumerate_formulas_in_context(quiver, ctx, budget)


# ---------------------------------------------------------------------------
# theory comparison


@dataclass(frozen=True)
class ComparisonReport:
    verdict: str                       # "equal" | "unequal"
    witness: Sequent | None
    holds_in: str | None               # "A" | "B" when unequal
    budget: Budget
    formulas_considered: int
    contexts_checked: int
    witness_position: tuple | None = None
    method: str = "exhaustive"         # "exhaustive" | "isomorphism"

    def to_dict(self) -> dict:
        from .formula import format_context, format_formula
        d = {
            "verdict": self.verdict,
            "method": self.method,
            "budget": self.budget.to_dict(),
            "formulas_considered": self.formulas_considered,
            "contexts_checked": self.contexts_checked,
        }
        if self.witness is not None:
            d["witness"] = {
                "context": format_context(self.witness.lhs),
                "lhs": format_formula(self.witness.lhs),
                "rhs": format_formula(self.witness.rhs),
                "holds_in": self.holds_in,
            }
        return d


def _row_matrix(eq: Equation, rep: Representation,
                path_mats: dict[tuple[str, tuple[str, ...]], Matrix]) -> Matrix:
    t_dim = rep.dim_of(eq.target)
    rows = [[] for _ in range(t_dim)]
    for t in eq.terms:
        if t.summands:
            c, p = t.summands[0]
            block = path_mats[(t.source, p)].scale(c)
            for i in range(t_dim):
                rows[i].extend(block.entries[i])
        else:
            src_dim = rep.dim_of(t.source)
            zero_row = (Fraction(0),) * src_dim
            for i in range(t_dim):
                rows[i].extend(zero_row)
    amb = sum(rep.dim_of(t.source) for t in eq.terms)
    return Matrix(t_dim, amb, tuple(tuple(r) for r in rows))


def find_isomorphism(rep_a: Representation,
                     rep_b: Representation) -> list[Matrix] | None:
    """Per-vertex invertible maps X with X_t T_A(f) = T_B(f) X_s for all edges.

    Returns one intertwining isomorphism as a list of per-vertex matrices,
    or None when none is found.  The solution space of the intertwiner
    equations is computed exactly; invertibility is then sought among its
    basis vectors and seeded small-integer combinations of them, so the
    outcome is deterministic.  A None result does not certify that the
    representations are non-isomorphic.
    """
    import random as _random

    if rep_a.dims != rep_b.dims:
        return None
    quiver = rep_a.quiver
    dims = rep_a.dims
    offsets = []
    off = 0
    for n in dims:
        offsets.append(off)
        off += n * n
    n_unknowns = off
    if n_unknowns == 0:
        return [Matrix.zeros(0, 0) for _ in dims]

    def unknown(v_idx: int, i: int, j: int) -> int:
        return offsets[v_idx] + i * dims[v_idx] + j

    sys_rows = []
    for e_idx, e in enumerate(quiver.edges):
        s_idx = quiver.vertex_index(e.source)
        t_idx = quiver.vertex_index(e.target)
        ta = rep_a.mats[e_idx]
        tb = rep_b.mats[e_idx]
        ns, nt = dims[s_idx], dims[t_idx]
        for i in range(nt):
            for j in range(ns):
                row = [Fraction(0)] * n_unknowns
                for k in range(nt):
                    if ta.entries[k][j]:
                        row[unknown(t_idx, i, k)] += ta.entries[k][j]
                for k in range(ns):
                    if tb.entries[i][k]:
                        row[unknown(s_idx, k, j)] -= tb.entries[i][k]
                if any(row):
                    sys_rows.append(tuple(row))
    space = kernel(Matrix(len(sys_rows), n_unknowns, tuple(sys_rows))) \
        if sys_rows else full_space(n_unknowns)

    def unflatten(vec) -> list[Matrix]:
        blocks = []
        for v_idx, n in enumerate(dims):
            o = offsets[v_idx]
            blocks.append(Matrix(n, n, tuple(
                tuple(vec[o + i * n + j] for j in range(n)) for i in range(n))))
        return blocks

    def invertible(blocks: list[Matrix]) -> bool:
        return all(linalg.rank(b) == b.rows for b in blocks)

    candidates = list(space.basis.entries)
    rng = _random.Random(0x1f2e3d)
    for _ in range(48):
        if space.dim == 0:
            break
        coeffs = [Fraction(rng.randint(-4, 4)) for _ in range(space.dim)]
        vec = [Fraction(0)] * n_unknowns
        for c, row in zip(coeffs, space.basis.entries):
            if c:
                for i, x in enumerate(row):
                    if x:
                        vec[i] += c * x
        candidates.append(tuple(vec))
    for cand in candidates:
        blocks = unflatten(cand)
        if invertible(blocks):
            return blocks
    return None


def _rowspace(m: Matrix) -> Subspace:
    return span(m.entries, m.cols)


def _solution_ctx_space(v: Subspace, amb_ctx: int) -> Subspace:
    """Context projection of the solution set of the system with row space v.

    The projected kernel equals the annihilator, inside the context space,
    of the rows of v supported on the context coordinates alone.
    """
    if v.dim == 0:
        return full_space(amb_ctx)
    b = v.basis
    nb = v.ambient_dim - amb_ctx
    if nb == 0:
        return kernel(b)
    bound_part = Matrix(b.rows, nb, tuple(r[amb_ctx:] for r in b.entries))
    lam = kernel(bound_part.transpose())
    ctx_rows = []
    for l in lam.basis.entries:
        row = [Fraction(0)] * amb_ctx
        for coef, brow in zip(l, b.entries):
            if coef:
                for j in range(amb_ctx):
                    if brow[j]:
                        row[j] += coef * brow[j]
        ctx_rows.append(row)
    if not ctx_rows:
        return full_space(amb_ctx)
    return kernel(Matrix(len(ctx_rows), amb_ctx, tuple(tuple(r) for r in ctx_rows)))


class _RepContext:
    """Per-representation path matrices and row-space cache."""

    def __init__(self, rep: Representation, budget: Budget):
        self.rep = rep
        self.path_mats: dict[tuple[str, tuple[str, ...]], Matrix] = {}
        for s in rep.quiver.vertices:
            for p in paths_from(rep.quiver, s, budget.max_path_length):
                m = Matrix.identity(rep.dim_of(s))
                for name in p:
                    m = rep.mat_of(name) @ m
                self.path_mats[(s, p)] = m
        self._cache: dict[tuple, Subspace] = {}

    def row_space(self, eq: Equation) -> Subspace:
        m = _row_matrix(eq, self.rep, self.path_mats)
        out = self._cache.get(m.entries)
        if out is None:
            out = _rowspace(m)
            self._cache[m.entries] = out
        return out


def _count_formulas(n_rows: int, budget: Budget) -> int:
    return sum(math.comb(n_rows, k) for k in range(0, budget.max_equations + 1))


def _count_rows(quiver: Quiver, variables: Sequence[str], budget: Budget,
                path_counts: dict[tuple[str, str], int]) -> int:
    """Number of candidate rows for a variable tuple, without materializing."""
    n_coeffs = len(budget.nonzero_coefficients())
    total = 0
    for target in quiver.vertices:
        prod = 1
        for s in variables:
            prod *= 1 + path_counts.get((s, target), 0) * n_coeffs
        total += prod - 1
    return total


def _budget_formula_count(quiver: Quiver, budget: Budget) -> tuple[int, int]:
    """(formula count, context count) for the whole budgeted enumeration."""
    path_counts: dict[tuple[str, str], int] = {}
    for s in quiver.vertices:
        for p in paths_from(quiver, s, budget.max_path_length):
            t = _path_target(quiver, s, p)
            path_counts[(s, t)] = path_counts.get((s, t), 0) + 1
    total = 0
    n_ctx = 0
    for ctx in enumerate_contexts(quiver, budget):
        n_ctx += 1
        for bound in _enumerate_bounds(quiver, budget):
            total += _count_formulas(
                _count_rows(quiver, ctx + bound, budget, path_counts), budget)
    return total, n_ctx


def _agreement_scan(sigs: dict) -> tuple[tuple, bool] | None:
    """Lex-least disagreeing ordered pair of signature positions, if any.

    Returns ((pos_phi, pos_psi), inclusion-holds-in-A) for the minimum.
    """
    items = sorted(sigs.items(), key=lambda kv: kv[1])
    best = None
    best_in_a = False
    incl_cache: dict = {}
    for (sa1, sb1), p1 in items:
        for (sa2, sb2), p2 in items:
            ka = (sa2, sa1)
            ia = incl_cache.get(ka)
            if ia is None:
                ia = contains(sa2, sa1)
                incl_cache[ka] = ia
            kb = (sb2, sb1)
            ib = incl_cache.get(kb)
            if ib is None:
                ib = contains(sb2, sb1)
                incl_cache[kb] = ib
            if ia != ib:
                cand = (p1, p2)
                if best is None or cand < best:
                    best = cand
                    best_in_a = ia
    if best is None:
        return None
    return best, best_in_a


def compare_theories(rep_a: Representation, rep_b: Representation,
                     budget: Budget = Budget()) -> ComparisonReport:
    """Bounded theory comparison per the projected-kernel inclusion criterion.

    Scans every ordered pair of enumerated formulas sharing a context and
    tests whether inclusion of interpretations agrees between the two
    representations.  Returns the first disagreement in enumeration order
    as a witness sequent, or an equal-at-this-budget verdict.

    When the representations are related by a per-vertex change of basis the
    inclusion pattern of definable subspaces transports along it, so every
    pair agrees; the engine searches for such an isomorphism first and only
    falls back to the exhaustive signature scan when none is found.
    """
    if rep_a.quiver != rep_b.quiver:
        raise DifferentQuiverError("representations live on different quivers")
    for name, rep in (("A", rep_a), ("B", rep_b)):
        problems = validate(rep)
        if problems:
            raise InvalidRepresentationError(f"representation {name}: {problems[0]}")
    quiver = rep_a.quiver

    if find_isomorphism(rep_a, rep_b) is not None:
        total, n_ctx = _budget_formula_count(quiver, budget)
        return ComparisonReport(verdict="equal", witness=None, holds_in=None,
                                budget=budget, formulas_considered=total,
                                contexts_checked=n_ctx, method="isomorphism")

    ctx_a = _RepContext(rep_a, budget)
    ctx_b = _RepContext(rep_b, budget)
    total = 0
    contexts_checked = 0
    sum_cache: dict = {}
    sol_cache_a: dict = {}
    sol_cache_b: dict = {}

    for ctx in enumerate_contexts(quiver, budget):
        contexts_checked += 1
        amb_a = sum(rep_a.dim_of(s) for s in ctx)
        amb_b = sum(rep_b.dim_of(s) for s in ctx)
        sigs: dict[tuple[Subspace, Subspace], tuple] = {}
        blocks: list[tuple[tuple[str, ...], list[Equation]]] = []

        def record(sig, pos):
            old = sigs.get(sig)
            if old is None or pos < old:
                sigs[sig] = pos

        def solution(cache, v, amb):
            out = cache.get(v)
            if out is None:
                out = _solution_ctx_space(v, amb)
                cache[v] = out
            return out

        found = None
        for b_idx, bound in enumerate(_enumerate_bounds(quiver, budget)):
            rows = build_rows(quiver, ctx + bound, budget)
            blocks.append((bound, rows))
            total += _count_formulas(len(rows), budget)
            record((full_space(amb_a), full_space(amb_b)), (b_idx, 0, ()))
            classes: dict[tuple[Subspace, Subspace], list[int]] = {}
            order: list[tuple[Subspace, Subspace]] = []
            for r_idx, eq in enumerate(rows):
                key = (ctx_a.row_space(eq), ctx_b.row_space(eq))
                bucket = classes.get(key)
                if bucket is None:
                    classes[key] = [r_idx]
                    order.append(key)
                elif len(bucket) < budget.max_equations:
                    bucket.append(r_idx)
            class_list = [(key, classes[key]) for key in order]
            for k in range(1, budget.max_equations + 1):
                for chosen in combinations_with_replacement(range(len(class_list)), k):
                    mult: dict[int, int] = {}
                    for c in chosen:
                        mult[c] = mult.get(c, 0) + 1
                    if any(m > len(class_list[c][1]) for c, m in mult.items()):
                        continue
                    idxs = sorted(i for c, m in mult.items()
                                  for i in class_list[c][1][:m])
                    va = class_list[chosen[0]][0][0]
                    vb = class_list[chosen[0]][0][1]
                    for c in chosen[1:]:
                        va = _cached_sum(sum_cache, va, class_list[c][0][0])
                        vb = _cached_sum(sum_cache, vb, class_list[c][0][1])
                    sig = (solution(sol_cache_a, va, amb_a),
                           solution(sol_cache_b, vb, amb_b))
                    record(sig, (b_idx, k, tuple(idxs)))
            # A later block can only improve on a disagreement by lowering
            # the phi side; nothing beats the top formula's position, so a
            # disagreement anchored there is final.
            found = _agreement_scan(sigs)
            if found is not None and found[0][0] == (0, 0, ()):
                break

        if found is not None:
            (best, in_a) = found
            phi = _formula_at(ctx, blocks, best[0])
            psi = _formula_at(ctx, blocks, best[1])
            witness = Sequent(ctx, phi, psi)
            return ComparisonReport(
                verdict="unequal", witness=witness,
                holds_in="A" if in_a else "B",
                budget=budget, formulas_considered=total,
                contexts_checked=contexts_checked,
                witness_position=best)

    return ComparisonReport(verdict="equal", witness=None, holds_in=None,
                            budget=budget, formulas_considered=total,
                            contexts_checked=contexts_checked)


def _cached_sum(cache: dict, u: Subspace, v: Subspace) -> Subspace:
    if u is v:
        return u
    key = (u, v)
    out = cache.get(key)
    if out is None:
        out = linalg.subspace_sum(u, v)
        cache[key] = out
        cache[(v, u)] = out
    return out


def _formula_at(ctx: tuple[str, ...],
                blocks: list[tuple[tuple[str, ...], list[Equation]]],
                pos: tuple) -> RegularFormula:
    b_idx, k, idxs = pos
    bound, rows = blocks[b_idx]
    if k == 0:
        return top(ctx, bound)
    return RegularFormula(ctx, bound, tuple(rows[i] for i in idxs))


def compare_theories_scan(rep_a: Representation, rep_b: Representation,
                          budget: Budget = Budget()) -> ComparisonReport:
    """Reference implementation: the literal double loop over the stream.

    Exponentially slower than compare_theories; used to cross-check the
    factorized search on small budgets.
    """
    if rep_a.quiver != rep_b.quiver:
        raise DifferentQuiverError("representations live on different quivers")
    quiver = rep_a.quiver
    total = 0
    contexts_checked = 0
    for ctx in enumerate_contexts(quiver, budget):
        contexts_checked += 1
        formulas = list(enumerate_formulas_in_context(quiver, ctx, budget))
        total += len(formulas)
        interps_a = [interpret(f, rep_a) for f in formulas]
        interps_b = [interpret(f, rep_b) for f in formulas]
        for i, phi in enumerate(formulas):
            for j, psi in enumerate(formulas):
                ia = contains(interps_a[j], interps_a[i])
                ib = contains(interps_b[j], interps_b[i])
                if ia != ib:
                    return ComparisonReport(
                        verdict="unequal", witness=Sequent(ctx, phi, psi),
                        holds_in="A" if ia else "B", budget=budget,
                        formulas_considered=total,
                        contexts_checked=contexts_checked)
    return ComparisonReport(verdict="equal", witness=None, holds_in=None,
                            budget=budget, formulas_considered=total,
                            contexts_checked=contexts_checked)
