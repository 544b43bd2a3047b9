"""Exact-arithmetic engine for definable subspaces of quiver representations.

Core layers: exact rational linear algebra (linalg), quivers and their
representations (quiver), terms and regular formulas (formula), semantics
and bounded theory comparison (interp), the definable-quotient category
(category), and endomorphism algebras (endo).  The ``engine`` CLI fronts
all of it; see the session module for the input file format.
"""

from .linalg import (Matrix, Rational, Subspace, contains, full_space, image,
                     induced_map, intersect, kernel, map_subspace, preimage,
                     project, quotient_dim, rref, span, subspace_sum,
                     zero_subspace)
from .quiver import (Edge, Quiver, Representation, Subdiagram, restrict,
                     validate)
from .formula import (Equation, RegularFormula, Sequent, Term, format_formula,
                      normalize, parse_formula, term_matrix)
from .interp import (Budget, ComparisonReport, Interpretation, check_sequent,
                     compare_theories, enumerate_formulas, interpret)
from .category import (DefinableMorphism, DefinableObject, HomSpace,
                       RelationArrow, biproduct, check_relation_arrow,
                       cokernel_obj, compose, from_induced_map, hom_space,
                       identity_morphism, kernel_obj, make_morphism,
                       make_object, relation_compose, relation_opposite,
                       to_induced_map)
from .endo import (EndAlgebra, EndElement, act_on_object, compute_end,
                   end_identity, end_multiply)
from .session import Session, load_session

__all__ = [name for name in dir() if not name.startswith("_")]
