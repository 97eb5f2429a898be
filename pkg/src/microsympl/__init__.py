"""Exact rational calculus for symplectic micromorphisms.

Micromorphisms between cotangent microbundles are stored as generating
functions of mixed type, polynomial along the target core and truncated at a
fiber order; composition, tensor, braiding, germ extraction, and the
lagrangian operads are all computed exactly over the rationals.
"""

from .errors import (CheckResult, ConvergenceError, FiltrationError,
                     InternalInvariantError, MicrosymplError, NormalFormError,
                     ParseError, ShapeError, UnsupportedCoreError, ValidityError)
from .jetalg import FiberGradedPoly, solve_triangular_fixed_point
from .linsympl import (AffineSubspace, LagrangianSubspace, LinCanonicalRelation,
                       Splitting, SymplecticSpace, check_linear_micromorphism,
                       compose_linear, graph_relation, identity_relation,
                       image_of_point, is_lagrangian, transverse_to_splitting,
                       zero_section_relation)
from .micro import (CoreMap, GermJet, Micromorphism, MicroObject, compose,
                    compose_germs, cotangent_lift, extract_germ, graph_of_germ,
                    identity, identity_germ, invert_germ, is_micromorphism,
                    linearized_relation, point_morphism, stationary_middle,
                    symmetry, tangent_relation_at, tensor, unit_object, unit_to)
from .operad import (OperadElement, OperadReport, check_operad_axioms,
                     diagonal_lift, is_in_L, operad_compose, random_L_element,
                     unit_element)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
