"""Invariant and reducing submodules of adjointable operators on Hilbert C*-modules.

The algebra is a finite direct sum of full matrix algebras and the module is
the standard free module ``A^k``; every object is stored as one complex
matrix per algebra block.
"""

from .algebra import (AlgebraElement, AlgebraShape, DEFAULT_TOL, ToleranceConfig, identity,
                      is_positive, mul, norm, star, zero)
from .equations import (douglas_solution, kernel_tower_invariance, range_inclusion_residual,
                        sts_solution, verify_sts)
from .errors import (CornerSupportViolation, CStarInvError, NotInvariant, NotSolvable, NotSpectral,
                     NotUnitary, ParseError, PreconditionFailed, ScalarOperator, ShapeMismatch,
                     UnknownName, ValidationError, ZeroOperator)
from .io import ProblemFile, emit_report, load_problem, parse_problem, parse_report
from .module import ModuleVector, inner_product, rank_one, right_action, vector_norm
from .operators import (Operator, adjoint, apply, canonical_projections, compose, identity_operator,
                        is_partial_isometry, kernel_projection, moore_penrose, operator_norm,
                        verify_adjoint_contract, zero_operator)
from .report import Check, Report
from .spectral import (commutant_basis, eigen_submodule, find_hyperinvariant, mp_reducing_verify,
                       spectrum, transport_by_unitary, zero_exclusion_certificate, zero_witness_search)
from .submodules import (Submodule, assemble_from_blocks, block_decompose, complement, is_invariant,
                         is_reducing, submodule_from_generators)

__version__ = "0.1.0"
