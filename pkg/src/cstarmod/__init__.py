"""Hilbert C*-modules over finite-dimensional C*-algebras.

Operators on free modules ``A^k`` over ``A = M_n1 + ... + M_nB``, their
Moore-Penrose and generalized inverses, reduced minimum moduli, Dixmier
angles, and executable checks of closed-range results.
"""

from .angles import (
    AngleResult,
    DefectResult,
    angle_identity,
    dixmier_cosine,
    inequality_defect,
    m_submodule,
    r_projection,
)
from .cstar import AlgebraElement, BlockAlgebra, is_positive, spectrum
from .errors import *  # noqa: F401,F403
from .hmod import (
    DirectSum,
    ModuleSpace,
    ModuleVector,
    Submodule,
    complement,
    direct_sum,
    inner_product,
    intersect,
    submodule_sum,
)
from .instances import generate_random_projection, random_operator, trial_rng
from .modop import (
    ModuleOperator,
    gamma,
    inner_to_generalized,
    is_generalized_inverse,
    kernel,
    mp_inverse,
    range_,
    range_gap,
)
from .verifier import VerdictReport

__version__ = "0.1.0"
