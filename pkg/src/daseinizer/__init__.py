"""Daseinisation of projection operators over finite posets of abelian contexts,
with the Heyting algebra of clopen sub-objects and sieve-valued truth values."""

from .borel import BorelSet
from .contexts import (
    Context,
    ContextPoset,
    basis_context,
    coarsenings,
    context_from_commuting,
    diagonal_context,
    generate_poset,
)
from .daseinisation import (
    GlobalElement,
    HyperElement,
    daseinise_global,
    inner_at,
    inner_support,
    outer_at,
    outer_support,
)
from .errors import DaseinizerError
from .language import parse, represent, to_text
from .models import Model, load_model
from .operators import DensityMatrix, Projector, SelfAdjointOperator, StateVector, spectral_projector
from .presheaf import GlobalOmegaElement, Sieve, global_sections, spectral_presheaf
from .subobjects import ClopenSubobject, characteristic_arrow, daseinise_subobject
from .tolerance import get_eps, set_eps, tolerance
from .truth import TruthObject, membership_valuation, truth_object, truth_value_proposition

__version__ = "0.1.0"
