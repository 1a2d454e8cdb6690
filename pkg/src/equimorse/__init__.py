"""equimorse: equivariant Morse theory at desk scale.

A library and CLI for finite group actions on explicit manifolds and
complexes: exact equivariant jet interpolation, the stable-perturbation
surgery for critical points, Bredon homology of G-CW complexes, Morse
filtrations and their spectral sequences, equivariant Morse complexes from
gradient flow, and Smith-inequality verification.
"""

from .groups import (
    FiniteGroup,
    OrbitCategory,
    OrbitMorphism,
    Subgroup,
    compose,
    enumerate_subgroups,
    orbit_homs,
    weyl_group,
)
from .polynomials import (
    Jet,
    JetNotFixed,
    LinearAction,
    Polynomial,
    bump_poly,
    equivariant_average,
    equivariant_jet_lift,
    jet_interpolate,
    taylor_jet,
)
from .complexes import ChainComplex, HomologySummary, homology, smith_normal_form
from .coefficients import CoefficientSystem, FreeModule, build_system, induced_matrix
from .gcw import GCWComplex, bredon_chain_complex, subquotient_complex
from .spectral import FilteredComplex, einfty_check, spectral_pages
from .smith import SmithReport, smith_report

__version__ = "0.1.0"
