"""Parametrized Duffin-Kemmer-Petiau wave equations: algebra, modes, evolution and exchange symmetry."""
from .algebra import Kind, Representation, build_representation
from .errors import DKPError
from .evolution import (GridSpec, GridWavefunction, causality_support_check, evolve_grid_free,
                        evolve_grid_potential, evolve_modes, lightcone_kernel, propagator_matrix)
from .multiparticle import TwoParticleState, evolve_two_particle, symmetrize, tensor_state
from .rotation import eigenbasis, exchange_phase, jabs_construct, rotation_operator
from .states import Box, Branch, ModeWavefunction, PlaneWaveMode, amplitudes, projections
from .symmetries import SymmetryKind, apply_symmetry

__version__ = "0.1.0"

__all__ = [
    "Kind", "Representation", "build_representation", "DKPError",
    "GridSpec", "GridWavefunction", "causality_support_check", "evolve_grid_free",
    "evolve_grid_potential", "evolve_modes", "lightcone_kernel", "propagator_matrix",
    "TwoParticleState", "evolve_two_particle", "symmetrize", "tensor_state",
    "eigenbasis", "exchange_phase", "jabs_construct", "rotation_operator",
    "Box", "Branch", "ModeWavefunction", "PlaneWaveMode", "amplitudes", "projections",
    "SymmetryKind", "apply_symmetry",
]
