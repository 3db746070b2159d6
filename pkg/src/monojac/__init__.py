"""Poisson brackets for Vlasov-Maxwell systems with magnetic monopoles.

Jacobi-identity checks on exact polynomial observables and on discretised
phase-space fields, Hamiltonian dynamics generated by those brackets, and
the electric-magnetic duality rotation.
"""

__version__ = "0.1.0"

from .brackets.kinds import BracketKind, BracketError  # noqa: E402
from .state import PhaseSpaceGrid, SpeciesParams, SystemState  # noqa: E402

__all__ = ["__version__", "BracketKind", "BracketError", "PhaseSpaceGrid", "SpeciesParams",
           "SystemState"]
