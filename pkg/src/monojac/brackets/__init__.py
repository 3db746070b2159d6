"""Bracket evaluation and Jacobi checks, exact and on grids."""

from .kinds import BracketError, BracketKind
from .report import JacobiReport

__all__ = ["BracketError", "BracketKind", "JacobiReport"]
