"""tplkit: combinatorics of templates for nonsingular Smale flows.

Edge-shift surgeries and their invariants, templates in branch-line normal
form with slide/split moves, boundary data of thickened templates, and the
finite bookkeeping of filtrating-neighbourhood attachment patterns.
"""
from __future__ import annotations

from .errors import (
    FormatError,
    InfeasibleLedger,
    PatternError,
    SurgeryError,
    TemplateError,
    TplkitError,
)
from .shift import AdjacencyMatrix, EdgeGraph, PeriodicWord, VertexGraph
from .template import BranchLine, Strip, Template
from .thicken import ThickenedBoundary, thicken

__version__ = "0.1.0"

__all__ = [
    "AdjacencyMatrix",
    "BranchLine",
    "EdgeGraph",
    "FormatError",
    "InfeasibleLedger",
    "PatternError",
    "PeriodicWord",
    "Strip",
    "SurgeryError",
    "Template",
    "TemplateError",
    "ThickenedBoundary",
    "TplkitError",
    "VertexGraph",
    "thicken",
]
