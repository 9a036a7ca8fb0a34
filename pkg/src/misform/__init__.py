"""Myopic-robot MIS formation on oriented grids."""

from .grid import Cell, Color, GridDims, View, extract_view, is_maximum_independent, reference_mis
from .model import Configuration, Robot, TraceEvent, canonical_digest, is_final
from .rules import Action, Guard, decide
from .sim import FullSync, RandomFair, RoundRobin, Scripted, SingletonSweep, run, step

__all__ = [
    "Action", "Cell", "Color", "Configuration", "FullSync", "GridDims", "Guard", "RandomFair",
    "Robot", "RoundRobin", "Scripted", "SingletonSweep", "TraceEvent", "View", "canonical_digest",
    "decide", "extract_view", "is_final", "is_maximum_independent", "reference_mis", "run", "step",
]
