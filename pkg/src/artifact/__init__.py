"""Exact analysis of self-similar measures on [0, 1] with overlapping maps."""

from .field import FieldElement, NumberField, Q
from .ifs import BudgetExceeded, IFSError, WeightedIFS
from .net import NetInterval, NetTree
from .finite_type import TransitionGraph, detect_finite_type
from .oracle import MeasureBounds, MoranMeasure

__all__ = [
    "BudgetExceeded",
    "FieldElement",
    "IFSError",
    "MeasureBounds",
    "MoranMeasure",
    "NetInterval",
    "NetTree",
    "NumberField",
    "Q",
    "TransitionGraph",
    "WeightedIFS",
    "detect_finite_type",
]
