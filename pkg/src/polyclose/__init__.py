"""Polynomial-delay enumeration of boolean relation closures under clones of
coordinatewise operations, with membership deciders, extremal-element
enumeration, per-coordinate raise/clear operators, and the tractable
larger-domain cases."""

from .clones import (
    CloneId,
    OperationTable,
    ReductionTrace,
    TraceStep,
    classify,
    clone_base,
    dualize,
    reduce_instance,
    registry_clones,
    threshold_op,
)
from .core import BitVector, IndexSet, Relation, complement_rows, equal_column_classes, project
from .enumeration import enumerate_closure, flashlight
from .extremal import Graph, Hypergraph, graph_mis_enum, hypergraph_mis_enum
from .membership import extension, member
from .oracle import BudgetExhausted, SaturationBudget, saturate
from .streams import OpCounter, SolutionStream
from .udclosure import UDSpec, enum_ud, member_ud

__all__ = [
    "BitVector",
    "BudgetExhausted",
    "CloneId",
    "Graph",
    "Hypergraph",
    "IndexSet",
    "OpCounter",
    "OperationTable",
    "ReductionTrace",
    "Relation",
    "SaturationBudget",
    "SolutionStream",
    "TraceStep",
    "UDSpec",
    "classify",
    "clone_base",
    "complement_rows",
    "dualize",
    "enum_ud",
    "enumerate_closure",
    "equal_column_classes",
    "extension",
    "flashlight",
    "graph_mis_enum",
    "hypergraph_mis_enum",
    "member",
    "member_ud",
    "project",
    "reduce_instance",
    "registry_clones",
    "saturate",
    "threshold_op",
]

__version__ = "0.1.0"
