"""Eichler orders, their ideal lattices and averaged representation numbers."""

from .binary import BinaryFormClass, class_list, unit_count
from .identities import Configuration, build_configuration, decompositions, theorem_reports
from .lattice import GramLattice, count_binary, count_unary
from .orders import ClassSet, ConstructionError, eichler_order, ideal_classes, maximal_order
from .quaternion import AlgebraParams, RationalQuaternion, find_algebra, hilbert_symbol

__version__ = "0.1.0"

__all__ = [
    "AlgebraParams",
    "RationalQuaternion",
    "find_algebra",
    "hilbert_symbol",
    "ClassSet",
    "ConstructionError",
    "maximal_order",
    "eichler_order",
    "ideal_classes",
    "GramLattice",
    "count_binary",
    "count_unary",
    "BinaryFormClass",
    "class_list",
    "unit_count",
    "Configuration",
    "build_configuration",
    "decompositions",
    "theorem_reports",
]
