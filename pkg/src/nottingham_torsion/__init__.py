"""Nottingham group over F_p and the classification of its order-p^2 torsion of type <2,m>."""

from .characters import (
    BreakSequence,
    Character,
    Indicator,
    StandardExpansion,
    act,
    break_sequence,
    enumerate_characters,
    evaluate,
    indicator,
    indicator_1m,
    standard_expansion,
    validate_type,
)
from .enumeration import BudgetExceeded
from .equivalence import (
    ClassReport,
    d_weak_closed_form,
    strict_classes_1m,
    strict_classes_bruteforce,
    strict_edge,
    strict_edge_strong,
    strict_via_coset,
    weak_equiv_indicator,
    weak_orbits_bruteforce,
)
from .fpseries import FpSeries, compose, mul, mul_inverse, pow_int
from .nottingham import (
    NottinghamElement,
    PhiImage,
    comp_inverse,
    compose_elems,
    coset_index,
    depth,
    enumerate_quotient,
    in_coset_set,
    oplus,
    order_in_quotient,
    phi,
)
from .units import UnitExponents, decompose, recompose

__version__ = "0.1.0"


__all__ = [
    "act",
    "break_sequence",
    "BreakSequence",
    "BudgetExceeded",
    "Character",
    "ClassReport",
    "comp_inverse",
    "compose",
    "compose_elems",
    "coset_index",
    "d_weak_closed_form",
    "decompose",
    "depth",
    "enumerate_characters",
    "enumerate_quotient",
    "evaluate",
    "FpSeries",
    "in_coset_set",
    "Indicator",
    "indicator",
    "indicator_1m",
    "mul",
    "mul_inverse",
    "NottinghamElement",
    "oplus",
    "order_in_quotient",
    "phi",
    "PhiImage",
    "pow_int",
    "recompose",
    "standard_expansion",
    "StandardExpansion",
    "strict_classes_1m",
    "strict_classes_bruteforce",
    "strict_edge",
    "strict_edge_strong",
    "strict_via_coset",
    "UnitExponents",
    "validate_type",
    "weak_equiv_indicator",
    "weak_orbits_bruteforce",
]
