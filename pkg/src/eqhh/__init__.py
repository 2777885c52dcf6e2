"""Exact twisted Hochschild, Koszul and relative-form computations for finite and circle actions."""
from .config import GUARDS, GuardError, Guards, set_guards
from .forms import ComplexPairs, PolyForm, PolyVectorField, Real, format_form, parse_form
from .groups import CircleAction, FiniteGroup, close_generators, cyclic_scalar_group
from .koszul import build_twisted_koszul, circle_stalk_homology, homology
from .scalars import parse_scalar, zeta

__version__ = "0.1.0"

__all__ = [
    "GUARDS", "GuardError", "Guards", "set_guards",
    "ComplexPairs", "PolyForm", "PolyVectorField", "Real", "format_form", "parse_form",
    "CircleAction", "FiniteGroup", "close_generators", "cyclic_scalar_group",
    "build_twisted_koszul", "circle_stalk_homology", "homology",
    "parse_scalar", "zeta",
]
