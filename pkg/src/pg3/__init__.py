"""Finite-geometry engine and recognizer for secant-line families of
hyperbolic quadrics in PG(3,q), q odd."""

from .charax import CharaxReport, Violation, reconstruct
from .family import LineFamily, read_family, write_family
from .field import FieldSpec, make_field
from .quadric import Quadric, make_quadric, secant_family, standard_hyperbolic
from .space import Geometry, build_geometry

__all__ = [
    "CharaxReport", "Violation", "reconstruct", "LineFamily", "read_family", "write_family",
    "FieldSpec", "make_field", "Quadric", "make_quadric", "secant_family", "standard_hyperbolic",
    "Geometry", "build_geometry",
]
