"""Exact 1-point trace functions for Heisenberg and lattice vertex operator algebras."""
from .closedform import closed_form_trace, zhu_recurse_twisted, zhu_recurse_untwisted
from .fockoracle import oracle_trace
from .lattice import EvenLattice, enumerate_vectors, lattice_level, theta, theta_vm
from .modforms import character, eisenstein_E, eisenstein_F, eisenstein_hat, eta, eta_quotient
from .qseries import FracQSeries, format_series, qs_add, qs_inv, qs_mul, qs_pow, qs_scale
from .words import BracketWord, HeisenbergContext, Tail

__all__ = [
    "BracketWord",
    "EvenLattice",
    "FracQSeries",
    "HeisenbergContext",
    "Tail",
    "character",
    "closed_form_trace",
    "eisenstein_E",
    "eisenstein_F",
    "eisenstein_hat",
    "enumerate_vectors",
    "eta",
    "eta_quotient",
    "format_series",
    "lattice_level",
    "oracle_trace",
    "qs_add",
    "qs_inv",
    "qs_mul",
    "qs_pow",
    "qs_scale",
    "theta",
    "theta_vm",
    "zhu_recurse_twisted",
    "zhu_recurse_untwisted",
]
__version__ = "0.1.0"
