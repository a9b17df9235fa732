"""Exact arithmetic and experiments for Hecke operators acting on
Sym^k-valued functions on the Bruhat-Tits tree of GL2 over a p-adic field."""

from .local_arith import INF, LocalElem, RingSpec, make_ring
from .hecke_tree import HeckeContext, TreeFunction, VertexKey, hecke_T, hecke_T_minus_a
from .separatedness import ExperimentSpec, classify, epsilon_scan, newton_smooth_params

__all__ = [
    "INF",
    "LocalElem",
    "RingSpec",
    "make_ring",
    "HeckeContext",
    "TreeFunction",
    "VertexKey",
    "hecke_T",
    "hecke_T_minus_a",
    "ExperimentSpec",
    "classify",
    "epsilon_scan",
    "newton_smooth_params",
]
__version__ = "0.1.0"
