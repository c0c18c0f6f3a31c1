"""Coefficients of automorphic L-functions and their sign changes."""

from .arith import CoefficientSeries, SieveTables, build_sieve, dirichlet_convolve, divisor_function
from .euler import SatakeData, assemble_series, expand_local_factor, synth_satake
from .gl2 import EigenformSeries, delta_q_expansion, satake_angles
from .oscillate import ExponentProfile, preset_profiles, scan_windows, sign_changes_window

__all__ = [
    "CoefficientSeries",
    "EigenformSeries",
    "ExponentProfile",
    "SatakeData",
    "SieveTables",
    "assemble_series",
    "build_sieve",
    "delta_q_expansion",
    "dirichlet_convolve",
    "divisor_function",
    "expand_local_factor",
    "preset_profiles",
    "satake_angles",
    "scan_windows",
    "sign_changes_window",
    "synth_satake",
]
