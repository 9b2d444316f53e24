"""Quantum bouncer with quadratic dissipation."""

from .model import NEUTRON, GravScales, ParameterError, PhysicalParams, derive_scales, preset
from .spectrum import SpectrumLine, energy_level, figure1_data, first_order_correction

__all__ = [
    "NEUTRON",
    "GravScales",
    "ParameterError",
    "PhysicalParams",
    "SpectrumLine",
    "derive_scales",
    "energy_level",
    "figure1_data",
    "first_order_correction",
    "preset",
]

__version__ = "0.1.0"
