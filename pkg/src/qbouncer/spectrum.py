"""Bouncer energy levels and their first-order dissipative correction."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .airy import airy_zero
from .hamiltonian import perturbation_coefficient
from .model import PhysicalParams, derive_scales

Z2_RATIO = 8.0 / 15.0


@dataclass(frozen=True)
class SpectrumLine:
    n: int
    z_n: float
    e0: float
    de1: float
    e: float
    validity: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Figure1Row:
    n: int
    z_n: float
    e0: float
    abs_de1: float
    abs_de1_mgl: float  # |de1| in units of m g ell_g
    e: float
    validity: float

    def to_dict(self) -> dict:
        return asdict(self)


def unperturbed_energy(n: int, params: PhysicalParams) -> float:
    return derive_scales(params).e_scale * airy_zero(n)


def z2_expectation(n: int) -> float:
    """<z**2> in the n-th unperturbed state, (8/15) z_n**2."""
    return Z2_RATIO * airy_zero(n) ** 2


def first_order_correction(n: int, params: PhysicalParams) -> float:
    """Expectation of the quadratic perturbation c x**2 in the n-th unperturbed state."""
    ell_g = derive_scales(params).ell_g
    return perturbation_coefficient(params) * ell_g**2 * z2_expectation(n)


def energy_level(n: int, params: PhysicalParams) -> SpectrumLine:
    z_n = airy_zero(n)
    e0 = unperturbed_energy(n, params)
    de1 = first_order_correction(n, params)
    return SpectrumLine(n=int(n), z_n=z_n, e0=e0, de1=de1, e=e0 + de1, validity=abs(de1) / e0)


def spectrum(params: PhysicalParams, n_max: int) -> list[SpectrumLine]:
    return [energy_level(n, params) for n in range(1, n_max + 1)]


def figure1_data(params: PhysicalParams, n_max: int) -> list[Figure1Row]:
    """Energy loss |de1| per level, in joules and in units of m g ell_g."""
    if not (1 <= n_max <= 100):
        raise ValueError("n_max must lie in [1, 100]")
    e_scale = derive_scales(params).e_scale
    return [
        Figure1Row(
            n=line.n, z_n=line.z_n, e0=line.e0,
            abs_de1=abs(line.de1), abs_de1_mgl=abs(line.de1) / e_scale,
            e=line.e, validity=line.validity,
        )
        for line in spectrum(params, n_max)
    ]
