"""Physical parameters and the derived gravitational scales."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace


class ParameterError(ValueError):
    """Raised when a PhysicalParams instance violates its invariants."""


@dataclass(frozen=True)
class PhysicalParams:
    """Inputs in SI units: mass, gravity, drag coefficient, drop height, hbar."""

    m: float
    g: float
    gamma: float
    d: float
    hbar: float

    def validate(self) -> "PhysicalParams":
        for name in ("m", "g", "d", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ParameterError(f"gamma must be finite and >= 0, got {self.gamma!r}")
        return self

    def with_drop_height(self, d: float) -> "PhysicalParams":
        return replace(self, d=d)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GravScales:
    ell_g: float
    e_scale: float
    eps: float
    delta: float

    @property
    def drop_exponent(self) -> float:
        """2*gamma*d/m, the exponent in every exp(-2 gamma d / m) factor."""
        return self.eps * self.delta


# Neutron parameter set; ell_g is always recomputed from these.
NEUTRON = PhysicalParams(m=1.674e-27, g=9.81, gamma=1e-23, d=3e-3, hbar=1.0546e-34)

# Frequently quoted value of ell_g for this set. It disagrees with the
# cube-root formula (5.87 um) and is kept as metadata only.
QUOTED_ELL_G = 5.57e-6

PRESETS = {"neutron": NEUTRON}


def preset(name: str) -> PhysicalParams:
    try:
        return PRESETS[name]
    except KeyError:
        raise ParameterError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def gravitational_length(params: PhysicalParams) -> float:
    return (params.hbar**2 / (2.0 * params.m**2 * params.g)) ** (1.0 / 3.0)


def derive_scales(params: PhysicalParams) -> GravScales:
    """Gravitational length, energy unit m*g*ell_g, and the two dimensionless numbers.

    ``eps = 2*gamma*ell_g/m`` measures drag over one gravitational length and
    ``delta = d/ell_g`` is the drop height in the same unit.
    """
    params.validate()
    ell_g = gravitational_length(params)
    return GravScales(
        ell_g=ell_g,
        e_scale=params.m * params.g * ell_g,
        eps=2.0 * params.gamma * ell_g / params.m,
        delta=params.d / ell_g,
    )
