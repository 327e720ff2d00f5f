"""Published photonic crystal set-ups with their reference eigenvalues."""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import TYPE_CHECKING, Final

from .bands import NAMED_POINTS
from .dielectric import (
    Constant,
    DielectricModel,
    DrudeLossless,
    DrudeLossy,
    lorentz_from_frequencies,
)
from .mesh import radius_from_filling_fraction
from .sim import Box, SearchRegion

if TYPE_CHECKING:
    from collections.abc import Mapping

#: Plasma frequency of the metallic examples, ``ω_p·a/(2πc) = 1``.
PLASMA_FREQUENCY: Final = 2 * math.pi

GAAS_MODEL: Final = lorentz_from_frequencies(10.9, 8.75, 8.12)
"""GaAs with ``ω_T·a/(2πc) = 1`` (``ω_T = 8.12`` THz, ``ω_L = 8.75`` THz)."""


@dataclass(frozen=True)
class Preset:
    """
    A complete set-up: material, geometry, search box and references.

    Attributes:
        name: Identifier used in configuration files.
        description: Human readable summary.
        model: Permittivity of the inclusion.
        radius: Disc radius.
        box: Rectangle of the complex plane searched for bands.
        converge_k: Wavevector of the convergence study.
        converge_region: Square around the first eigenvalue at
            ``converge_k``.
        reference: First eigenvalue ``ω·a/c`` published for
            ``h = 1/10, 1/20, 1/40, 1/80``, if any.
        reference_orders: Published convergence orders, if any.

    """

    name: str
    description: str
    model: DielectricModel
    radius: float
    box: Box
    converge_k: tuple[float, float] = NAMED_POINTS["M1"]
    converge_region: SearchRegion | None = None
    reference: tuple[complex, ...] = ()
    reference_orders: tuple[float, ...] = ()

    @property
    def filling_fraction(self) -> float:
        """Area fraction of the disc."""
        return math.pi * self.radius**2

    def settings(self) -> dict[str, str]:
        """Configuration keys equivalent to the preset."""
        settings = {
            "geometry.r": repr(self.radius),
            "material.kind": self.model.kind.value,
            "search.box": ", ".join(repr(b) for b in self.box),
            "converge.k": ", ".join(repr(k) for k in self.converge_k),
        }
        settings.update(
            (f"material.{name}", repr(value))
            for name, value in self.model.params().items()
        )
        if self.converge_region is not None:
            settings["converge.center"] = repr(self.converge_region.center)
            settings["converge.half_side"] = repr(
                self.converge_region.half_side,
            )
        return settings


def _over_2pic(*values: float) -> tuple[complex, ...]:
    return tuple(complex(2 * math.pi * v) for v in values)


_METAL_BOX: Final = (0.2, 11.8, -5.8, 5.8)
_GAAS_BOX: Final = (0.1, 13.9, -6.9, 6.9)

PRESETS: Final[Mapping[str, Preset]] = MappingProxyType({
    preset.name: preset
    for preset in (
        Preset(
            name="dielectric-rods",
            description="Dielectric rods, ε_b = 8.9, r = 0.378",
            model=Constant(eps_b=8.9),
            radius=0.378,
            box=(0.2, 9.8, -4.8, 4.8),
            converge_region=SearchRegion(1.58, 0.15),
            reference=_over_2pic(0.2539, 0.2490, 0.2477, 0.2473),
            reference_orders=(1.8359, 1.9496),
        ),
        Preset(
            name="gaas-f0.001",
            description="GaAs rods (Lorentz model), f = 0.001",
            model=GAAS_MODEL,
            radius=radius_from_filling_fraction(0.001),
            box=_GAAS_BOX,
        ),
        Preset(
            name="gaas-f0.1",
            description="GaAs rods (Lorentz model), f = 0.1",
            model=GAAS_MODEL,
            radius=radius_from_filling_fraction(0.1),
            box=_GAAS_BOX,
            converge_region=SearchRegion(1.86, 0.15),
            reference=_over_2pic(0.3038, 0.2949, 0.2925, 0.2919),
            reference_orders=(1.9074, 1.9679),
        ),
        Preset(
            name="metal-f0.001",
            description="Lossless Drude metal rods, f = 0.001",
            model=DrudeLossless(omega_p=PLASMA_FREQUENCY),
            radius=radius_from_filling_fraction(0.001),
            box=_METAL_BOX,
        ),
        Preset(
            name="metal-f0.7",
            description="Lossless Drude metal rods, f = 0.7",
            model=DrudeLossless(omega_p=PLASMA_FREQUENCY),
            radius=radius_from_filling_fraction(0.7),
            box=_METAL_BOX,
            converge_region=SearchRegion(5.6, 0.5),
            reference=_over_2pic(0.8878, 0.8762, 0.8730, 0.8722),
            reference_orders=(1.8745, 1.9589),
        ),
        Preset(
            name="lossy-metal-f0.01",
            description="Lossy Drude metal rods, γ = 0.01·ω_p, f = 0.01",
            model=DrudeLossy(
                omega_p=PLASMA_FREQUENCY,
                gamma=0.01 * PLASMA_FREQUENCY,
            ),
            radius=radius_from_filling_fraction(0.01),
            box=_METAL_BOX,
        ),
        Preset(
            name="lossy-metal-f0.1",
            description="Lossy Drude metal rods, γ = 0.01·ω_p, f = 0.1",
            model=DrudeLossy(
                omega_p=PLASMA_FREQUENCY,
                gamma=0.01 * PLASMA_FREQUENCY,
            ),
            radius=radius_from_filling_fraction(0.1),
            box=_METAL_BOX,
            converge_k=NAMED_POINTS["M3"],
            converge_region=SearchRegion(1.64 - 0.02j, 0.1),
            reference=(
                1.6322 - 0.0220j,
                1.6384 - 0.0217j,
                1.6398 - 0.0216j,
                1.6402 - 0.0216j,
            ),
            reference_orders=(2.0984, 2.0415),
        ),
    )
})


def get_preset(name: str) -> Preset:
    """
    Look up a preset by name.

    Examples:
        >>> from phcsim.presets import get_preset
        >>> round(get_preset("gaas-f0.1").radius, 4)
        0.1784

    """
    try:
        return PRESETS[name]
    except KeyError:
        msg = f"unknown preset {name!r} (expected one of {', '.join(PRESETS)})"
        raise ValueError(msg) from None
