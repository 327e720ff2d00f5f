from __future__ import annotations

import abc
import enum
import math
from collections.abc import Mapping
from dataclasses import dataclass, field, fields
from types import MappingProxyType
from typing import TYPE_CHECKING, Any, ClassVar, Final, Protocol, runtime_checkable

from typing_extensions import override

from .._exceptions import PoleProximityError

if TYPE_CHECKING:
    from collections.abc import Iterable

#: Minimum distance kept between evaluation points and poles.
#: Ten times the default search precision of the spectral indicator method.
DEFAULT_POLE_GUARD: Final = 1e-3


@runtime_checkable
class DiskLike(Protocol):
    """Anything describing a closed disk in the complex plane."""

    @property
    def center(self) -> complex:
        """Center of the disk."""

    @property
    def radius(self) -> float:
        """Radius of the disk."""


class ModelKind(enum.Enum):
    """Family of a permittivity model."""

    CONSTANT = "Constant"
    LORENTZ = "Lorentz"
    DRUDE_LOSSLESS = "DrudeLossless"
    DRUDE_LOSSY = "DrudeLossy"


def _distance_to_disk(point: complex, disk: DiskLike) -> float:
    return max(abs(point - disk.center) - disk.radius, 0.0)


def _check_guard(
    omega: complex,
    singular_points: Iterable[complex],
    guard: float,
) -> None:
    for pole in singular_points:
        if abs(omega - pole) <= guard:
            msg = (
                f"Frequency {omega} is within {guard} of the pole {pole}; "
                f"shrink or shift the search region"
            )
            raise PoleProximityError(msg)


@dataclass(frozen=True)
class DielectricModel(abc.ABC):
    """
    Permittivity of a two-material unit cell.

    The permittivity is ``eps_background`` outside the inclusion and
    the frequency dependent value returned by :meth:`eval` inside it.
    Frequencies are given in reduced units ``ω·a/c``.

    """

    kind: ClassVar[ModelKind]
    real_coefficients: ClassVar[bool] = True

    eps_background: float = field(default=1.0, kw_only=True)

    def __post_init__(self) -> None:
        if not self.eps_background > 0:
            msg = f"eps_background must be positive, got {self.eps_background}"
            raise ValueError(msg)

    @abc.abstractmethod
    def _eps(self, omega: complex) -> complex:
        """Evaluate the inclusion permittivity without any check."""

    @abc.abstractmethod
    def _omega_squared_eps(self, omega: complex) -> complex:
        """Evaluate ω²·ε(ω) in a form free of removable singularities."""

    @abc.abstractmethod
    def derivative(self, omega: complex) -> complex:
        """Analytic derivative dε/dω of the inclusion permittivity."""

    @abc.abstractmethod
    def poles(self) -> tuple[complex, ...]:
        """Poles of ω ↦ ω²·ε(ω)."""

    def singularities(self) -> tuple[complex, ...]:
        """Poles of ω ↦ ε(ω) itself."""
        return self.poles()

    def params(self) -> Mapping[str, float]:
        """Model parameters keyed by their configuration names."""
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def eval(
        self,
        omega: complex,
        *,
        guard: float = DEFAULT_POLE_GUARD,
    ) -> complex:
        """
        Evaluate the inclusion permittivity.

        Args:
            omega: Complex frequency ``ω·a/c``.
            guard: Minimum admitted distance to a pole.

        Returns:
            The permittivity ε_b(ω).

        Raises:
            PoleProximityError: If ``omega`` is closer than ``guard`` to a
                singularity of the model.

        Examples:
            >>> from phcsim.dielectric import Constant, DrudeLossless
            >>> Constant(eps_b=8.9).eval(1.0)
            (8.9+0j)
            >>> DrudeLossless(omega_p=2.0).eval(2.0)
            0j

        """
        omega = complex(omega)
        _check_guard(omega, self.singularities(), guard)
        return complex(self._eps(omega))

    def omega_squared_eps(
        self,
        omega: complex,
        *,
        guard: float = DEFAULT_POLE_GUARD,
    ) -> complex:
        """Evaluate ω²·ε_b(ω), which is what the discrete operator needs."""
        omega = complex(omega)
        _check_guard(omega, self.poles(), guard)
        return complex(self._omega_squared_eps(omega))

    def region_is_holomorphic(
        self,
        region: DiskLike,
        guard: float = DEFAULT_POLE_GUARD,
    ) -> bool:
        """Check that every pole keeps a distance above ``guard`` from a disk."""
        return region_is_holomorphic(self, region, guard)


@dataclass(frozen=True)
class Constant(DielectricModel):
    """Frequency independent inclusion."""

    kind: ClassVar[ModelKind] = ModelKind.CONSTANT

    eps_b: float

    @override
    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.eps_b > 0:
            msg = f"eps_b must be positive, got {self.eps_b}"
            raise ValueError(msg)

    @override
    def _eps(self, omega: complex) -> complex:
        return complex(self.eps_b)

    @override
    def _omega_squared_eps(self, omega: complex) -> complex:
        return omega**2 * self.eps_b

    @override
    def derivative(self, omega: complex) -> complex:
        return 0j

    @override
    def poles(self) -> tuple[complex, ...]:
        return ()


@dataclass(frozen=True)
class Lorentz(DielectricModel):
    """Polar dielectric with one transverse optical resonance."""

    kind: ClassVar[ModelKind] = ModelKind.LORENTZ

    eps_inf: float
    omega_L: float  # noqa: N815
    omega_T: float  # noqa: N815

    @override
    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.eps_inf > 0:
            msg = f"eps_inf must be positive, got {self.eps_inf}"
            raise ValueError(msg)
        if not self.omega_L > self.omega_T > 0:
            msg = (
                "Lorentz model requires omega_L > omega_T > 0, got "
                f"omega_L={self.omega_L}, omega_T={self.omega_T}"
            )
            raise ValueError(msg)

    @override
    def _eps(self, omega: complex) -> complex:
        omega2 = omega**2
        return (
            self.eps_inf
            * (self.omega_L**2 - omega2)
            / (self.omega_T**2 - omega2)
        )

    @override
    def _omega_squared_eps(self, omega: complex) -> complex:
        return omega**2 * self._eps(omega)

    @override
    def derivative(self, omega: complex) -> complex:
        denominator = (self.omega_T**2 - omega**2) ** 2
        return (
            2 * omega * self.eps_inf
            * (self.omega_L**2 - self.omega_T**2) / denominator
        )

    @override
    def poles(self) -> tuple[complex, ...]:
        return (complex(self.omega_T, 0), complex(-self.omega_T, 0))


@dataclass(frozen=True)
class DrudeLossless(DielectricModel):
    """Free electron metal without damping."""

    kind: ClassVar[ModelKind] = ModelKind.DRUDE_LOSSLESS

    omega_p: float

    @override
    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.omega_p > 0:
            msg = f"omega_p must be positive, got {self.omega_p}"
            raise ValueError(msg)

    @override
    def _eps(self, omega: complex) -> complex:
        return 1 - self.omega_p**2 / omega**2

    @override
    def _omega_squared_eps(self, omega: complex) -> complex:
        return omega**2 - self.omega_p**2

    @override
    def derivative(self, omega: complex) -> complex:
        return 2 * self.omega_p**2 / omega**3

    @override
    def poles(self) -> tuple[complex, ...]:
        return ()

    @override
    def singularities(self) -> tuple[complex, ...]:
        return (0j,)


@dataclass(frozen=True)
class DrudeLossy(DielectricModel):
    """Free electron metal with relaxation rate ``gamma``."""

    kind: ClassVar[ModelKind] = ModelKind.DRUDE_LOSSY
    real_coefficients: ClassVar[bool] = False

    omega_p: float
    gamma: float

    @override
    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.omega_p > 0:
            msg = f"omega_p must be positive, got {self.omega_p}"
            raise ValueError(msg)
        if not self.gamma > 0:
            msg = f"gamma must be positive, got {self.gamma}"
            raise ValueError(msg)

    @override
    def _eps(self, omega: complex) -> complex:
        return 1 - self.omega_p**2 / (omega * (omega + 1j * self.gamma))

    @override
    def _omega_squared_eps(self, omega: complex) -> complex:
        # The factor ω cancels the pole of ε at the origin
        return omega**2 - self.omega_p**2 * omega / (omega + 1j * self.gamma)

    @override
    def derivative(self, omega: complex) -> complex:
        base = omega * (omega + 1j * self.gamma)
        return self.omega_p**2 * (2 * omega + 1j * self.gamma) / base**2

    @override
    def poles(self) -> tuple[complex, ...]:
        return (complex(0, -self.gamma),)

    @override
    def singularities(self) -> tuple[complex, ...]:
        return (0j, complex(0, -self.gamma))


MODEL_CLASSES: Final[Mapping[ModelKind, type[DielectricModel]]] = (
    MappingProxyType({
        ModelKind.CONSTANT: Constant,
        ModelKind.LORENTZ: Lorentz,
        ModelKind.DRUDE_LOSSLESS: DrudeLossless,
        ModelKind.DRUDE_LOSSY: DrudeLossy,
    })
)


def build_model(
    kind: str | ModelKind,
    params: Mapping[str, Any],
) -> DielectricModel:
    """
    Build a model from its kind name and its parameters.

    Args:
        kind: Kind name, such as ``"Lorentz"``.
        params: Parameters keyed exactly as the model fields, optionally
            including ``eps_background``.

    Returns:
        The permittivity model.

    Examples:
        >>> from phcsim.dielectric import build_model
        >>> build_model("DrudeLossy", {"omega_p": 6.0, "gamma": 0.06})
        DrudeLossy(eps_background=1.0, omega_p=6.0, gamma=0.06)

    """
    try:
        model_kind = ModelKind(kind)
    except ValueError:
        known = ", ".join(k.value for k in ModelKind)
        msg = f"Unknown material kind {kind!r} (expected one of {known})"
        raise ValueError(msg) from None

    cls = MODEL_CLASSES[model_kind]
    accepted = {f.name for f in fields(cls)}
    unknown = set(params) - accepted
    if unknown:
        msg = f"Unknown parameters for {model_kind.value}: {sorted(unknown)}"
        raise ValueError(msg)

    try:
        return cls(**{name: float(value) for name, value in params.items()})
    except TypeError as error:
        msg = f"Missing parameters for {model_kind.value}: {error}"
        raise ValueError(msg) from error


def region_is_holomorphic(
    model: DielectricModel,
    region: DiskLike,
    guard: float = DEFAULT_POLE_GUARD,
) -> bool:
    """
    Check whether ω ↦ ω²·ε(ω) is holomorphic around a closed disk.

    Args:
        model: Permittivity model.
        region: Disk (for instance the circle circumscribing a square search
            region).
        guard: Required distance between every pole and the disk.

    Returns:
        ``True`` if every pole is further than ``guard`` from the disk.

    """
    if not guard > 0:
        msg = f"guard must be positive, got {guard}"
        raise ValueError(msg)

    return all(
        _distance_to_disk(pole, region) > guard
        for pole in model.poles()
    )


def lorentz_from_frequencies(
    eps_inf: float,
    omega_L: float,  # noqa: N803
    omega_T: float,  # noqa: N803
    *,
    transverse_reduced: float = 1.0,
    eps_background: float = 1.0,
) -> Lorentz:
    """
    Build a Lorentz model from physical resonance frequencies.

    The frequencies can be in any unit. They are rescaled so that
    ``omega_T·a/(2πc)`` equals ``transverse_reduced``.

    Examples:
        >>> from phcsim.dielectric import lorentz_from_frequencies
        >>> model = lorentz_from_frequencies(10.9, 8.75, 8.12)
        >>> round(model.omega_T / (2 * math.pi), 12)
        1.0

    """
    scale = 2 * math.pi * transverse_reduced / omega_T
    return Lorentz(
        eps_inf=eps_inf,
        omega_L=omega_L * scale,
        omega_T=omega_T * scale,
        eps_background=eps_background,
    )

