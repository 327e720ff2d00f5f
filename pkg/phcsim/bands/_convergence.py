from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING, Final

import pandas as pd

from .._exceptions import AmbiguousTrackingError
from ..assembly import assemble
from ..dielectric import DEFAULT_POLE_GUARD
from ..mesh import build_periodic_dof_map, generate_structured, refine_uniform
from ..sim import SearchRegion, find_eigenvalues

if TYPE_CHECKING:
    from collections.abc import Sequence

    from ..dielectric import DielectricModel
    from ..sim import SimConfig

logger = logging.getLogger(__name__)

#: Columns of the tabular form of a convergence report.
CONVERGENCE_COLUMNS: Final = (
    "h",
    "re_omega_over_c",
    "im_omega_over_c",
    "re_omega_over_2pic",
    "xi",
    "order",
)


@dataclass(frozen=True)
class ConvergenceRow:
    """
    Eigenvalue tracked on one mesh.

    Attributes:
        h: Longest edge of the mesh.
        omega: Tracked frequency ``ω·a/c``.
        xi: Relative change ``|ωᵢ - ωᵢ₊₁|/|ωᵢ₊₁|`` with respect to the
            previous mesh, from the second row on.
        order: Observed order ``log₂(ξᵢ/ξᵢ₊₁)``, from the third row on.

    """

    h: float
    omega: complex
    xi: float | None = None
    order: float | None = None


@dataclass(frozen=True)
class ConvergenceReport:
    """Eigenvalue tracked on a sequence of uniformly refined meshes."""

    rows: tuple[ConvergenceRow, ...]

    def to_frame(self) -> pd.DataFrame:
        """Tabular form, with missing values for undefined ξ and orders."""
        return pd.DataFrame(
            [
                (
                    row.h,
                    row.omega.real,
                    row.omega.imag,
                    row.omega.real / (2 * math.pi),
                    math.nan if row.xi is None else row.xi,
                    math.nan if row.order is None else row.order,
                )
                for row in self.rows
            ],
            columns=list(CONVERGENCE_COLUMNS),
        )

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> ConvergenceReport:
        """Rebuild a report from its tabular form."""
        return cls(rows=tuple(
            ConvergenceRow(
                h=float(h),
                omega=complex(re, im),
                xi=None if math.isnan(xi) else float(xi),
                order=None if math.isnan(order) else float(order),
            )
            for h, re, im, xi, order in zip(
                frame["h"],
                frame["re_omega_over_c"],
                frame["im_omega_over_c"],
                frame["xi"],
                frame["order"],
            )
        ))


def _pick_first(values: Sequence[complex], target: complex | None) -> complex:
    if target is None:
        return min(values, key=lambda v: (v.real, v.imag))
    return min(values, key=lambda v: abs(v - target))


def track_nearest(
    previous: complex,
    values: Sequence[complex],
    *,
    radius: float,
    resolution: float,
) -> complex:
    """
    Pair an eigenvalue with the nearest one of a new mesh.

    Raises:
        AmbiguousTrackingError: If no value lies within ``radius``, or if
            the two nearest values are at distances differing by less than
            ``resolution``.

    """
    ranked = sorted(values, key=lambda v: abs(v - previous))
    candidates = [v for v in ranked if abs(v - previous) <= radius]

    if not candidates:
        msg = f"no eigenvalue within {radius:.3g} of {previous}"
        raise AmbiguousTrackingError(msg)

    if (
        len(candidates) > 1
        and abs(candidates[1] - previous) - abs(candidates[0] - previous)
        < resolution
    ):
        msg = (
            f"eigenvalues {candidates[0]} and {candidates[1]} are equally "
            f"close to {previous}"
        )
        raise AmbiguousTrackingError(msg)

    return candidates[0]


def relative_changes(
    omegas: Sequence[complex],
) -> list[tuple[float | None, float | None]]:
    """
    Relative changes and observed orders of a sequence of eigenvalues.

    Examples:
        >>> from phcsim.bands import relative_changes
        >>> changes = relative_changes([1.0, 0.5, 0.4])
        >>> changes[0]
        (None, None)
        >>> round(changes[1][0], 6), changes[1][1]
        (1.0, None)
        >>> round(changes[2][1], 6)
        2.0

    """
    xis: list[float | None] = [None]
    xis.extend(
        abs(previous - current) / abs(current)
        for previous, current in zip(omegas, omegas[1:])
    )

    orders: list[float | None] = [None] * len(omegas)
    for i in range(2, len(omegas)):
        before, after = xis[i - 1], xis[i]
        if before and after:
            orders[i] = math.log2(before / after)
        else:
            warnings.warn(
                f"the convergence order at row {i} is undefined because a "
                "relative change vanishes",
                RuntimeWarning,
                stacklevel=2,
            )

    return list(zip(xis, orders))


def convergence_study(  # noqa: PLR0913
    n0: int,
    levels: int,
    model: DielectricModel,
    k: Sequence[float],
    region: SearchRegion,
    cfg: SimConfig,
    *,
    r: float,
    target: complex | None = None,
    guard: float = DEFAULT_POLE_GUARD,
) -> ConvergenceReport:
    """
    Track one eigenvalue on uniformly refined structured meshes.

    The coarsest mesh has ``n0`` subdivisions per side, and each further
    level halves ``h``. On the coarsest mesh the eigenvalue nearest to
    ``target`` is chosen (the one of smallest real part if no target is
    given). On finer meshes the nearest eigenvalue to the previous one is
    taken.

    Args:
        n0: Subdivisions per side of the coarsest mesh.
        levels: Number of meshes, at least 2.
        model: Permittivity model.
        k: Wavevector.
        region: Square in which the eigenvalues are searched.
        cfg: Search parameters.
        r: Disc radius.
        target: Frequency near the eigenvalue to track.
        guard: Minimum distance between the search circles and the poles.

    Returns:
        One row per mesh, from the coarsest to the finest.

    Raises:
        AmbiguousTrackingError: If the region contains no eigenvalue, or if
            the pairing is not unique within a quarter of the diameter of
            the region.

    """
    if levels < 2:  # noqa: PLR2004
        msg = f"a convergence study needs at least 2 levels, got {levels}"
        raise ValueError(msg)

    omegas: list[complex] = []
    hs: list[float] = []
    mesh = generate_structured(n0, r)

    for level in range(levels):
        if level:
            mesh = refine_uniform(mesh)

        bundle = assemble(mesh, build_periodic_dof_map(mesh))
        fn = bundle.at_wavevector(k, model, guard=guard)
        values = [e.value for e in find_eigenvalues(fn, region, cfg)]

        if not values:
            msg = f"no eigenvalue found in {region} for h={mesh.h:.4g}"
            raise AmbiguousTrackingError(msg)

        if omegas:
            omega = track_nearest(
                omegas[-1],
                values,
                radius=region.diameter / 4,
                resolution=cfg.beta0,
            )
        else:
            omega = _pick_first(values, target)

        logger.info(
            "h=%.4g: ω·a/c=%s, ω·a/2πc=%.6f",
            mesh.h,
            omega,
            omega.real / (2 * math.pi),
        )
        omegas.append(omega)
        hs.append(mesh.h)

    return ConvergenceReport(rows=tuple(
        ConvergenceRow(h=h, omega=omega, xi=xi, order=order)
        for h, omega, (xi, order) in zip(hs, omegas, relative_changes(omegas))
    ))
