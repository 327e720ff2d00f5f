from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt

from .._exceptions import SingularSystemError
from ..nep import DEFAULT_SOLVE_TOL, ConditionFlag, HolomorphicMatrixFunction, solve

if TYPE_CHECKING:
    from collections.abc import Callable

    from ..dielectric import DiskLike

logger = logging.getLogger(__name__)

Box = tuple[float, float, float, float]


@dataclass(frozen=True)
class SearchRegion:
    """
    Axis aligned square of the complex frequency plane.

    Attributes:
        center: Center of the square.
        half_side: Half of the side length.
        level: Depth in the subdivision tree.

    """

    center: complex
    half_side: float
    level: int = 0

    def __post_init__(self) -> None:
        if not self.half_side > 0:
            msg = f"half_side must be positive, got {self.half_side}"
            raise ValueError(msg)
        object.__setattr__(self, "center", complex(self.center))

    @classmethod
    def covering(
        cls,
        re_min: float,
        re_max: float,
        im_min: float,
        im_max: float,
    ) -> SearchRegion:
        """
        Smallest square with the same center containing a rectangle.

        Examples:
            >>> from phcsim.sim import SearchRegion
            >>> SearchRegion.covering(0.0, 2.0, -0.5, 0.5)
            SearchRegion(center=(1+0j), half_side=1.0, level=0)

        """
        if not (re_max > re_min and im_max > im_min):
            msg = (
                f"empty rectangle [{re_min}, {re_max}] × [{im_min}, {im_max}]"
            )
            raise ValueError(msg)

        return cls(
            center=complex((re_min + re_max) / 2, (im_min + im_max) / 2),
            half_side=max(re_max - re_min, im_max - im_min) / 2,
        )

    @property
    def radius(self) -> float:
        """Radius of the circumscribed circle."""
        return self.half_side * math.sqrt(2)

    @property
    def diameter(self) -> float:
        """Length of the diagonal of the square."""
        return 2 * self.radius

    @property
    def bounds(self) -> Box:
        """Real and imaginary bounds ``(re_min, re_max, im_min, im_max)``."""
        return (
            self.center.real - self.half_side,
            self.center.real + self.half_side,
            self.center.imag - self.half_side,
            self.center.imag + self.half_side,
        )

    def contains(self, omega: complex, *, tol: float = 0.0) -> bool:
        """Whether ``omega`` lies in the closed square."""
        return (
            abs(omega.real - self.center.real) <= self.half_side + tol
            and abs(omega.imag - self.center.imag) <= self.half_side + tol
        )

    def intersects(self, box: Box) -> bool:
        """Whether the closed square meets a closed rectangle."""
        re_min, re_max, im_min, im_max = self.bounds
        return (
            re_min <= box[1] and box[0] <= re_max
            and im_min <= box[3] and box[2] <= im_max
        )

    def children(self) -> tuple[SearchRegion, ...]:
        """Split the square into four, ordered by rows from the bottom left."""
        quarter = self.half_side / 2
        return tuple(
            SearchRegion(
                center=self.center + complex(dx, dy) * quarter,
                half_side=quarter,
                level=self.level + 1,
            )
            for dy in (-1, 1)
            for dx in (-1, 1)
        )

    def shifted(self, offset: complex) -> SearchRegion:
        """Translate the square."""
        return SearchRegion(
            center=self.center + offset,
            half_side=self.half_side,
            level=self.level,
        )


def admissible_tiling(
    box: Box,
    admissible: Callable[[DiskLike], bool],
    *,
    min_half_side: float,
) -> list[SearchRegion]:
    """
    Cover a rectangle with squares whose circumscribed disks are admissible.

    The covering square is subdivided wherever its disk is not admissible.
    Squares that are still not admissible below ``min_half_side`` (those
    containing or touching a pole) are left out.

    Args:
        box: Rectangle ``(re_min, re_max, im_min, im_max)``.
        admissible: Predicate on disks, usually
            :attr:`HolomorphicMatrixFunction.admissible`.
        min_half_side: Smallest square considered.

    Returns:
        Admissible squares meeting the rectangle, sorted by level and
        center.

    """
    tiles: list[SearchRegion] = []
    pending = [SearchRegion.covering(*box)]
    n_dropped = 0

    while pending:
        square = pending.pop()
        if not square.intersects(box):
            continue
        if admissible(square):
            tiles.append(square)
        elif square.half_side / 2 < min_half_side:
            n_dropped += 1
        else:
            pending.extend(square.children())

    if n_dropped:
        logger.info(
            "Left %d squares of half side < %.3g out of the search: they are "
            "too close to a pole",
            n_dropped,
            2 * min_half_side,
        )

    tiles.sort(key=lambda s: (s.level, s.center.real, s.center.imag))
    return tiles


def random_unit_vector(
    dimension: int,
    rng: np.random.Generator,
) -> npt.NDArray[np.complex128]:
    """
    Draw a random complex vector of unit Euclidean norm.

    Entries are drawn uniformly on the complex unit disk before the
    normalization.

    """
    modulus = np.sqrt(rng.uniform(size=dimension))
    phase = np.exp(2j * np.pi * rng.uniform(size=dimension))
    vector = modulus * phase
    return vector / np.linalg.norm(vector)


def indicator(
    fn: HolomorphicMatrixFunction,
    region: SearchRegion,
    g: npt.ArrayLike,
    m0: int,
    *,
    solve_tol: float = DEFAULT_SOLVE_TOL,
) -> float:
    """
    Spectral indicator of a square.

    This is the trapezoidal approximation of the norm of the projection
    ``(1/2πi)∮T(ω)⁻¹g dω`` over the circle circumscribing the square,
    using ``m0`` equispaced nodes. It is close to zero when no
    eigenvalue lies inside the circle.

    Args:
        fn: Matrix function, holomorphic around the circle.
        region: Square whose circumscribed circle is the contour.
        g: Random vector with unit norm.
        m0: Number of quadrature nodes.
        solve_tol: Relative residual tolerance of the node solves.

    Returns:
        The indicator value.

    Raises:
        SingularSystemError: If a node solve is singular or ill
            conditioned, which happens when an eigenvalue lies on (or
            extremely close to) the contour.

    Examples:
        >>> from phcsim.nep import HolomorphicMatrixFunction
        >>> from phcsim.sim import SearchRegion, indicator
        >>> fn = HolomorphicMatrixFunction.from_polynomial([[[-1]], [[1]]])
        >>> round(indicator(fn, SearchRegion(1, 0.5), [1.0], 16), 12)
        1.0

    """
    radius = region.radius
    theta = 2 * np.pi * np.arange(1, m0 + 1) / m0
    rotations = np.exp(1j * theta)

    total = np.zeros(fn.dimension, dtype=np.complex128)
    for rotation in rotations:
        node = region.center + radius * rotation
        report = solve(fn, node, g, solve_tol=solve_tol)
        if report.condition_flag is ConditionFlag.ILL_CONDITIONED:
            msg = (
                f"ill conditioned solve at ω={node} "
                f"(residual {report.residual_norm:.3e})"
            )
            raise SingularSystemError(msg)
        total += rotation * report.solution

    return float(np.linalg.norm(radius / m0 * total))
