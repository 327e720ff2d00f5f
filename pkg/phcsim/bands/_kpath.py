from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import TYPE_CHECKING, Final

import numpy as np
import numpy.typing as npt

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

Point = tuple[float, float]

#: Symmetry points of the Brillouin zone of the square lattice.
NAMED_POINTS: Final[Mapping[str, Point]] = MappingProxyType({
    "M1": (math.pi, math.pi),
    "M2": (math.pi / 2, math.pi / 2),
    "M3": (0.0, 0.0),
    "M4": (math.pi / 2, 0.0),
    "M5": (math.pi, 0.0),
    "M6": (math.pi, math.pi / 2),
})

DEFAULT_PATH: Final = ("M1", "M3", "M5", "M1")

_BRILLOUIN_TOLERANCE: Final = 1e-12


def point_label(point: Point) -> str:
    """Name of a symmetry point, or its coordinates."""
    for name, named in NAMED_POINTS.items():
        if math.dist(point, named) <= _BRILLOUIN_TOLERANCE:
            return name
    return f"({point[0]:.4g}, {point[1]:.4g})"


@dataclass(frozen=True)
class KSample:
    """Wavevector sampled along a path."""

    segment_index: int
    path_param: float
    k: Point


@dataclass(frozen=True)
class KPath:
    """
    Piecewise linear path in the Brillouin zone.

    Attributes:
        vertices: Ordered corners of the path.
        samples_per_segment: Number of intervals each segment is divided
            into.
        labels: Tick label of each vertex. Defaults to the names of the
            symmetry points.

    Examples:
        >>> from phcsim.bands import KPath
        >>> path = KPath(samples_per_segment=2)
        >>> path.labels
        ('M1', 'M3', 'M5', 'M1')
        >>> len(path.samples())
        7

    """

    vertices: tuple[Point, ...] = tuple(NAMED_POINTS[n] for n in DEFAULT_PATH)
    samples_per_segment: int = 10
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        vertices = tuple(
            (float(k1), float(k2)) for k1, k2 in self.vertices
        )
        object.__setattr__(self, "vertices", vertices)

        if len(vertices) < 2:  # noqa: PLR2004
            msg = "a path needs at least two vertices"
            raise ValueError(msg)

        limit = math.pi + _BRILLOUIN_TOLERANCE
        for vertex in vertices:
            if max(abs(vertex[0]), abs(vertex[1])) > limit:
                msg = f"vertex {vertex} lies outside the Brillouin zone [-π, π]²"
                raise ValueError(msg)

        for start, end in zip(vertices, vertices[1:]):
            if math.dist(start, end) <= _BRILLOUIN_TOLERANCE:
                msg = f"consecutive vertices must be distinct, got {start} twice"
                raise ValueError(msg)

        if self.samples_per_segment < 1:
            msg = (
                "samples_per_segment must be positive, got "
                f"{self.samples_per_segment}"
            )
            raise ValueError(msg)

        if self.labels is None:
            object.__setattr__(
                self,
                "labels",
                tuple(point_label(v) for v in vertices),
            )
        elif len(self.labels) != len(vertices):
            msg = (
                f"{len(self.labels)} labels given for {len(vertices)} vertices"
            )
            raise ValueError(msg)
        else:
            object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_names(
        cls,
        names: Sequence[str],
        samples_per_segment: int = 10,
    ) -> KPath:
        """Build a path through named symmetry points."""
        unknown = [n for n in names if n not in NAMED_POINTS]
        if unknown:
            msg = (
                f"unknown symmetry points {unknown} "
                f"(expected some of {', '.join(NAMED_POINTS)})"
            )
            raise ValueError(msg)

        return cls(
            vertices=tuple(NAMED_POINTS[n] for n in names),
            samples_per_segment=samples_per_segment,
            labels=tuple(names),
        )

    def _cumulative_lengths(self) -> npt.NDArray[np.float64]:
        lengths = [
            math.dist(start, end)
            for start, end in zip(self.vertices, self.vertices[1:])
        ]
        return np.concatenate([[0.0], np.cumsum(lengths)])

    def vertex_params(self) -> tuple[float, ...]:
        """Path parameter (arclength fraction) of each vertex."""
        cumulative = self._cumulative_lengths()
        return tuple(float(c) for c in cumulative / cumulative[-1])

    def samples(self) -> list[KSample]:
        """
        Sample the path.

        Segment endpoints are included, and the point shared by two
        consecutive segments appears once, attributed to the first.

        """
        cumulative = self._cumulative_lengths()
        total = cumulative[-1]
        n = self.samples_per_segment

        samples = []
        for segment, (start, end) in enumerate(
            zip(self.vertices, self.vertices[1:]),
        ):
            first = 0 if segment == 0 else 1
            for i in range(first, n + 1):
                t = i / n
                samples.append(KSample(
                    segment_index=segment,
                    path_param=float(
                        (cumulative[segment] + t * (cumulative[segment + 1]
                         - cumulative[segment])) / total,
                    ),
                    k=(
                        start[0] + t * (end[0] - start[0]),
                        start[1] + t * (end[1] - start[1]),
                    ),
                ))

        return samples
