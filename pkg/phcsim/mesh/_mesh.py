from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Final

import numpy as np
import numpy.typing as npt

from .._exceptions import InvalidGeometryError

#: Center of the inclusion disc in the unit cell.
DISC_CENTER: Final = (0.5, 0.5)

#: Absolute tolerance for coordinates lying on the unit cell boundary.
GEOMETRY_TOLERANCE: Final = 1e-12


class Material(enum.IntEnum):
    """Material of a triangle."""

    BACKGROUND = 0
    INCLUSION = 1


def radius_from_filling_fraction(filling_fraction: float) -> float:
    """
    Radius of the centered disc occupying a given area fraction.

    Examples:
        >>> from phcsim.mesh import radius_from_filling_fraction
        >>> round(radius_from_filling_fraction(0.1), 4)
        0.1784

    """
    if not 0 < filling_fraction < math.pi / 4:
        msg = (
            "filling fraction must lie in (0, π/4) for a disc inside the "
            f"unit cell, got {filling_fraction}"
        )
        raise InvalidGeometryError(msg)

    return math.sqrt(filling_fraction / math.pi)


def filling_fraction_from_radius(radius: float) -> float:
    """Area fraction πr² of the unit cell covered by the disc."""
    return math.pi * radius**2


def check_disc_radius(radius: float) -> None:
    """Check that the disc fits strictly inside the unit cell."""
    if not 0 < radius < 0.5:  # noqa: PLR2004
        msg = f"disc radius must lie in (0, 1/2), got {radius}"
        raise InvalidGeometryError(msg)


def tag_by_centroid(
    vertices: npt.NDArray[np.float64],
    triangles: npt.NDArray[np.intp],
    radius: float,
) -> npt.NDArray[np.int8]:
    """Tag as inclusion the triangles whose centroid lies inside the disc."""
    centroids = vertices[triangles].mean(axis=1)
    distance = np.hypot(
        centroids[:, 0] - DISC_CENTER[0],
        centroids[:, 1] - DISC_CENTER[1],
    )
    return np.where(
        distance < radius,
        Material.INCLUSION,
        Material.BACKGROUND,
    ).astype(np.int8)


def signed_areas(
    vertices: npt.NDArray[np.float64],
    triangles: npt.NDArray[np.intp],
) -> npt.NDArray[np.float64]:
    """Signed areas of the triangles, positive when counterclockwise."""
    p0, p1, p2 = (vertices[triangles[:, i]] for i in range(3))
    d1 = p1 - p0
    d2 = p2 - p0
    return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


@dataclass(frozen=True, eq=False)
class UnitCellMesh:
    """
    Triangulation of the unit cell with a centered disc inclusion.

    The triangulation is checked on construction: counterclockwise
    triangles covering the cell, meeting only along whole edges.

    Attributes:
        vertices: Vertex coordinates, with shape ``(n_vertices, 2)``.
        triangles: Counterclockwise vertex indices, with shape
            ``(n_triangles, 3)``.
        material_tag: :class:`Material` of each triangle.
        disc_radius: Radius of the inclusion disc.

    """

    vertices: npt.NDArray[np.float64]
    triangles: npt.NDArray[np.intp]
    material_tag: npt.NDArray[np.int8]
    disc_radius: float

    def __post_init__(self) -> None:
        check_disc_radius(self.disc_radius)

        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2:  # noqa: PLR2004
            msg = f"vertices must have shape (n, 2), got {self.vertices.shape}"
            raise InvalidGeometryError(msg)

        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:  # noqa: PLR2004
            msg = f"triangles must have shape (n, 3), got {self.triangles.shape}"
            raise InvalidGeometryError(msg)

        if self.material_tag.shape != (len(self.triangles),):
            msg = "there must be exactly one material tag per triangle"
            raise InvalidGeometryError(msg)

        if (
            np.any(self.vertices < -GEOMETRY_TOLERANCE)
            or np.any(self.vertices > 1 + GEOMETRY_TOLERANCE)
        ):
            msg = "all vertices must lie in the unit square [0, 1]²"
            raise InvalidGeometryError(msg)

        if (
            np.any(self.triangles < 0)
            or np.any(self.triangles >= len(self.vertices))
        ):
            msg = "triangles reference vertices that do not exist"
            raise InvalidGeometryError(msg)

        areas = self.areas
        if np.any(areas <= 0):
            first = int(np.argmax(areas <= 0))
            msg = (
                f"triangle {first} has non-positive signed area "
                f"{areas[first]}; triangles must be counterclockwise"
            )
            raise InvalidGeometryError(msg)

        total = float(areas.sum())
        if abs(total - 1) > GEOMETRY_TOLERANCE:
            msg = f"triangles must cover the unit cell, total area is {total}"
            raise InvalidGeometryError(msg)

        self._check_conforming()

    def _check_conforming(self) -> None:
        # Interior edges belong to exactly two triangles, boundary edges to
        # one; a hanging node leaves an interior edge with a single triangle
        edges = np.sort(
            self.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2),
            axis=1,
        )
        unique, counts = np.unique(edges, axis=0, return_counts=True)

        if np.any(counts > 2):  # noqa: PLR2004
            i, j = unique[np.argmax(counts > 2)]  # noqa: PLR2004
            msg = (
                f"triangulation is not conforming: edge ({i}, {j}) belongs "
                "to more than two triangles"
            )
            raise InvalidGeometryError(msg)

        single = unique[counts == 1]
        ends = self.vertices[single]
        on_side = np.zeros(len(single), dtype=bool)
        for axis in (0, 1):
            for side in (0.0, 1.0):
                on_side |= np.all(
                    np.abs(ends[:, :, axis] - side) <= GEOMETRY_TOLERANCE,
                    axis=1,
                )
        if not np.all(on_side):
            i, j = single[np.argmin(on_side)]
            msg = (
                f"triangulation is not conforming: interior edge ({i}, {j}) "
                "belongs to a single triangle (hanging node)"
            )
            raise InvalidGeometryError(msg)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnitCellMesh):
            return False

        return (
            self.disc_radius == other.disc_radius
            and np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.triangles, other.triangles)
            and np.array_equal(self.material_tag, other.material_tag)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def n_vertices(self) -> int:
        """Number of vertices."""
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        """Number of triangles."""
        return len(self.triangles)

    @cached_property
    def areas(self) -> npt.NDArray[np.float64]:
        """Signed triangle areas."""
        return signed_areas(self.vertices, self.triangles)

    @cached_property
    def h(self) -> float:
        """Longest edge length."""
        corners = self.vertices[self.triangles]
        edges = corners - np.roll(corners, -1, axis=1)
        return float(np.max(np.hypot(edges[..., 0], edges[..., 1])))

    @property
    def inclusion_area(self) -> float:
        """Total area of the triangles tagged as inclusion."""
        mask = self.material_tag == Material.INCLUSION
        return float(self.areas[mask].sum())


def generate_structured(n: int, r: float) -> UnitCellMesh:
    """
    Triangulate the unit cell with a uniform grid.

    Each of the ``n × n`` squares is split into two triangles along the
    diagonal joining its lower left and upper right corners. Triangles are
    tagged as inclusion when their centroid lies inside the disc of
    radius ``r``.

    Args:
        n: Number of subdivisions per side.
        r: Radius of the disc.

    Returns:
        Structured mesh with ``2n²`` triangles and ``h = √2/n``.

    Examples:
        >>> from phcsim.mesh import generate_structured
        >>> mesh = generate_structured(10, 0.378)
        >>> mesh.n_triangles, mesh.n_vertices
        (200, 121)

    """
    if n < 2:  # noqa: PLR2004
        msg = f"at least 2 subdivisions per side are needed, got {n}"
        raise InvalidGeometryError(msg)
    check_disc_radius(r)

    coordinates = np.arange(n + 1) / n
    xx, yy = np.meshgrid(coordinates, coordinates)
    vertices = np.column_stack([xx.ravel(), yy.ravel()])

    i, j = np.meshgrid(np.arange(n), np.arange(n))
    v00 = (j * (n + 1) + i).ravel()
    v10 = v00 + 1
    v01 = v00 + n + 1
    v11 = v01 + 1

    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.stack([lower, upper], axis=1).reshape(-1, 3)

    return UnitCellMesh(
        vertices=vertices,
        triangles=triangles.astype(np.intp),
        material_tag=tag_by_centroid(vertices, triangles, r),
        disc_radius=r,
    )


def refine_uniform(mesh: UnitCellMesh) -> UnitCellMesh:
    """
    Split every triangle into four through its edge midpoints.

    Material tags of the children are recomputed with the centroid rule
    against the disc radius of the mesh.

    Examples:
        >>> from phcsim.mesh import generate_structured, refine_uniform
        >>> refine_uniform(generate_structured(10, 0.378)).n_triangles
        800

    """
    triangles = mesh.triangles
    n_vertices = mesh.n_vertices

    edges = np.concatenate([
        triangles[:, [0, 1]],
        triangles[:, [1, 2]],
        triangles[:, [2, 0]],
    ])
    unique_edges, inverse = np.unique(
        np.sort(edges, axis=1),
        axis=0,
        return_inverse=True,
    )
    midpoints = mesh.vertices[unique_edges].mean(axis=1)
    vertices = np.concatenate([mesh.vertices, midpoints])

    m01, m12, m20 = inverse.reshape(3, -1) + n_vertices
    a, b, c = triangles.T

    children = np.stack(
        [
            np.column_stack([a, m01, m20]),
            np.column_stack([m01, b, m12]),
            np.column_stack([m20, m12, c]),
            np.column_stack([m01, m12, m20]),
        ],
        axis=1,
    ).reshape(-1, 3).astype(np.intp)

    return UnitCellMesh(
        vertices=vertices,
        triangles=children,
        material_tag=tag_by_centroid(vertices, children, mesh.disc_radius),
        disc_radius=mesh.disc_radius,
    )
