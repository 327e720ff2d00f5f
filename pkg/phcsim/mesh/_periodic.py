from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Final

import numpy as np
import numpy.typing as npt

from .._exceptions import NonMatchingBoundaryError

if TYPE_CHECKING:
    from ._mesh import UnitCellMesh

#: Absolute tolerance used to pair vertices on opposite edges.
PAIRING_TOLERANCE: Final = 1e-12


@dataclass(frozen=True, eq=False)
class PeriodicDofMap:
    """
    Identification of mesh vertices into periodic degrees of freedom.

    Attributes:
        dof_of_vertex: Degree of freedom of each vertex.
        n_dofs: Number of independent degrees of freedom.

    """

    dof_of_vertex: npt.NDArray[np.intp]
    n_dofs: int


def _pair_edges(
    image: npt.NDArray[np.intp],
    source: npt.NDArray[np.intp],
    target: npt.NDArray[np.intp],
    coordinate: npt.NDArray[np.float64],
    *,
    edge_names: str,
    tol: float,
) -> None:
    """Map every vertex of ``source`` to its mirror vertex in ``target``."""
    if len(source) != len(target):
        msg = (
            f"edges {edge_names} have {len(source)} and {len(target)} "
            "vertices; they cannot be identified"
        )
        raise NonMatchingBoundaryError(msg)

    if len(source) == 0:
        return

    order = np.argsort(coordinate[target], kind="stable")
    sorted_target = coordinate[target][order]
    wanted = coordinate[source]

    position = np.searchsorted(sorted_target, wanted)
    below = np.clip(position - 1, 0, len(sorted_target) - 1)
    above = np.clip(position, 0, len(sorted_target) - 1)
    use_above = (
        np.abs(sorted_target[above] - wanted)
        < np.abs(sorted_target[below] - wanted)
    )
    nearest = np.where(use_above, above, below)

    unmatched = np.abs(sorted_target[nearest] - wanted) > tol
    if np.any(unmatched):
        first = int(source[np.argmax(unmatched)])
        msg = (
            f"vertex {first} on edges {edge_names} has no mirror vertex "
            f"within {tol}"
        )
        raise NonMatchingBoundaryError(msg)

    matched = target[order[nearest]]
    if len(np.unique(matched)) != len(matched):
        msg = f"vertices on edges {edge_names} do not pair one to one"
        raise NonMatchingBoundaryError(msg)

    image[source] = matched


def build_periodic_dof_map(
    mesh: UnitCellMesh,
    *,
    tol: float = PAIRING_TOLERANCE,
) -> PeriodicDofMap:
    """
    Identify the vertices related by the lattice periodicity.

    Vertices on ``x₁ = 1`` are identified with their mirror on ``x₁ = 0``,
    vertices on ``x₂ = 1`` with their mirror on ``x₂ = 0``, so the four
    corners share a single degree of freedom.

    Args:
        mesh: Unit cell mesh.
        tol: Absolute tolerance for the pairing.

    Returns:
        Periodic degree of freedom map.

    Raises:
        NonMatchingBoundaryError: If opposite edges do not pair.

    Examples:
        >>> from phcsim.mesh import build_periodic_dof_map, generate_structured
        >>> build_periodic_dof_map(generate_structured(10, 0.378)).n_dofs
        100

    """
    x, y = mesh.vertices.T
    image = np.arange(mesh.n_vertices, dtype=np.intp)

    left = np.flatnonzero(np.abs(x) <= tol)
    right = np.flatnonzero(np.abs(x - 1) <= tol)
    bottom = np.flatnonzero(np.abs(y) <= tol)
    top = np.flatnonzero(np.abs(y - 1) <= tol)

    _pair_edges(image, top, bottom, x, edge_names="x₂=1/x₂=0", tol=tol)
    _pair_edges(image, right, left, y, edge_names="x₁=1/x₁=0", tol=tol)

    # Corners need two hops to reach the origin
    while True:
        composed = image[image]
        if np.array_equal(composed, image):
            break
        image = composed

    _, dof_of_vertex = np.unique(image, return_inverse=True)
    dof_of_vertex = dof_of_vertex.reshape(-1).astype(np.intp)

    return PeriodicDofMap(
        dof_of_vertex=dof_of_vertex,
        n_dofs=int(dof_of_vertex.max()) + 1,
    )
