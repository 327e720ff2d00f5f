from __future__ import annotations

import logging
from dataclasses import dataclass
from types import MappingProxyType
from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp

from ..dielectric import DEFAULT_POLE_GUARD, DielectricModel, DiskLike
from ..mesh import Material, PeriodicDofMap, UnitCellMesh
from ..nep import HolomorphicMatrixFunction

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

logger = logging.getLogger(__name__)

Wavevector = tuple[float, float]


def _as_wavevector(k: Sequence[float] | npt.ArrayLike) -> Wavevector:
    k1, k2 = np.asarray(k, dtype=np.float64).reshape(2)
    return float(k1), float(k2)


@dataclass(frozen=True, eq=False)
class OperatorBundle:
    """
    Frequency and wavevector independent matrices of the discrete operator.

    Row indices correspond to test functions and column indices to trial
    functions.

    Attributes:
        A: Stiffness matrix, ``∫∇φⱼ·∇φᵢ``.
        Sx: Convection matrix ``∫φⱼ ∂φᵢ/∂x₁``.
        Sy: Convection matrix ``∫φⱼ ∂φᵢ/∂x₂``.
        M_a: Mass matrix restricted to the background.
        M_b: Mass matrix restricted to the inclusion.
        n_dofs: Number of periodic degrees of freedom.
        mesh_h: Longest edge of the mesh.

    """

    A: sp.csr_matrix
    Sx: sp.csr_matrix
    Sy: sp.csr_matrix
    M_a: sp.csr_matrix
    M_b: sp.csr_matrix
    n_dofs: int
    mesh_h: float

    @property
    def M(self) -> sp.csr_matrix:  # noqa: N802
        """Mass matrix of the whole cell."""
        return self.M_a + self.M_b

    def matrices(self) -> Mapping[str, sp.csr_matrix]:
        """Assembled matrices keyed by name."""
        return MappingProxyType({
            "A": self.A,
            "Sx": self.Sx,
            "Sy": self.Sy,
            "M_a": self.M_a,
            "M_b": self.M_b,
        })

    def convection(self, k: Sequence[float]) -> sp.csr_matrix:
        """Return ``S(k) = k₁·Sx + k₂·Sy``."""
        k1, k2 = _as_wavevector(k)
        return k1 * self.Sx + k2 * self.Sy

    def hermitian_part(self, k: Sequence[float]) -> sp.csr_matrix:
        """
        Return the frequency independent part ``H(k) = A + 2iS(k) + |k|²M``.

        ``H(k)`` is Hermitian positive semidefinite: it is the matrix of the
        form ``∫(∇ + ik)u·conj((∇ + ik)v)``.

        """
        k1, k2 = _as_wavevector(k)
        return (
            self.A.astype(np.complex128)
            + 2j * self.convection((k1, k2))
            + (k1**2 + k2**2) * self.M
        ).tocsr()

    def at_wavevector(
        self,
        k: Sequence[float],
        model: DielectricModel,
        *,
        guard: float = DEFAULT_POLE_GUARD,
    ) -> HolomorphicMatrixFunction:
        """
        Fix the wavevector and return the map ``ω ↦ T(ω)``.

        The frequency independent part is computed once and shared by every
        evaluation.

        """
        k = _as_wavevector(k)
        hermitian = self.hermitian_part(k)
        mass_a = self.M_a.astype(np.complex128)
        mass_b = self.M_b.astype(np.complex128)
        eps_a = model.eps_background

        def evaluate(omega: complex) -> sp.csr_matrix:
            omega = complex(omega)
            inclusion = model.omega_squared_eps(omega, guard=guard)
            return (
                hermitian
                - (eps_a * omega**2) * mass_a
                - inclusion * mass_b
            ).tocsr()

        def admissible(region: DiskLike) -> bool:
            return model.region_is_holomorphic(region, guard)

        return HolomorphicMatrixFunction(
            dimension=self.n_dofs,
            evaluate=evaluate,
            admissible=admissible,
        )


def _element_gradients(
    mesh: UnitCellMesh,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Constant gradients of the barycentric coordinates of each triangle."""
    corners = mesh.vertices[mesh.triangles]
    x = corners[..., 0]
    y = corners[..., 1]
    twice_area = 2 * mesh.areas[:, np.newaxis]

    # ∇λᵢ = (y_{i+1} - y_{i+2}, x_{i+2} - x_{i+1}) / 2|T|
    grad_x = (np.roll(y, -1, axis=1) - np.roll(y, -2, axis=1)) / twice_area
    grad_y = (np.roll(x, -2, axis=1) - np.roll(x, -1, axis=1)) / twice_area
    return grad_x, grad_y


def _scatter(
    local: npt.NDArray[np.float64],
    rows: npt.NDArray[np.intp],
    cols: npt.NDArray[np.intp],
    n_dofs: int,
) -> sp.csr_matrix:
    # Duplicate entries are summed by the conversion
    return sp.coo_matrix(
        (local.ravel(), (rows.ravel(), cols.ravel())),
        shape=(n_dofs, n_dofs),
    ).tocsr()


def assemble(mesh: UnitCellMesh, dofs: PeriodicDofMap) -> OperatorBundle:
    """
    Assemble the linear element matrices on periodic degrees of freedom.

    All element integrals are computed in closed form.

    Args:
        mesh: Unit cell mesh.
        dofs: Periodic degrees of freedom of ``mesh``.

    Returns:
        The assembled matrices.

    Examples:
        >>> from phcsim.assembly import assemble
        >>> from phcsim.mesh import build_periodic_dof_map, generate_structured
        >>> mesh = generate_structured(4, 0.3)
        >>> bundle = assemble(mesh, build_periodic_dof_map(mesh))
        >>> bundle.A.shape
        (16, 16)
        >>> round(bundle.M.sum(), 12)
        1.0

    """
    if len(dofs.dof_of_vertex) != mesh.n_vertices:
        msg = (
            f"the DOF map has {len(dofs.dof_of_vertex)} entries but the mesh "
            f"has {mesh.n_vertices} vertices"
        )
        raise ValueError(msg)

    areas = mesh.areas[:, np.newaxis, np.newaxis]
    grad_x, grad_y = _element_gradients(mesh)

    stiffness = areas * (
        grad_x[:, :, np.newaxis] * grad_x[:, np.newaxis, :]
        + grad_y[:, :, np.newaxis] * grad_y[:, np.newaxis, :]
    )
    mass = areas * (np.ones((3, 3)) + np.eye(3)) / 12

    # ∫λⱼ = |T|/3, so the entry only depends on the test function
    convection_x = np.repeat(grad_x[:, :, np.newaxis], 3, axis=2) * areas / 3
    convection_y = np.repeat(grad_y[:, :, np.newaxis], 3, axis=2) * areas / 3

    element_dofs = dofs.dof_of_vertex[mesh.triangles]
    rows = np.repeat(element_dofs[:, :, np.newaxis], 3, axis=2)
    cols = np.repeat(element_dofs[:, np.newaxis, :], 3, axis=1)

    inclusion = mesh.material_tag == Material.INCLUSION
    background = ~inclusion
    n_dofs = dofs.n_dofs

    bundle = OperatorBundle(
        A=_scatter(stiffness, rows, cols, n_dofs),
        Sx=_scatter(convection_x, rows, cols, n_dofs),
        Sy=_scatter(convection_y, rows, cols, n_dofs),
        M_a=_scatter(
            mass[background], rows[background], cols[background], n_dofs,
        ),
        M_b=_scatter(
            mass[inclusion], rows[inclusion], cols[inclusion], n_dofs,
        ),
        n_dofs=n_dofs,
        mesh_h=mesh.h,
    )

    logger.info(
        "Assembled %d DOFs from %d triangles (%d in the inclusion), h=%.4g",
        n_dofs,
        mesh.n_triangles,
        int(inclusion.sum()),
        mesh.h,
    )
    return bundle


def operator_at(
    bundle: OperatorBundle,
    k: Sequence[float],
    model: DielectricModel,
    omega: complex,
    *,
    guard: float = DEFAULT_POLE_GUARD,
) -> sp.csr_matrix:
    """
    Evaluate the discrete operator.

    Computes ``T(ω) = A + 2i(k₁Sx + k₂Sy) + |k|²M - ω²(ε_a·M_a + ε_b(ω)·M_b)``
    in reduced units (``a = c = 1``).

    Args:
        bundle: Assembled matrices.
        k: Bloch wavevector.
        model: Permittivity model.
        omega: Complex frequency ``ω·a/c``.
        guard: Minimum admitted distance to a pole of the model.

    Returns:
        The sparse complex matrix ``T(ω)``.

    Raises:
        PoleProximityError: If ``omega`` is too close to a pole.

    """
    return bundle.at_wavevector(k, model, guard=guard).evaluate(omega)
