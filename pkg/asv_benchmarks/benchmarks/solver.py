"""Benchmarks for the assembly and the spectral indicator."""
import math

import numpy as np

import phcsim
from phcsim.sim import SearchRegion, indicator, random_unit_vector


class TimeAssembly:
    """Time that it takes to assemble the matrices of structured meshes."""

    params = [10, 20, 40, 80]
    param_names = ["n"]

    def setup(self, n: int) -> None:
        """Generate the mesh and its periodic numbering."""
        self.mesh = phcsim.mesh.generate_structured(n, 0.378)
        self.dofs = phcsim.mesh.build_periodic_dof_map(self.mesh)

    def time_assemble(self, n: int) -> None:  # noqa: ARG002
        """Assemble the stiffness, convection and mass matrices."""
        phcsim.assembly.assemble(self.mesh, self.dofs)


class TimeIndicator:
    """Time of one indicator evaluation, that is, ``m0`` sparse LU solves."""

    params = [10, 20, 40]
    param_names = ["n"]

    def setup(self, n: int) -> None:
        """Assemble the operator of the dielectric rods at M1."""
        mesh = phcsim.mesh.generate_structured(n, 0.378)
        bundle = phcsim.assembly.assemble(
            mesh,
            phcsim.mesh.build_periodic_dof_map(mesh),
        )
        self.fn = bundle.at_wavevector(
            (math.pi, math.pi),
            phcsim.dielectric.Constant(eps_b=8.9),
        )
        self.g = random_unit_vector(self.fn.dimension, np.random.default_rng(0))

    def time_indicator(self, n: int) -> None:  # noqa: ARG002
        """Evaluate the indicator of a square around the first band."""
        indicator(self.fn, SearchRegion(1.58, 0.15), self.g, 16)
