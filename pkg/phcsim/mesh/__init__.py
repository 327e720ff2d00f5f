"""Triangulations of the unit cell and their periodic degrees of freedom."""

from ._ascii import (
    MeshReaderASCII as MeshReaderASCII,
    export_mesh as export_mesh,
    import_mesh as import_mesh,
    read_mesh as read_mesh,
    write_mesh as write_mesh,
)
from ._mesh import (
    DISC_CENTER as DISC_CENTER,
    Material as Material,
    UnitCellMesh as UnitCellMesh,
    filling_fraction_from_radius as filling_fraction_from_radius,
    generate_structured as generate_structured,
    radius_from_filling_fraction as radius_from_filling_fraction,
    refine_uniform as refine_uniform,
)
from ._periodic import (
    PAIRING_TOLERANCE as PAIRING_TOLERANCE,
    PeriodicDofMap as PeriodicDofMap,
    build_periodic_dof_map as build_periodic_dof_map,
)
