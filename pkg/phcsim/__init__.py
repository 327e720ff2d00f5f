"""phcsim: band structures of dispersive photonic crystals."""
from __future__ import annotations

from importlib.resources import files
from typing import TYPE_CHECKING, Final

from . import (
    assembly as assembly,
    bands as bands,
    dielectric as dielectric,
    mesh as mesh,
    nep as nep,
    presets as presets,
    sim as sim,
    testing as testing,
)
from ._exceptions import (
    AmbiguousTrackingError as AmbiguousTrackingError,
    BudgetExceededError as BudgetExceededError,
    ConfigError as ConfigError,
    InvalidGeometryError as InvalidGeometryError,
    MeshParseError as MeshParseError,
    NonMatchingBoundaryError as NonMatchingBoundaryError,
    PhcsimError as PhcsimError,
    PoleProximityError as PoleProximityError,
    RegionNotAdmissibleError as RegionNotAdmissibleError,
    SingularSystemError as SingularSystemError,
)
from ._read import (
    read_bands_csv as read_bands_csv,
    read_convergence_csv as read_convergence_csv,
    read_indicator_map as read_indicator_map,
    read_matrix_triplets as read_matrix_triplets,
)
from ._write import (
    write_bands_csv as write_bands_csv,
    write_bands_json as write_bands_json,
    write_bands_svg as write_bands_svg,
    write_convergence_csv as write_convergence_csv,
    write_indicator_map as write_indicator_map,
    write_matrix_triplets as write_matrix_triplets,
)

if TYPE_CHECKING:
    from importlib.abc import Traversable


def _get_test_data_path() -> Traversable:
    return files(__name__) / "tests" / "data"


TESTDATA_PATH: Final[Traversable] = _get_test_data_path()
"""
Path of the test data.

"""

__version__ = "0.1.0.dev0"
