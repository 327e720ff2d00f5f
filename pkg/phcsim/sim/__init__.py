"""Contour integral spectral indicator search of eigenvalues."""

from ._indicator import (
    Box as Box,
    SearchRegion as SearchRegion,
    admissible_tiling as admissible_tiling,
    indicator as indicator,
    random_unit_vector as random_unit_vector,
)
from ._search import (
    DEFAULT_BETA0 as DEFAULT_BETA0,
    DEFAULT_DELTA0 as DEFAULT_DELTA0,
    DEFAULT_M0 as DEFAULT_M0,
    EigenvalueEstimate as EigenvalueEstimate,
    IndicatorRecord as IndicatorRecord,
    SearchResult as SearchResult,
    SimConfig as SimConfig,
    find_eigenvalues as find_eigenvalues,
    merge_terminal_squares as merge_terminal_squares,
    search as search,
)
