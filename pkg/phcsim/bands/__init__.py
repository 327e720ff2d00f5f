"""Band structure sweeps and mesh convergence studies."""

from ._convergence import (
    CONVERGENCE_COLUMNS as CONVERGENCE_COLUMNS,
    ConvergenceReport as ConvergenceReport,
    ConvergenceRow as ConvergenceRow,
    convergence_study as convergence_study,
    relative_changes as relative_changes,
    track_nearest as track_nearest,
)
from ._kpath import (
    DEFAULT_PATH as DEFAULT_PATH,
    NAMED_POINTS as NAMED_POINTS,
    KPath as KPath,
    KSample as KSample,
    point_label as point_label,
)
from ._sweep import (
    BAND_COLUMNS as BAND_COLUMNS,
    BandDiagram as BandDiagram,
    BandRecord as BandRecord,
    sort_eigenvalues as sort_eigenvalues,
    sweep_bands as sweep_bands,
)
