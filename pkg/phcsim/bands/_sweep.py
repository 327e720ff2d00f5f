from __future__ import annotations

import dataclasses
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Final

import numpy as np
import pandas as pd

from .._exceptions import (
    BudgetExceededError,
    PoleProximityError,
    RegionNotAdmissibleError,
    SingularSystemError,
)
from ..assembly import assemble
from ..dielectric import DEFAULT_POLE_GUARD
from ..mesh import build_periodic_dof_map
from ..sim import SearchRegion, search
from ._kpath import KPath, KSample

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from ..assembly import OperatorBundle
    from ..dielectric import DielectricModel
    from ..mesh import UnitCellMesh
    from ..sim import Box, SimConfig

logger = logging.getLogger(__name__)

#: Columns of the tabular form of a band diagram.
BAND_COLUMNS: Final = (
    "segment_index",
    "path_param",
    "k1",
    "k2",
    "band_index",
    "re_omega_over_c",
    "im_omega_over_c",
    "re_omega_over_2pic",
)


def sort_eigenvalues(values: Sequence[complex]) -> tuple[complex, ...]:
    """Sort frequencies by real part, then by imaginary part."""
    return tuple(sorted(
        (complex(v) for v in values),
        key=lambda v: (v.real, v.imag),
    ))


@dataclass(frozen=True)
class BandRecord:
    """
    Eigenvalues found at one wavevector.

    Attributes:
        segment_index: Path segment of the wavevector.
        path_param: Arclength fraction along the path.
        k: Wavevector.
        eigenvalues: Frequencies ``ω·a/c``, sorted by real part and then
            imaginary part.

    """

    segment_index: int
    path_param: float
    k: tuple[float, float]
    eigenvalues: tuple[complex, ...]


@dataclass(frozen=True)
class BandDiagram:
    """
    Band structure along a path in the Brillouin zone.

    Attributes:
        records: One record per sampled wavevector, ordered along the path.
        metadata: Description of the run that produced the diagram.

    """

    records: tuple[BandRecord, ...]
    metadata: Mapping[str, Any] = field(default_factory=dict, compare=False)

    @property
    def n_bands(self) -> int:
        """Largest number of eigenvalues found at a single wavevector."""
        return max((len(r.eigenvalues) for r in self.records), default=0)

    def gaps(self) -> list[tuple[float, float]]:
        """
        Complete band gaps, as intervals of ``Re(ω)·a/(2πc)``.

        A gap lies between bands ``j`` and ``j + 1`` when the lowest value
        of the upper band exceeds the highest value of the lower one. Only
        wavevectors where both bands were found are considered.

        """
        gaps = []
        for band in range(self.n_bands - 1):
            pairs = [
                (r.eigenvalues[band].real, r.eigenvalues[band + 1].real)
                for r in self.records
                if len(r.eigenvalues) > band + 1
            ]
            if not pairs:
                continue
            top = max(lower for lower, _ in pairs) / (2 * math.pi)
            bottom = min(upper for _, upper in pairs) / (2 * math.pi)
            if bottom > top:
                gaps.append((top, bottom))
        return gaps

    def to_frame(self) -> pd.DataFrame:
        """
        Tabular form, with one row per eigenvalue.

        Wavevectors without eigenvalues keep one row with ``band_index``
        equal to -1 and missing frequencies.

        """
        rows: list[tuple[Any, ...]] = []
        for record in self.records:
            prefix = (
                record.segment_index,
                record.path_param,
                record.k[0],
                record.k[1],
            )
            if not record.eigenvalues:
                rows.append((*prefix, -1, math.nan, math.nan, math.nan))
            rows.extend(
                (
                    *prefix,
                    band,
                    omega.real,
                    omega.imag,
                    omega.real / (2 * math.pi),
                )
                for band, omega in enumerate(record.eigenvalues)
            )

        frame = pd.DataFrame(rows, columns=list(BAND_COLUMNS))
        return frame.astype({"segment_index": np.int64, "band_index": np.int64})

    @classmethod
    def from_frame(
        cls,
        frame: pd.DataFrame,
        metadata: Mapping[str, Any] | None = None,
    ) -> BandDiagram:
        """Rebuild a diagram from its tabular form."""
        missing = set(BAND_COLUMNS) - set(frame.columns)
        if missing:
            msg = f"missing band columns: {sorted(missing)}"
            raise ValueError(msg)

        records = []
        keys = ["segment_index", "path_param", "k1", "k2"]
        for (segment, param, k1, k2), group in frame.groupby(keys, sort=False):
            bands = group[group["band_index"] >= 0].sort_values("band_index")
            records.append(BandRecord(
                segment_index=int(segment),
                path_param=float(param),
                k=(float(k1), float(k2)),
                eigenvalues=tuple(
                    complex(re, im)
                    for re, im in zip(
                        bands["re_omega_over_c"],
                        bands["im_omega_over_c"],
                    )
                ),
            ))

        return cls(records=tuple(records), metadata=dict(metadata or {}))


def _in_box(omega: complex, box: Box) -> bool:
    return box[0] <= omega.real <= box[1] and box[2] <= omega.imag <= box[3]


def _solve_sample(
    bundle: OperatorBundle,
    model: DielectricModel,
    sample: KSample,
    regions: Sequence[SearchRegion],
    cfg: SimConfig,
    box: Box | None,
    guard: float,
) -> tuple[BandRecord, str | None]:
    fn = bundle.at_wavevector(sample.k, model, guard=guard)
    error_message = None
    try:
        estimates = search(fn, regions, cfg).estimates
    except (
        BudgetExceededError,
        PoleProximityError,
        SingularSystemError,
    ) as error:
        logger.warning("Search failed at k=%s: %s", sample.k, error)
        estimates = ()
        error_message = str(error)

    values = [
        e.value for e in estimates
        if box is None or _in_box(e.value, box)
    ]
    logger.info(
        "k=(%.4f, %.4f): %d eigenvalues",
        sample.k[0],
        sample.k[1],
        len(values),
    )

    record = BandRecord(
        segment_index=sample.segment_index,
        path_param=sample.path_param,
        k=sample.k,
        eigenvalues=sort_eigenvalues(values),
    )
    return record, error_message


def sweep_bands(  # noqa: PLR0913
    mesh: UnitCellMesh,
    model: DielectricModel,
    path: KPath,
    region: SearchRegion | Sequence[SearchRegion],
    cfg: SimConfig,
    *,
    box: Box | None = None,
    guard: float = DEFAULT_POLE_GUARD,
) -> BandDiagram:
    """
    Compute the band structure along a path.

    The matrices are assembled once. For every sampled wavevector the
    eigenvalues in the search region are located, and, if ``box`` is
    given, only those inside it are kept. Wavevectors are independent
    jobs, distributed over ``cfg.workers`` threads.

    Args:
        mesh: Unit cell mesh.
        model: Permittivity model.
        path: Path in the Brillouin zone.
        region: Square (or squares) searched at every wavevector.
        cfg: Search parameters.
        box: Optional rectangle to which the eigenvalues are restricted.
        guard: Minimum distance between the search circles and the poles.

    Returns:
        The band diagram. Searches that fail at one wavevector are listed
        under the ``"failures"`` metadata key and leave an empty record.

    Raises:
        RegionNotAdmissibleError: If a square is too close to a pole.

    """
    regions = [region] if isinstance(region, SearchRegion) else list(region)
    for square in regions:
        if not model.region_is_holomorphic(square, guard):
            msg = (
                f"the circle circumscribing {square} is within {guard} of a "
                f"pole of {model}"
            )
            raise RegionNotAdmissibleError(msg)

    bundle = assemble(mesh, build_periodic_dof_map(mesh))
    samples = path.samples()
    inner_cfg = dataclasses.replace(cfg, workers=1)

    def job(sample: KSample) -> tuple[BandRecord, str | None]:
        return _solve_sample(
            bundle, model, sample, regions, inner_cfg, box, guard,
        )

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
            outcomes = list(executor.map(job, samples))
    else:
        outcomes = [job(sample) for sample in samples]

    failures = [
        {
            "segment_index": record.segment_index,
            "path_param": record.path_param,
            "k": list(record.k),
            "error": error,
        }
        for record, error in outcomes
        if error is not None
    ]

    metadata = {
        "mesh_h": mesh.h,
        "n_dofs": bundle.n_dofs,
        "disc_radius": mesh.disc_radius,
        "model": {"kind": model.kind.value, **model.params()},
        "regions": [
            [s.center.real, s.center.imag, s.half_side] for s in regions
        ],
        "box": None if box is None else list(box),
        "config": dataclasses.asdict(cfg),
        "path": {
            "labels": list(path.labels or ()),
            "vertex_params": list(path.vertex_params()),
        },
        "failures": failures,
    }

    return BandDiagram(
        records=tuple(record for record, _ in outcomes),
        metadata=metadata,
    )
