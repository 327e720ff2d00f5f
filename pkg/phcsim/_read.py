"""Functions reading back the artifacts of a run."""
from __future__ import annotations

import pathlib
from typing import TYPE_CHECKING, Any

import numpy as np
import pandas as pd
import scipy.sparse as sp

from .bands import BAND_COLUMNS, BandDiagram, ConvergenceReport
from .sim import IndicatorRecord

if TYPE_CHECKING:
    import os
    from collections.abc import Mapping


def read_bands_csv(
    path: os.PathLike[Any] | str,
    *,
    metadata: Mapping[str, Any] | None = None,
) -> BandDiagram:
    """
    Read a band diagram written by :func:`phcsim.write_bands_csv`.

    Args:
        path: CSV file.
        metadata: Metadata to attach, as the CSV file carries none.

    Returns:
        The band diagram. Its records are identical to those written.

    """
    frame = pd.read_csv(
        path,
        float_precision="round_trip",
        dtype={"segment_index": np.int64, "band_index": np.int64},
    )
    return BandDiagram.from_frame(frame[list(BAND_COLUMNS)], metadata=metadata)


def read_convergence_csv(path: os.PathLike[Any] | str) -> ConvergenceReport:
    """Read a convergence report written by :func:`phcsim.write_convergence_csv`."""
    frame = pd.read_csv(path, float_precision="round_trip")
    return ConvergenceReport.from_frame(frame)


def read_indicator_map(path: os.PathLike[Any] | str) -> list[IndicatorRecord]:
    """Read an indicator map written by :func:`phcsim.write_indicator_map`."""
    records = []
    text = pathlib.Path(path).read_text(encoding="utf-8")
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue

        fields = stripped.split()
        if len(fields) != 5:  # noqa: PLR2004
            msg = f"line {number}: expected 5 fields, got {len(fields)}"
            raise ValueError(msg)

        level, re, im, half_side, value = fields
        records.append(IndicatorRecord(
            level=int(level),
            center=complex(float(re), float(im)),
            half_side=float(half_side),
            indicator=float(value),
        ))

    return records


def read_matrix_triplets(path: os.PathLike[Any] | str) -> sp.csr_matrix:
    """Read a matrix written by :func:`phcsim.write_matrix_triplets`."""
    lines = pathlib.Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("#"):
        msg = "missing '# rows cols nnz' header"
        raise ValueError(msg)

    n_rows, n_cols, nnz = (int(f) for f in lines[0][1:].split())
    entries = np.loadtxt(lines[1:], ndmin=2) if nnz else np.empty((0, 4))
    if len(entries) != nnz:
        msg = f"expected {nnz} entries, got {len(entries)}"
        raise ValueError(msg)

    return sp.coo_matrix(
        (
            entries[:, 2] + 1j * entries[:, 3],
            (entries[:, 0].astype(np.intp), entries[:, 1].astype(np.intp)),
        ),
        shape=(n_rows, n_cols),
    ).tocsr()
