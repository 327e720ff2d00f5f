"""Functions writing the artifacts of a run."""
from __future__ import annotations

import json
import math
import pathlib
from typing import TYPE_CHECKING, Any, Final
from xml.sax.saxutils import escape

import numpy as np
import scipy.sparse as sp

if TYPE_CHECKING:
    import os
    from collections.abc import Iterable, Sequence

    from .bands import BandDiagram, ConvergenceReport
    from .sim import IndicatorRecord

#: Header of the indicator map files.
INDICATOR_MAP_HEADER: Final = "# level re_center im_center half_side indicator"

_SUBSCRIPTS: Final = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def _write_text(path: os.PathLike[Any] | str, text: str) -> None:
    pathlib.Path(path).write_text(text, encoding="utf-8", newline="\n")


def write_bands_csv(
    path: os.PathLike[Any] | str,
    diagram: BandDiagram,
) -> None:
    """
    Write a band diagram as CSV.

    Floats are written with enough digits to be read back exactly by
    :func:`phcsim.read_bands_csv`.

    """
    diagram.to_frame().to_csv(
        path,
        index=False,
        encoding="utf-8",
        lineterminator="\n",
    )


def write_convergence_csv(
    path: os.PathLike[Any] | str,
    report: ConvergenceReport,
) -> None:
    """Write a convergence report as CSV."""
    report.to_frame().to_csv(
        path,
        index=False,
        encoding="utf-8",
        lineterminator="\n",
    )


def write_bands_json(
    path: os.PathLike[Any] | str,
    diagram: BandDiagram,
) -> None:
    """Write a band diagram and its metadata as JSON."""
    content = {
        "metadata": diagram.metadata,
        "records": [
            {
                "segment_index": record.segment_index,
                "path_param": record.path_param,
                "k": list(record.k),
                "eigenvalues": [[w.real, w.imag] for w in record.eigenvalues],
            }
            for record in diagram.records
        ],
    }
    _write_text(path, json.dumps(content, indent=2) + "\n")


def write_indicator_map(
    path: os.PathLike[Any] | str,
    records: Iterable[IndicatorRecord],
) -> None:
    """
    Write the squares of a search whose indicator exceeded the threshold.

    Each row is ``level re(center) im(center) half_side indicator``.

    """
    lines = [INDICATOR_MAP_HEADER]
    lines.extend(
        f"{r.level} {r.center.real!r} {r.center.imag!r} "
        f"{r.half_side!r} {r.indicator!r}"
        for r in records
    )
    _write_text(path, "\n".join(lines) + "\n")


def write_matrix_triplets(
    path: os.PathLike[Any] | str,
    matrix: sp.spmatrix,
) -> None:
    """Write a sparse matrix as ``row col re im`` coordinate lines."""
    coo = sp.coo_matrix(matrix)
    data = coo.data.astype(np.complex128)

    lines = [f"# {coo.shape[0]} {coo.shape[1]} {coo.nnz}"]
    lines.extend(
        f"{i} {j} {v.real!r} {v.imag!r}"
        for i, j, v in zip(coo.row.tolist(), coo.col.tolist(), data.tolist())
    )
    _write_text(path, "\n".join(lines) + "\n")


def _even_ticks(low: float, high: float, count: int = 5) -> list[float]:
    return [low + (high - low) * i / (count - 1) for i in range(count)]


def bands_svg(
    diagram: BandDiagram,
    *,
    labels: Sequence[str] | None = None,
    vertex_params: Sequence[float] | None = None,
    width: int = 640,
    height: int = 480,
) -> str:
    """
    Draw the real parts of ``ω·a/(2πc)`` against the path parameter.

    Each band index is drawn as a polyline, interrupted where a wavevector
    has fewer eigenvalues. Tick labels default to the path stored in the
    diagram metadata.

    """
    path_info = diagram.metadata.get("path", {})
    labels = list(labels if labels is not None else path_info.get("labels", []))
    vertex_params = list(
        vertex_params
        if vertex_params is not None
        else path_info.get("vertex_params", []),
    )

    left, right, top, bottom = 70, 20, 20, 50
    plot_width = width - left - right
    plot_height = height - top - bottom

    values = [
        w.real / (2 * math.pi)
        for record in diagram.records
        for w in record.eigenvalues
    ]
    y_min, y_max = (min(values), max(values)) if values else (0.0, 1.0)
    if y_max - y_min < 1e-12:  # noqa: PLR2004
        y_min, y_max = y_min - 0.5, y_max + 0.5
    padding = 0.05 * (y_max - y_min)
    y_min, y_max = y_min - padding, y_max + padding

    def x_of(param: float) -> float:
        return left + param * plot_width

    def y_of(value: float) -> float:
        return top + (y_max - value) / (y_max - y_min) * plot_height

    elements = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="{left}" y="{top}" width="{plot_width}" '
        f'height="{plot_height}" fill="none" stroke="black"/>',
    ]

    for param, label in zip(vertex_params, labels):
        x = x_of(param)
        elements.append(
            f'<line x1="{x:.2f}" y1="{top}" x2="{x:.2f}" '
            f'y2="{top + plot_height}" stroke="#bbbbbb"/>',
        )
        elements.append(
            f'<text x="{x:.2f}" y="{top + plot_height + 20}" '
            f'text-anchor="middle">{escape(label.translate(_SUBSCRIPTS))}</text>',
        )

    for value in _even_ticks(y_min, y_max):
        y = y_of(value)
        elements.append(
            f'<text x="{left - 8}" y="{y + 4:.2f}" '
            f'text-anchor="end">{value:.3g}</text>',
        )
    elements.append(
        f'<text x="16" y="{top + plot_height / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + plot_height / 2:.2f})">'
        "ωa/2πc</text>",
    )

    for band in range(diagram.n_bands):
        run: list[str] = []
        runs = []
        for record in diagram.records:
            if len(record.eigenvalues) > band:
                value = record.eigenvalues[band].real / (2 * math.pi)
                run.append(f"{x_of(record.path_param):.2f},{y_of(value):.2f}")
            elif run:
                runs.append(run)
                run = []
        if run:
            runs.append(run)

        elements.extend(
            f'<polyline class="band-{band}" points="{" ".join(points)}" '
            'fill="none" stroke="navy"/>'
            for points in runs
        )

    elements.append("</svg>")
    return "\n".join(elements) + "\n"


def write_bands_svg(
    path: os.PathLike[Any] | str,
    diagram: BandDiagram,
    **kwargs: Any,  # noqa: ANN401
) -> None:
    """Write the drawing of :func:`bands_svg` to a file."""
    _write_text(path, bands_svg(diagram, **kwargs))
