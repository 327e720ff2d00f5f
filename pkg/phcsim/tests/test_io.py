"""Tests of the artifact files."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

import phcsim
from phcsim.assembly import assemble
from phcsim.bands import BandDiagram, BandRecord, ConvergenceReport, ConvergenceRow
from phcsim.mesh import build_periodic_dof_map, generate_structured
from phcsim.sim import IndicatorRecord


def _diagram() -> BandDiagram:
    return BandDiagram(
        records=(
            BandRecord(0, 0.0, (0.1 + 0.2, 1 / 3), (0.1 + 0.2j, 2 / 3 - 1e-9j)),
            BandRecord(0, 0.5, (0.7, 0.0), ()),
            BandRecord(1, 1.0, (1.0, 0.0), (1e-17 + 0j,)),
        ),
        metadata={
            "path": {"labels": ["M1", "M3"], "vertex_params": [0.0, 1.0]},
        },
    )


def test_bands_csv(tmp_path: Path) -> None:
    """The CSV file gives back the records exactly."""
    path = tmp_path / "bands.csv"
    diagram = _diagram()
    phcsim.write_bands_csv(path, diagram)

    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert header == (
        "segment_index,path_param,k1,k2,band_index,re_omega_over_c,"
        "im_omega_over_c,re_omega_over_2pic"
    )
    assert phcsim.read_bands_csv(path).records == diagram.records


def test_bands_json(tmp_path: Path) -> None:
    """The JSON file holds the metadata and the eigenvalues."""
    path = tmp_path / "bands.json"
    phcsim.write_bands_json(path, _diagram())

    content = json.loads(path.read_text(encoding="utf-8"))
    assert content["metadata"]["path"]["labels"] == ["M1", "M3"]
    assert content["records"][0]["eigenvalues"] == [
        [0.1, 0.2],
        [2 / 3, -1e-9],
    ]
    assert content["records"][1]["eigenvalues"] == []


def test_bands_svg(tmp_path: Path) -> None:
    """The drawing has one polyline per band and run of wavevectors."""
    path = tmp_path / "bands.svg"
    phcsim.write_bands_svg(path, _diagram())

    text = path.read_text(encoding="utf-8")
    assert text.startswith("<svg")
    assert text.rstrip().endswith("</svg>")
    assert text.count('class="band-0"') == 2
    assert text.count('class="band-1"') == 1
    assert "M₁" in text
    assert "M₃" in text


def test_convergence_csv(tmp_path: Path) -> None:
    """The convergence table is read back exactly."""
    report = ConvergenceReport(rows=(
        ConvergenceRow(h=0.1414, omega=1.6322 - 0.022j),
        ConvergenceRow(h=0.0707, omega=1.6384 - 0.0217j, xi=0.0038),
        ConvergenceRow(
            h=0.0354,
            omega=1.6398 - 0.0216j,
            xi=0.00085,
            order=2.1,
        ),
    ))
    path = tmp_path / "converge.csv"
    phcsim.write_convergence_csv(path, report)
    assert phcsim.read_convergence_csv(path) == report


def test_indicator_map(tmp_path: Path) -> None:
    """Indicator maps are read back exactly."""
    records = [
        IndicatorRecord(0, 3 + 0j, 1.5, 0.98),
        IndicatorRecord(1, 2.25 - 0.75j, 0.75, float("inf")),
    ]
    path = tmp_path / "indicator_map.txt"
    phcsim.write_indicator_map(path, records)

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("#")
    assert len(lines) == 3
    assert phcsim.read_indicator_map(path) == records


def test_indicator_map_errors(tmp_path: Path) -> None:
    """Rows with a wrong number of fields are reported."""
    path = tmp_path / "indicator_map.txt"
    path.write_text("# header\n0 1.0 0.0 0.5\n", encoding="utf-8")
    with pytest.raises(ValueError, match="(?i)line 2"):
        phcsim.read_indicator_map(path)


def test_matrix_triplets(tmp_path: Path) -> None:
    """Assembled matrices are written as exact coordinate triplets."""
    mesh = generate_structured(4, 0.3)
    bundle = assemble(mesh, build_periodic_dof_map(mesh))
    path = tmp_path / "Sx.txt"
    phcsim.write_matrix_triplets(path, bundle.Sx)

    assert path.read_text(encoding="utf-8").startswith(
        f"# 16 16 {bundle.Sx.nnz}\n",
    )
    matrix = phcsim.read_matrix_triplets(path)
    np.testing.assert_array_equal(matrix.toarray(), bundle.Sx.toarray())


def test_matrix_triplets_errors(tmp_path: Path) -> None:
    """Files without header or with missing entries are rejected."""
    path = tmp_path / "A.txt"
    path.write_text("0 0 1.0 0.0\n", encoding="utf-8")
    with pytest.raises(ValueError, match="(?i)header"):
        phcsim.read_matrix_triplets(path)

    path.write_text("# 2 2 2\n0 0 1.0 0.0\n", encoding="utf-8")
    with pytest.raises(ValueError, match="(?i)expected 2 entries"):
        phcsim.read_matrix_triplets(path)
