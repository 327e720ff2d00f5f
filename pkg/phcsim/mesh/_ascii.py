"""Reader and writer of the ASCII node and element formats."""

from __future__ import annotations

import pathlib
from typing import TYPE_CHECKING, Any

import numpy as np
import numpy.typing as npt

from .._exceptions import MeshParseError
from ._mesh import Material, UnitCellMesh, tag_by_centroid
from ._periodic import build_periodic_dof_map

if TYPE_CHECKING:
    import os
    from collections.abc import Iterator


class MeshReaderASCII:
    """
    Reader for whitespace-delimited mesh files.

    Blank lines and everything after a ``#`` are ignored.

    """

    def __init__(self, text: str, *, name: str) -> None:
        self.name = name
        self._lines: Iterator[tuple[int, list[str]]] = (
            (number, stripped.split())
            for number, line in enumerate(text.splitlines(), start=1)
            if (stripped := line.split("#", 1)[0].strip())
        )
        self._line_number = 0

    def _error(self, problem: str) -> MeshParseError:
        return MeshParseError(f"{self.name}, line {self._line_number}: {problem}")

    def _readline(self) -> list[str]:
        """Read the fields of the next non-empty line."""
        try:
            self._line_number, fields = next(self._lines)
        except StopIteration:
            msg = "unexpected end of file"
            raise self._error(msg) from None
        return fields

    def _parse_numbers(
        self,
        fields: list[str],
        converter: type[int] | type[float],
    ) -> list[Any]:
        try:
            return [converter(field) for field in fields]
        except ValueError:
            msg = f"expected {converter.__name__} values, got {fields}"
            raise self._error(msg) from None

    def _parse_header(self, expected_width: int) -> list[int]:
        header = self._parse_numbers(self._readline(), int)
        if len(header) < 2 or header[0] < 0 or header[1] != expected_width:  # noqa: PLR2004
            msg = f"invalid header {header}"
            raise self._error(msg)
        return header

    def _parse_index(self, value: str, expected: int) -> None:
        index = self._parse_numbers([value], int)[0]
        if index != expected:
            msg = f"expected entry number {expected}, got {index}"
            raise self._error(msg)

    def parse_nodes(self) -> npt.NDArray[np.float64]:
        """Parse a node file."""
        n_vertices, _ = self._parse_header(expected_width=2)[:2]
        vertices = np.empty((n_vertices, 2), dtype=np.float64)

        for i in range(n_vertices):
            fields = self._readline()
            if len(fields) != 3:  # noqa: PLR2004
                msg = f"expected '<index> <x1> <x2>', got {fields}"
                raise self._error(msg)
            self._parse_index(fields[0], i + 1)
            vertices[i] = self._parse_numbers(fields[1:], float)

        return vertices

    def parse_elements(
        self,
        n_vertices: int,
    ) -> tuple[npt.NDArray[np.intp], npt.NDArray[np.int8] | None]:
        """Parse an element file, returning 0-based triangles and regions."""
        header = self._parse_header(expected_width=3)
        n_attributes = header[2] if len(header) > 2 else 0  # noqa: PLR2004
        if n_attributes not in {0, 1}:
            msg = f"at most one region attribute is supported, got {n_attributes}"
            raise self._error(msg)

        n_triangles = header[0]
        triangles = np.empty((n_triangles, 3), dtype=np.intp)
        regions = np.empty(n_triangles, dtype=np.int8)

        for i in range(n_triangles):
            fields = self._readline()
            if len(fields) != 4 + n_attributes:
                msg = f"expected {4 + n_attributes} fields, got {fields}"
                raise self._error(msg)
            self._parse_index(fields[0], i + 1)

            corners = self._parse_numbers(fields[1:4], int)
            if min(corners) < 1 or max(corners) > n_vertices:
                msg = f"vertex index out of range 1..{n_vertices}: {corners}"
                raise self._error(msg)
            triangles[i] = corners

            if n_attributes:
                region = self._parse_numbers(fields[4:5], int)[0]
                if region not in {Material.BACKGROUND, Material.INCLUSION}:
                    msg = f"region attribute must be 0 or 1, got {region}"
                    raise self._error(msg)
                regions[i] = region

        return triangles - 1, regions if n_attributes else None

    def check_complete(self) -> None:
        """Check that nothing follows the declared entries."""
        extra = next(self._lines, None)
        if extra is not None:
            self._line_number = extra[0]
            msg = "unexpected content after the last entry"
            raise self._error(msg)


def import_mesh(nodes: str, elements: str, r: float) -> UnitCellMesh:
    """
    Build a mesh from the contents of a node file and an element file.

    Args:
        nodes: Node file contents: a ``<n_vertices> 2`` header followed by
            ``<index> <x1> <x2>`` lines.
        elements: Element file contents: a ``<n_triangles> 3 <n_attrs>``
            header followed by ``<index> <v1> <v2> <v3> [<region>]`` lines.
            Indices are 1-based.
        r: Radius of the disc. Used to tag triangles when the element file
            has no region attribute.

    Returns:
        The mesh. Its periodic boundary pairing has been checked.

    Raises:
        MeshParseError: If the files are malformed.
        InvalidGeometryError: If the triangulation is not valid.
        NonMatchingBoundaryError: If opposite edges do not pair.

    """
    node_reader = MeshReaderASCII(nodes, name="node file")
    vertices = node_reader.parse_nodes()
    node_reader.check_complete()

    element_reader = MeshReaderASCII(elements, name="element file")
    triangles, regions = element_reader.parse_elements(len(vertices))
    element_reader.check_complete()

    mesh = UnitCellMesh(
        vertices=vertices,
        triangles=triangles,
        material_tag=(
            tag_by_centroid(vertices, triangles, r)
            if regions is None
            else regions
        ),
        disc_radius=r,
    )
    build_periodic_dof_map(mesh)
    return mesh


def export_mesh(mesh: UnitCellMesh) -> tuple[str, str]:
    """
    Serialize a mesh as node and element file contents.

    The element file carries the material tags as region attribute, so
    that :func:`import_mesh` reproduces the mesh exactly.

    """
    node_lines = [f"{mesh.n_vertices} 2"]
    node_lines.extend(
        f"{i} {x!r} {y!r}"
        for i, (x, y) in enumerate(mesh.vertices.tolist(), start=1)
    )

    element_lines = [f"{mesh.n_triangles} 3 1"]
    element_lines.extend(
        f"{i} {a + 1} {b + 1} {c + 1} {tag}"
        for i, ((a, b, c), tag) in enumerate(
            zip(mesh.triangles.tolist(), mesh.material_tag.tolist()),
            start=1,
        )
    )

    return "\n".join(node_lines) + "\n", "\n".join(element_lines) + "\n"


def read_mesh(
    node_file: os.PathLike[str] | str,
    ele_file: os.PathLike[str] | str,
    r: float,
) -> UnitCellMesh:
    """Read a mesh from a node file and an element file."""
    return import_mesh(
        pathlib.Path(node_file).read_text(encoding="ascii"),
        pathlib.Path(ele_file).read_text(encoding="ascii"),
        r,
    )


def write_mesh(
    mesh: UnitCellMesh,
    node_file: os.PathLike[str] | str,
    ele_file: os.PathLike[str] | str,
) -> None:
    """Write a mesh to a node file and an element file."""
    nodes, elements = export_mesh(mesh)
    pathlib.Path(node_file).write_text(nodes, encoding="ascii", newline="\n")
    pathlib.Path(ele_file).write_text(elements, encoding="ascii", newline="\n")
