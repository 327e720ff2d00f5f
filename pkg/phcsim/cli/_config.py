"""Run configuration files of the command line tool."""

from __future__ import annotations

import configparser
import dataclasses
import math
import pathlib
import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Final

from .._exceptions import ConfigError
from ..bands import NAMED_POINTS, KPath
from ..dielectric import DEFAULT_POLE_GUARD, DielectricModel, build_model
from ..mesh import (
    UnitCellMesh,
    generate_structured,
    radius_from_filling_fraction,
    read_mesh,
)
from ..presets import get_preset
from ..sim import Box, SearchRegion, SimConfig, admissible_tiling

if TYPE_CHECKING:
    import os
    from collections.abc import Callable, Mapping

#: Artifact formats the ``bands`` command can emit.
OUTPUT_FORMATS: Final = frozenset({"csv", "svg", "json"})

_ROOT_SECTION: Final = "__root__"

_KNOWN_KEYS: Final = frozenset({
    "preset",
    "geometry.r",
    "geometry.filling_fraction",
    "material.kind",
    "material.eps_background",
    "mesh.n",
    "mesh.node_file",
    "mesh.ele_file",
    "kpath.vertices",
    "kpath.samples_per_segment",
    "kpath.labels",
    "search.box",
    "search.center",
    "search.half_side",
    "search.delta0",
    "search.beta0",
    "search.m0",
    "search.seed",
    "search.max_level",
    "search.max_frontier",
    "search.workers",
    "search.solve_tol",
    "search.pole_guard",
    "search.min_tile_half_side",
    "output.dir",
    "output.formats",
    "converge.n0",
    "converge.levels",
    "converge.k",
    "converge.center",
    "converge.half_side",
    "converge.target",
    "indicator_map.k",
})

# An explicit key of a group discards the preset values of the other keys.
_EXCLUSIVE_GROUPS: Final = (
    ("geometry.r", "geometry.filling_fraction"),
    ("search.box", "search.center", "search.half_side"),
    ("converge.center", "converge.half_side"),
)

_PI_NUMBER: Final = re.compile(
    r"^(?P<sign>[+-]?)(?P<coef>(\d+\.?\d*|\.\d+)(e[+-]?\d+)?)?\s*\*?\s*pi"
    r"(\s*/\s*(?P<div>\d+\.?\d*))?$",
    re.IGNORECASE,
)


def parse_float(text: str) -> float:
    """
    Parse a real number, possibly written with ``pi``.

    Examples:
        >>> from phcsim.cli import parse_float
        >>> parse_float("2pi") == 2 * math.pi
        True
        >>> parse_float("-pi/2") == -math.pi / 2
        True
        >>> parse_float("0.25")
        0.25

    """
    stripped = text.strip()
    match = _PI_NUMBER.match(stripped)
    if match is None:
        try:
            return float(stripped)
        except ValueError:
            msg = f"invalid number {text!r}"
            raise ConfigError(msg) from None

    value = math.pi
    if match["coef"]:
        value *= float(match["coef"])
    if match["div"]:
        value /= float(match["div"])
    return -value if match["sign"] == "-" else value


def parse_complex(text: str) -> complex:
    """Parse a complex number such as ``1.5-0.02j``."""
    stripped = text.strip().replace(" ", "")
    try:
        return complex(parse_float(stripped))
    except ConfigError:
        pass

    try:
        return complex(stripped)
    except ValueError:
        msg = f"invalid complex number {text!r}"
        raise ConfigError(msg) from None


def parse_int(text: str) -> int:
    """Parse an integer."""
    try:
        return int(text.strip())
    except ValueError:
        msg = f"invalid integer {text!r}"
        raise ConfigError(msg) from None


def _split(text: str, separator: str = ",") -> list[str]:
    return [item.strip() for item in text.split(separator) if item.strip()]


def parse_point(text: str) -> tuple[float, float]:
    """Parse a wavevector, given by name (``M1``) or as ``k1, k2``."""
    stripped = text.strip()
    if stripped in NAMED_POINTS:
        return NAMED_POINTS[stripped]

    components = _split(stripped)
    if len(components) != 2:  # noqa: PLR2004
        msg = f"a wavevector needs two components, got {text!r}"
        raise ConfigError(msg)
    return parse_float(components[0]), parse_float(components[1])


def parse_vertices(
    text: str,
) -> tuple[tuple[tuple[float, float], ...], tuple[str, ...] | None]:
    """
    Parse path vertices.

    They are either names separated by commas (``M1, M3, M5, M1``) or
    coordinate pairs separated by semicolons (``pi, pi; 0, 0``).

    Returns:
        The vertices, and their names when they were given by name.

    """
    names = _split(text)
    if names and all(name in NAMED_POINTS for name in names):
        return tuple(NAMED_POINTS[name] for name in names), tuple(names)

    return tuple(parse_point(pair) for pair in _split(text, ";")), None


def parse_box(text: str) -> Box:
    """Parse a rectangle ``re_min, re_max, im_min, im_max``."""
    values = [parse_float(v) for v in _split(text)]
    if len(values) != 4:  # noqa: PLR2004
        msg = f"a box needs 4 values, got {text!r}"
        raise ConfigError(msg)

    re_min, re_max, im_min, im_max = values
    if not (re_min < re_max and im_min < im_max):
        msg = (
            "a box must have re_min < re_max and im_min < im_max, "
            f"got {text!r}"
        )
        raise ConfigError(msg)
    return re_min, re_max, im_min, im_max


@dataclass(frozen=True)
class MeshSettings:
    """Structured mesh size, or files of an imported mesh."""

    n: int | None = None
    node_file: pathlib.Path | None = None
    ele_file: pathlib.Path | None = None

    def build(self, r: float) -> UnitCellMesh:
        """Generate or read the mesh."""
        if self.n is not None:
            return generate_structured(self.n, r)
        assert self.node_file is not None  # noqa: S101
        assert self.ele_file is not None  # noqa: S101
        return read_mesh(self.node_file, self.ele_file, r)


@dataclass(frozen=True)
class SearchSettings:
    """
    Where and how eigenvalues are searched.

    Either ``box`` is set, and the rectangle is tiled by admissible squares,
    or ``center`` and ``half_side`` give a single square.

    """

    box: Box | None = None
    center: complex | None = None
    half_side: float | None = None
    sim: SimConfig = field(default_factory=SimConfig)
    pole_guard: float = DEFAULT_POLE_GUARD
    min_tile_half_side: float = 0.05

    def regions(self, model: DielectricModel) -> list[SearchRegion]:
        """Squares searched for the given permittivity."""
        if self.box is None:
            assert self.center is not None  # noqa: S101
            assert self.half_side is not None  # noqa: S101
            return [SearchRegion(self.center, self.half_side)]

        return admissible_tiling(
            self.box,
            lambda disk: model.region_is_holomorphic(disk, self.pole_guard),
            min_half_side=self.min_tile_half_side,
        )


@dataclass(frozen=True)
class OutputSettings:
    """Directory and formats of the artifacts."""

    directory: pathlib.Path
    formats: frozenset[str] = frozenset({"csv", "svg"})


@dataclass(frozen=True)
class ConvergeSettings:
    """Parameters of the ``converge`` command."""

    n0: int = 10
    levels: int = 4
    k: tuple[float, float] = NAMED_POINTS["M1"]
    region: SearchRegion | None = None
    target: complex | None = None


@dataclass(frozen=True)
class RunConfig:
    """
    Complete description of a run.

    Attributes:
        radius: Disc radius.
        model: Permittivity of the disc.
        mesh: Mesh source.
        kpath: Path of the band diagram.
        search: Search regions and parameters.
        output: Artifacts to produce.
        converge: Parameters of mesh convergence studies.
        indicator_map_k: Wavevector of the indicator map.
        preset: Name of the preset the run is based on.

    """

    radius: float
    model: DielectricModel
    mesh: MeshSettings
    kpath: KPath
    search: SearchSettings
    output: OutputSettings
    converge: ConvergeSettings = ConvergeSettings()
    indicator_map_k: tuple[float, float] = NAMED_POINTS["M1"]
    preset: str | None = None

    def with_overrides(
        self,
        *,
        seed: int | None = None,
        workers: int | None = None,
    ) -> RunConfig:
        """Replace the seed or the number of workers."""
        changes: dict[str, Any] = {}
        if seed is not None:
            changes["rng_seed"] = seed
        if workers is not None:
            changes["workers"] = workers
        if not changes:
            return self

        try:
            sim = dataclasses.replace(self.search.sim, **changes)
        except ValueError as error:
            raise ConfigError(str(error)) from error
        return dataclasses.replace(
            self,
            search=dataclasses.replace(self.search, sim=sim),
        )


def read_settings(text: str) -> dict[str, str]:
    """
    Flatten a run file into dotted keys.

    Keys may be dotted (``search.delta0 = 0.01``) or grouped below an
    INI section header (``[search]``). ``#`` starts a comment.

    """
    parser = configparser.ConfigParser(
        interpolation=None,
        inline_comment_prefixes=("#",),
        comment_prefixes=("#",),
        delimiters=("=",),
    )
    parser.optionxform = str  # type: ignore[assignment, method-assign]
    try:
        parser.read_string(f"[{_ROOT_SECTION}]\n{text}")
    except configparser.Error as error:
        msg = f"invalid run file: {error}"
        raise ConfigError(msg) from error

    settings = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            name = key if section == _ROOT_SECTION else f"{section}.{key}"
            if name in settings:
                msg = f"key {name!r} is given twice"
                raise ConfigError(msg)
            settings[name] = value.strip()

    return settings


def merge_preset(settings: Mapping[str, str]) -> dict[str, str]:
    """Fill in the keys of the preset named by ``preset``, if any."""
    name = settings.get("preset")
    if not name:
        return dict(settings)

    try:
        defaults = get_preset(name).settings()
    except ValueError as error:
        raise ConfigError(str(error)) from error

    if "material.kind" in settings:
        defaults = {
            k: v for k, v in defaults.items() if not k.startswith("material.")
        }
    for group in _EXCLUSIVE_GROUPS:
        if any(key in settings for key in group):
            for key in group:
                defaults.pop(key, None)

    return {**defaults, **settings}


class _Settings:
    """Typed access to flat settings, remembering which keys were read."""

    def __init__(self, settings: Mapping[str, str]) -> None:
        self._settings = settings

    def __contains__(self, key: str) -> bool:
        return key in self._settings

    def get(
        self,
        key: str,
        parse: Callable[[str], Any],
        default: Any = None,  # noqa: ANN401
    ) -> Any:  # noqa: ANN401
        if key not in self._settings:
            return default
        try:
            return parse(self._settings[key])
        except ConfigError as error:
            msg = f"{key}: {error}"
            raise ConfigError(msg) from error

    def require(self, key: str, parse: Callable[[str], Any]) -> Any:  # noqa: ANN401
        if key not in self._settings:
            msg = f"missing required key {key!r}"
            raise ConfigError(msg)
        return self.get(key, parse)

    def prefixed(self, prefix: str) -> dict[str, str]:
        return {
            key.removeprefix(prefix): value
            for key, value in self._settings.items()
            if key.startswith(prefix)
        }


def _resolve(base_dir: pathlib.Path) -> Callable[[str], pathlib.Path]:
    def resolve(text: str) -> pathlib.Path:
        path = pathlib.Path(text.strip()).expanduser()
        return path if path.is_absolute() else base_dir / path

    return resolve


def _build_radius(settings: _Settings) -> float:
    r = settings.get("geometry.r", parse_float)
    f = settings.get("geometry.filling_fraction", parse_float)
    if (r is None) == (f is None):
        msg = "give exactly one of geometry.r and geometry.filling_fraction"
        raise ConfigError(msg)
    if r is not None:
        return float(r)
    try:
        return radius_from_filling_fraction(f)
    except ValueError as error:
        raise ConfigError(str(error)) from error


def _build_model(settings: _Settings) -> DielectricModel:
    kind = settings.require("material.kind", str.strip)
    params = {
        name: parse_float(value)
        for name, value in settings.prefixed("material.").items()
        if name != "kind"
    }
    try:
        return build_model(kind, params)
    except ValueError as error:
        msg = f"material: {error}"
        raise ConfigError(msg) from error


def _build_mesh(
    settings: _Settings,
    resolve: Callable[[str], pathlib.Path],
) -> MeshSettings:
    n = settings.get("mesh.n", parse_int)
    node_file = settings.get("mesh.node_file", resolve)
    ele_file = settings.get("mesh.ele_file", resolve)
    has_files = node_file is not None or ele_file is not None

    if n is not None and has_files:
        msg = "give either mesh.n or mesh.node_file and mesh.ele_file, not both"
        raise ConfigError(msg)
    if n is None and not has_files:
        msg = "missing mesh: give mesh.n or mesh.node_file and mesh.ele_file"
        raise ConfigError(msg)
    if n is not None:
        if n < 1:
            msg = f"mesh.n must be positive, got {n}"
            raise ConfigError(msg)
        return MeshSettings(n=n)

    if node_file is None or ele_file is None:
        msg = "mesh.node_file and mesh.ele_file must be given together"
        raise ConfigError(msg)
    for path in (node_file, ele_file):
        if not path.is_file():
            msg = f"mesh file {path} does not exist"
            raise ConfigError(msg)
    return MeshSettings(node_file=node_file, ele_file=ele_file)


def _build_kpath(settings: _Settings) -> KPath:
    vertices, names = settings.get(
        "kpath.vertices",
        parse_vertices,
        default=(KPath().vertices, None),
    )
    labels = settings.get("kpath.labels", lambda t: tuple(_split(t)), names)
    samples = settings.get("kpath.samples_per_segment", parse_int, 10)
    try:
        return KPath(
            vertices=vertices,
            samples_per_segment=samples,
            labels=labels,
        )
    except ValueError as error:
        msg = f"kpath: {error}"
        raise ConfigError(msg) from error


def _build_search(settings: _Settings) -> SearchSettings:
    box = settings.get("search.box", parse_box)
    center = settings.get("search.center", parse_complex)
    half_side = settings.get("search.half_side", parse_float)

    if box is not None and (center is not None or half_side is not None):
        msg = "give either search.box or search.center and search.half_side"
        raise ConfigError(msg)
    if box is None and (center is None or half_side is None):
        msg = (
            "missing search region: give search.box or search.center and "
            "search.half_side"
        )
        raise ConfigError(msg)

    defaults = SimConfig()
    try:
        sim = SimConfig(
            delta0=settings.get("search.delta0", parse_float, defaults.delta0),
            beta0=settings.get("search.beta0", parse_float, defaults.beta0),
            m0=settings.get("search.m0", parse_int, defaults.m0),
            rng_seed=settings.get("search.seed", parse_int, defaults.rng_seed),
            max_level=settings.get(
                "search.max_level", parse_int, defaults.max_level,
            ),
            max_frontier=settings.get(
                "search.max_frontier", parse_int, defaults.max_frontier,
            ),
            workers=settings.get("search.workers", parse_int, defaults.workers),
            solve_tol=settings.get(
                "search.solve_tol", parse_float, defaults.solve_tol,
            ),
        )
        if half_side is not None:
            SearchRegion(center, half_side)
    except ValueError as error:
        msg = f"search: {error}"
        raise ConfigError(msg) from error

    return SearchSettings(
        box=box,
        center=center,
        half_side=half_side,
        sim=sim,
        pole_guard=settings.get(
            "search.pole_guard", parse_float, DEFAULT_POLE_GUARD,
        ),
        min_tile_half_side=settings.get(
            "search.min_tile_half_side", parse_float, 0.05,
        ),
    )


def _build_output(
    settings: _Settings,
    resolve: Callable[[str], pathlib.Path],
) -> OutputSettings:
    formats = settings.get(
        "output.formats",
        lambda t: frozenset(f.lower() for f in _split(t)),
        frozenset({"csv", "svg"}),
    )
    unknown = formats - OUTPUT_FORMATS
    if unknown:
        msg = (
            f"unknown output formats {sorted(unknown)} "
            f"(expected some of {sorted(OUTPUT_FORMATS)})"
        )
        raise ConfigError(msg)

    return OutputSettings(
        directory=settings.get("output.dir", resolve, resolve("output")),
        formats=formats,
    )


def _build_converge(settings: _Settings) -> ConvergeSettings:
    center = settings.get("converge.center", parse_complex)
    half_side = settings.get("converge.half_side", parse_float)
    if (center is None) != (half_side is None):
        msg = "converge.center and converge.half_side must be given together"
        raise ConfigError(msg)

    levels = settings.get("converge.levels", parse_int, 4)
    n0 = settings.get("converge.n0", parse_int, 10)
    if levels < 2:  # noqa: PLR2004
        msg = f"converge.levels must be at least 2, got {levels}"
        raise ConfigError(msg)
    if n0 < 1:
        msg = f"converge.n0 must be positive, got {n0}"
        raise ConfigError(msg)

    try:
        region = None if center is None else SearchRegion(center, half_side)
    except ValueError as error:
        msg = f"converge: {error}"
        raise ConfigError(msg) from error

    return ConvergeSettings(
        n0=n0,
        levels=levels,
        k=settings.get("converge.k", parse_point, NAMED_POINTS["M1"]),
        region=region,
        target=settings.get("converge.target", parse_complex),
    )


def parse_config(
    text: str,
    *,
    base_dir: os.PathLike[str] | str = ".",
) -> RunConfig:
    """
    Parse the text of a run file.

    Args:
        text: Content of the run file.
        base_dir: Directory against which relative paths are resolved.

    Returns:
        The validated configuration.

    Raises:
        ConfigError: If a key is unknown, missing or invalid.

    Examples:
        >>> from phcsim.cli import parse_config
        >>> config = parse_config(
        ...     "preset = dielectric-rods\\nmesh.n = 10\\nsearch.delta0 = 0.02",
        ... )
        >>> config.radius, config.model
        (0.378, Constant(eps_background=1.0, eps_b=8.9))
        >>> config.search.sim.delta0
        0.02

    """
    raw = read_settings(text)
    unknown = sorted(
        key for key in raw
        if key not in _KNOWN_KEYS and not key.startswith("material.")
    )
    if unknown:
        msg = f"unknown keys {unknown}"
        raise ConfigError(msg)

    settings = _Settings(merge_preset(raw))
    resolve = _resolve(pathlib.Path(base_dir))

    return RunConfig(
        radius=_build_radius(settings),
        model=_build_model(settings),
        mesh=_build_mesh(settings, resolve),
        kpath=_build_kpath(settings),
        search=_build_search(settings),
        output=_build_output(settings, resolve),
        converge=_build_converge(settings),
        indicator_map_k=settings.get(
            "indicator_map.k", parse_point, NAMED_POINTS["M1"],
        ),
        preset=raw.get("preset"),
    )


def load_config(path: os.PathLike[str] | str) -> RunConfig:
    """Read a run file. Relative paths are resolved against its directory."""
    path = pathlib.Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        msg = f"cannot read run file {path}: {error}"
        raise ConfigError(msg) from error
    return parse_config(text, base_dir=path.parent)
