"""Entry points of the ``phcsim`` command."""

from __future__ import annotations

import argparse
import logging
import math
from typing import TYPE_CHECKING, Final

from rich.logging import RichHandler

from .. import __version__
from .._exceptions import ConfigError, PhcsimError, RegionNotAdmissibleError
from .._write import (
    write_bands_csv,
    write_bands_json,
    write_bands_svg,
    write_convergence_csv,
    write_indicator_map,
    write_matrix_triplets,
)
from ..assembly import assemble
from ..bands import convergence_study, sweep_bands
from ..mesh import build_periodic_dof_map
from ..nep import HolomorphicMatrixFunction
from ..presets import PRESETS
from ..sim import SearchRegion, search
from ._config import load_config

if TYPE_CHECKING:
    import pathlib
    from collections.abc import Sequence

    from ..bands import BandDiagram, ConvergenceReport
    from ..sim import IndicatorRecord
    from ._config import RunConfig

logger = logging.getLogger(__name__)

LOG_FILE_NAME: Final = "run.log"
BANDS_CSV: Final = "bands.csv"
BANDS_SVG: Final = "bands.svg"
BANDS_JSON: Final = "bands.json"
CONVERGE_CSV: Final = "converge.csv"
INDICATOR_MAP: Final = "indicator_map.txt"
MATRICES_DIR: Final = "matrices"

#: Offset of the eigenvalue of the demo function from the square center,
#: relative to the half side.
DEMO_OFFSET: Final = 0.3141 + 0.1234j

_FILE_FORMAT: Final = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _output_dir(config: RunConfig) -> pathlib.Path:
    directory = config.output.directory
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def _regions(config: RunConfig) -> list[SearchRegion]:
    regions = config.search.regions(config.model)
    if not regions:
        msg = (
            "no square of the search box is far enough from the poles of "
            f"{config.model}"
        )
        raise RegionNotAdmissibleError(msg)
    logger.info("Searching %d squares", len(regions))
    return regions


def dump_matrices(config: RunConfig) -> None:
    """Write the assembled matrices of the run as coordinate triplets."""
    mesh = config.mesh.build(config.radius)
    bundle = assemble(mesh, build_periodic_dof_map(mesh))
    directory = _output_dir(config) / MATRICES_DIR
    directory.mkdir(exist_ok=True)
    for name, matrix in bundle.matrices().items():
        write_matrix_triplets(directory / f"{name}.txt", matrix)
    logger.info("Matrices written to %s", directory)


def run_bands(config: RunConfig) -> BandDiagram:
    """
    Compute the band diagram of a run and write its artifacts.

    Depending on ``output.formats``, writes ``bands.csv``, ``bands.svg``
    and ``bands.json`` to the output directory.

    """
    mesh = config.mesh.build(config.radius)
    logger.info(
        "Mesh with %d triangles, h=%.4g, r=%.4g",
        mesh.n_triangles,
        mesh.h,
        config.radius,
    )

    diagram = sweep_bands(
        mesh,
        config.model,
        config.kpath,
        _regions(config),
        config.search.sim,
        box=config.search.box,
        guard=config.search.pole_guard,
    )

    for lower, upper in diagram.gaps():
        logger.info("Band gap between %.4f and %.4f (ωa/2πc)", lower, upper)
    imaginary = [
        w.imag for record in diagram.records for w in record.eigenvalues
    ]
    if imaginary and max(imaginary) < 0:
        logger.info(
            "Every eigenvalue is damped (largest imaginary part %.4g)",
            max(imaginary),
        )

    directory = _output_dir(config)
    formats = config.output.formats
    if "csv" in formats:
        write_bands_csv(directory / BANDS_CSV, diagram)
    if "svg" in formats:
        write_bands_svg(directory / BANDS_SVG, diagram)
    if "json" in formats:
        write_bands_json(directory / BANDS_JSON, diagram)
    logger.info("Band diagram written to %s", directory)

    return diagram


def _log_against_reference(config: RunConfig, report: ConvergenceReport) -> None:
    preset = PRESETS.get(config.preset or "")
    if (
        preset is None
        or not preset.reference
        or config.converge.n0 != 10  # noqa: PLR2004
        or config.converge.k != preset.converge_k
    ):
        return

    for row, reference in zip(report.rows, preset.reference):
        logger.info(
            "h=%.4g: %.6f%+.6fj against %.6f%+.6fj published (%.2f%%)",
            row.h,
            row.omega.real,
            row.omega.imag,
            reference.real,
            reference.imag,
            100 * abs(row.omega - reference) / abs(reference),
        )


def run_converge(config: RunConfig) -> ConvergenceReport:
    """Track the first eigenvalue over refined meshes and write ``converge.csv``."""
    settings = config.converge
    region = settings.region
    if region is None:
        if config.search.box is not None:
            msg = (
                "converge.center and converge.half_side are required when "
                "the search is given as a box"
            )
            raise ConfigError(msg)
        region = _regions(config)[0]

    if config.mesh.n is None:
        logger.warning(
            "converge always uses structured meshes; the mesh files are "
            "ignored",
        )

    report = convergence_study(
        settings.n0,
        settings.levels,
        config.model,
        settings.k,
        region,
        config.search.sim,
        r=config.radius,
        target=settings.target,
        guard=config.search.pole_guard,
    )
    _log_against_reference(config, report)

    path = _output_dir(config) / CONVERGE_CSV
    write_convergence_csv(path, report)
    logger.info("Convergence table written to %s", path)
    return report


def demo_function(region: SearchRegion) -> HolomorphicMatrixFunction:
    """Scalar function with a single zero inside a square."""
    zero = region.center + DEMO_OFFSET * region.half_side
    return HolomorphicMatrixFunction.from_polynomial([[[-zero]], [[1]]])


def run_indicator_map(
    config: RunConfig,
    *,
    demo: bool = False,
) -> list[IndicatorRecord]:
    """
    Write the squares kept by the search at ``indicator_map.k``.

    With ``demo``, the operator is replaced by a scalar function with one
    zero, which makes the map a single chain of squares.

    """
    if demo:
        if config.search.box is not None:
            region = SearchRegion.covering(*config.search.box)
        else:
            region = _regions(config)[0]
        fn = demo_function(region)
        regions = [region]
    else:
        mesh = config.mesh.build(config.radius)
        bundle = assemble(mesh, build_periodic_dof_map(mesh))
        fn = bundle.at_wavevector(
            config.indicator_map_k,
            config.model,
            guard=config.search.pole_guard,
        )
        regions = _regions(config)

    result = search(fn, regions, config.search.sim)
    path = _output_dir(config) / INDICATOR_MAP
    write_indicator_map(path, result.trace)
    logger.info(
        "Indicator map with %d squares and %d eigenvalues written to %s",
        len(result.trace),
        len(result.estimates),
        path,
    )
    return list(result.trace)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phcsim",
        description="Band structures of dispersive photonic crystals.",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {__version__}",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    commands = {
        "bands": "band diagram along the path",
        "converge": "eigenvalue over uniformly refined meshes",
        "indicator-map": "squares kept by the spectral indicator search",
    }
    for name, help_text in commands.items():
        subparser = subparsers.add_parser(name, help=help_text)
        subparser.add_argument("config", help="run file")
        subparser.add_argument(
            "--seed",
            type=int,
            help="seed of the random vector, overriding search.seed",
        )
        subparser.add_argument(
            "--workers",
            type=int,
            help="number of threads, overriding search.workers",
        )
        subparser.add_argument(
            "--dump-matrices",
            action="store_true",
            help="write the assembled matrices to the output directory",
        )
        subparser.add_argument(
            "-v",
            "--verbose",
            action="store_true",
            help="show debug messages",
        )
        if name == "indicator-map":
            subparser.add_argument(
                "--demo",
                action="store_true",
                help="use a scalar function with one zero instead of the crystal",
            )

    return parser


def _configure_console(verbose: bool) -> logging.Handler:  # noqa: FBT001
    handler = RichHandler(
        level=logging.DEBUG if verbose else logging.INFO,
        rich_tracebacks=True,
        show_path=False,
    )
    package_logger = logging.getLogger("phcsim")
    package_logger.setLevel(logging.DEBUG)
    package_logger.addHandler(handler)
    return handler


def _configure_file(directory: pathlib.Path) -> logging.Handler:
    handler = logging.FileHandler(directory / LOG_FILE_NAME, encoding="utf-8")
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(logging.Formatter(_FILE_FORMAT))
    logging.getLogger("phcsim").addHandler(handler)
    return handler


def main(argv: Sequence[str] | None = None) -> int:
    """
    Run the command line tool.

    Returns:
        The exit status: 0 on success, 2 for an invalid run file or
        command line and 1 when the computation fails.

    """
    args = _parser().parse_args(argv)
    handlers = [_configure_console(args.verbose)]

    try:
        config = load_config(args.config).with_overrides(
            seed=args.seed,
            workers=args.workers,
        )
        handlers.append(_configure_file(_output_dir(config)))
        logger.debug("Configuration: %s", config)

        if args.dump_matrices:
            dump_matrices(config)

        if args.command == "bands":
            run_bands(config)
        elif args.command == "converge":
            report = run_converge(config)
            last = report.rows[-1].omega
            logger.info(
                "Finest mesh: ωa/c=%s, ωa/2πc=%.6f",
                last,
                last.real / (2 * math.pi),
            )
        else:
            run_indicator_map(config, demo=args.demo)

    except ConfigError as error:
        logger.error("Invalid configuration: %s", error)  # noqa: TRY400
        return 2
    except PhcsimError as error:
        logger.error("%s", error)  # noqa: TRY400
        return 1
    finally:
        package_logger = logging.getLogger("phcsim")
        for handler in handlers:
            package_logger.removeHandler(handler)
            handler.close()

    return 0
