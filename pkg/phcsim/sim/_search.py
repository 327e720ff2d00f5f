from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Final

import numpy as np
import numpy.typing as npt
from scipy.cluster.hierarchy import fclusterdata

from .._exceptions import (
    BudgetExceededError,
    RegionNotAdmissibleError,
    SingularSystemError,
)
from ..nep import DEFAULT_SOLVE_TOL
from ._indicator import SearchRegion, indicator, random_unit_vector

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from ..nep import HolomorphicMatrixFunction

logger = logging.getLogger(__name__)

#: Threshold below which a square is discarded.
DEFAULT_DELTA0: Final = 0.01

#: Diameter of the squares at which the subdivision stops.
DEFAULT_BETA0: Final = 1e-4

#: Number of quadrature nodes on each circle.
DEFAULT_M0: Final = 16

#: Direction in which a square is moved when a node hits an eigenvalue.
JITTER_DIRECTION: Final = (1 + 1j) / math.sqrt(2)


@dataclass(frozen=True)
class SimConfig:
    """
    Parameters of the spectral indicator search.

    Attributes:
        delta0: Indicator threshold. Squares with indicator ``≤ delta0``
            are discarded.
        beta0: Precision. Squares are no longer subdivided once their
            diameter is at most ``beta0``.
        m0: Number of trapezoidal nodes per circle.
        rng_seed: Seed of the random right hand side.
        max_level: Maximum subdivision depth below the initial square.
        max_frontier: Maximum number of squares processed at one level.
        workers: Number of threads evaluating indicators of one level.
        solve_tol: Relative residual tolerance of the linear solves.

    """

    delta0: float = DEFAULT_DELTA0
    beta0: float = DEFAULT_BETA0
    m0: int = DEFAULT_M0
    rng_seed: int = 0
    max_level: int = 40
    max_frontier: int = 4096
    workers: int = 1
    solve_tol: float = DEFAULT_SOLVE_TOL

    def __post_init__(self) -> None:
        if not self.delta0 > 0:
            msg = f"delta0 must be positive, got {self.delta0}"
            raise ValueError(msg)
        if not self.beta0 > 0:
            msg = f"beta0 must be positive, got {self.beta0}"
            raise ValueError(msg)
        if self.m0 < 4 or self.m0 % 2:  # noqa: PLR2004
            msg = f"m0 must be an even integer >= 4, got {self.m0}"
            raise ValueError(msg)
        if self.max_level < 0:
            msg = f"max_level must be non-negative, got {self.max_level}"
            raise ValueError(msg)
        if self.max_frontier < 1:
            msg = f"max_frontier must be positive, got {self.max_frontier}"
            raise ValueError(msg)
        if self.workers < 1:
            msg = f"workers must be positive, got {self.workers}"
            raise ValueError(msg)
        if not self.solve_tol > 0:
            msg = f"solve_tol must be positive, got {self.solve_tol}"
            raise ValueError(msg)


@dataclass(frozen=True)
class EigenvalueEstimate:
    """
    Eigenvalue located by the search.

    Attributes:
        value: Center of the merged terminal squares.
        box_half_side: Half side of the terminal squares.
        indicator: Largest indicator among the merged squares.

    """

    value: complex
    box_half_side: float
    indicator: float


@dataclass(frozen=True)
class IndicatorRecord:
    """Square of the subdivision whose indicator exceeded the threshold."""

    level: int
    center: complex
    half_side: float
    indicator: float


@dataclass(frozen=True)
class SearchResult:
    """Eigenvalue estimates together with the surviving squares."""

    estimates: tuple[EigenvalueEstimate, ...]
    trace: tuple[IndicatorRecord, ...] = field(default=(), repr=False)


def _robust_indicator(
    fn: HolomorphicMatrixFunction,
    square: SearchRegion,
    g: npt.NDArray[np.complex128],
    cfg: SimConfig,
) -> float:
    try:
        return indicator(fn, square, g, cfg.m0, solve_tol=cfg.solve_tol)
    except SingularSystemError as error:
        logger.debug("Moving square %s: %s", square, error)

    moved = square.shifted(cfg.beta0 / 10 * JITTER_DIRECTION)
    try:
        return indicator(fn, moved, g, cfg.m0, solve_tol=cfg.solve_tol)
    except SingularSystemError as error:
        logger.debug("Square %s kept after a second failure: %s", square, error)
        return math.inf


def merge_terminal_squares(
    squares: Sequence[SearchRegion],
    indicators: Sequence[float],
    distance: float,
) -> list[EigenvalueEstimate]:
    """
    Merge terminal squares whose centers are close into single estimates.

    Squares are grouped by single linkage: chains of centers with
    consecutive distances at most ``distance`` form one group, which is
    reported at its centroid.

    """
    if not squares:
        return []

    centers = np.array([s.center for s in squares], dtype=np.complex128)
    if len(squares) == 1:
        labels = np.ones(1, dtype=np.intp)
    else:
        labels = fclusterdata(
            np.column_stack([centers.real, centers.imag]),
            t=distance,
            criterion="distance",
            method="single",
        )

    estimates = []
    for label in np.unique(labels):
        members = np.flatnonzero(labels == label)
        estimates.append(
            EigenvalueEstimate(
                value=complex(centers[members].mean()),
                box_half_side=max(squares[i].half_side for i in members),
                indicator=max(indicators[i] for i in members),
            ),
        )

    estimates.sort(key=lambda e: (e.value.real, e.value.imag))
    return estimates


def _search_square(
    fn: HolomorphicMatrixFunction,
    region: SearchRegion,
    g: npt.NDArray[np.complex128],
    cfg: SimConfig,
    executor: ThreadPoolExecutor | None,
) -> tuple[list[SearchRegion], list[float], list[IndicatorRecord]]:
    frontier = [region]
    terminal: list[SearchRegion] = []
    terminal_indicators: list[float] = []
    trace: list[IndicatorRecord] = []

    while frontier:
        depth = frontier[0].level - region.level
        if depth > cfg.max_level or len(frontier) > cfg.max_frontier:
            msg = (
                f"search budget exhausted at depth {depth} with "
                f"{len(frontier)} squares of half side "
                f"{frontier[0].half_side:.3g} still above delta0="
                f"{cfg.delta0}; the region may contain a pole or delta0 is "
                "too small"
            )
            raise BudgetExceededError(msg)

        if executor is None:
            values = [_robust_indicator(fn, s, g, cfg) for s in frontier]
        else:
            values = list(executor.map(
                lambda s: _robust_indicator(fn, s, g, cfg),
                frontier,
            ))

        next_frontier = []
        for square, value in zip(frontier, values):
            if not value > cfg.delta0:
                continue

            trace.append(IndicatorRecord(
                level=square.level,
                center=square.center,
                half_side=square.half_side,
                indicator=value,
            ))
            if square.diameter <= cfg.beta0:
                terminal.append(square)
                terminal_indicators.append(value)
            else:
                next_frontier.extend(square.children())

        logger.debug(
            "Depth %d: %d of %d squares kept",
            depth,
            len(next_frontier) // 4,
            len(frontier),
        )
        frontier = next_frontier

    return terminal, terminal_indicators, trace


def search(
    fn: HolomorphicMatrixFunction,
    region: SearchRegion | Iterable[SearchRegion],
    cfg: SimConfig,
) -> SearchResult:
    """
    Locate every eigenvalue in one or several squares.

    The quadtree of each square is explored breadth first. Terminal
    squares of all the regions are merged together, so an eigenvalue on
    the common edge of two regions is reported once.

    Args:
        fn: Matrix function.
        region: Initial square, or several squares.
        cfg: Search parameters.

    Returns:
        The merged estimates, sorted by real part and then imaginary part,
        and the trace of every square whose indicator exceeded
        ``cfg.delta0``.

    Raises:
        RegionNotAdmissibleError: If ``fn`` is not holomorphic around one
            of the squares.
        BudgetExceededError: If the subdivision does not terminate within
            the budget of ``cfg``.

    """
    regions = [region] if isinstance(region, SearchRegion) else list(region)

    for square in regions:
        if not fn.admissible(square):
            msg = (
                f"the circle circumscribing {square} is too close to a pole "
                "of the operator"
            )
            raise RegionNotAdmissibleError(msg)

    rng = np.random.default_rng(cfg.rng_seed)
    g = random_unit_vector(fn.dimension, rng)

    terminal: list[SearchRegion] = []
    terminal_indicators: list[float] = []
    trace: list[IndicatorRecord] = []

    executor = (
        ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    )
    try:
        for square in regions:
            squares, values, records = _search_square(
                fn, square, g, cfg, executor,
            )
            terminal.extend(squares)
            terminal_indicators.extend(values)
            trace.extend(records)
    finally:
        if executor is not None:
            executor.shutdown()

    estimates = merge_terminal_squares(
        terminal,
        terminal_indicators,
        2 * cfg.beta0,
    )
    logger.debug(
        "Found %d eigenvalues from %d terminal squares",
        len(estimates),
        len(terminal),
    )
    n_infinite = sum(math.isinf(record.indicator) for record in trace)
    if n_infinite:
        logger.info(
            "%d of %d kept squares were kept because their solves failed "
            "twice, not by the indicator threshold",
            n_infinite,
            len(trace),
        )
    return SearchResult(estimates=tuple(estimates), trace=tuple(trace))


def find_eigenvalues(
    fn: HolomorphicMatrixFunction,
    omega_region: SearchRegion,
    cfg: SimConfig | None = None,
) -> list[EigenvalueEstimate]:
    """
    Find every eigenvalue of a matrix function inside a square.

    This is a convenience function that wraps :func:`search` and drops
    the trace.

    Examples:
        >>> from phcsim.nep import HolomorphicMatrixFunction
        >>> from phcsim.sim import SearchRegion, find_eigenvalues
        >>> fn = HolomorphicMatrixFunction.from_polynomial(
        ...     [[[-1, 0], [0, -4]], [[0, 0], [0, 0]], [[1, 0], [0, 1]]],
        ... )
        >>> estimates = find_eigenvalues(fn, SearchRegion(1.5, 1.0))
        >>> [round(e.value.real, 3) for e in estimates]
        [1.0, 2.0]

    """
    if cfg is None:
        cfg = SimConfig()
    return list(search(fn, omega_region, cfg).estimates)
