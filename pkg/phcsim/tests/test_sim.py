"""Tests of the spectral indicator and the quadtree search."""

from __future__ import annotations

import logging
import math
import unittest

import numpy as np
import pytest
import scipy.sparse as sp

from phcsim import BudgetExceededError, RegionNotAdmissibleError
from phcsim.nep import HolomorphicMatrixFunction
from phcsim.sim import (
    SearchRegion,
    SimConfig,
    admissible_tiling,
    find_eigenvalues,
    indicator,
    merge_terminal_squares,
    random_unit_vector,
    search,
)
from phcsim.testing import (
    companion_eigenvalues,
    det_grid_scan,
    eigenvalues_inside,
    random_matrix_polynomial,
    relative_singularity,
)


def _scalar(zero: complex) -> HolomorphicMatrixFunction:
    return HolomorphicMatrixFunction.from_polynomial([[[-zero]], [[1]]])


class RegionTests(unittest.TestCase):
    """Geometry of the search squares."""

    def test_covering(self) -> None:
        """The covering square has the center of the rectangle."""
        region = SearchRegion.covering(0.2, 9.8, -4.8, 4.8)
        assert region.center == 5 + 0j
        assert region.half_side == pytest.approx(4.8)
        assert region.bounds == pytest.approx((0.2, 9.8, -4.8, 4.8))
        with pytest.raises(ValueError, match="(?i)empty rectangle"):
            SearchRegion.covering(1, 1, 0, 1)

    def test_children(self) -> None:
        """Children tile their parent one level deeper."""
        region = SearchRegion(1 + 1j, 1.0)
        children = region.children()
        assert [c.center for c in children] == [0.5 + 0.5j, 1.5 + 0.5j,
                                                0.5 + 1.5j, 1.5 + 1.5j]
        assert all(c.half_side == 0.5 and c.level == 1 for c in children)
        assert region.radius == pytest.approx(math.sqrt(2))
        assert region.diameter == pytest.approx(2 * math.sqrt(2))

    def test_contains(self) -> None:
        """Squares are closed."""
        region = SearchRegion(0, 1.0)
        assert region.contains(1 + 1j)
        assert not region.contains(1.01)
        assert region.contains(1.01, tol=0.02)
        assert region.intersects((1.0, 2.0, 0.0, 0.5))
        assert not region.intersects((1.5, 2.0, 0.0, 0.5))

    def test_invalid_half_side(self) -> None:
        """The half side must be positive."""
        with pytest.raises(ValueError, match="(?i)half_side"):
            SearchRegion(0, 0.0)


class TilingTests(unittest.TestCase):
    """Covering a rectangle with squares avoiding a pole."""

    def test_no_pole(self) -> None:
        """Without poles the covering square is the only tile."""
        box = (0.0, 4.0, -1.0, 1.0)
        tiles = admissible_tiling(box, lambda _: True, min_half_side=0.05)
        assert tiles == [SearchRegion.covering(*box)]

    def test_pole(self) -> None:
        """Tiles avoid the pole and cover the rest of the rectangle."""
        box = (0.0, 4.0, -1.0, 1.0)
        pole = 2.0

        def admissible(disk: SearchRegion) -> bool:
            return abs(disk.center - pole) > disk.radius + 0.01

        tiles = admissible_tiling(box, admissible, min_half_side=0.05)
        assert all(admissible(t) for t in tiles)
        assert all(t.intersects(box) for t in tiles)
        assert not any(t.contains(pole) for t in tiles)
        for point in (0.5 + 0.5j, 3.5 - 0.9j, 2.5 + 0.5j, 2 + 0.9j):
            assert any(t.contains(point) for t in tiles)
        assert tiles == sorted(
            tiles,
            key=lambda s: (s.level, s.center.real, s.center.imag),
        )


class IndicatorTests(unittest.TestCase):
    """Calibration of the indicator on scalar functions."""

    def test_inside(self) -> None:
        """A zero inside the circle gives an indicator close to one."""
        region = SearchRegion(1 + 1j, 0.5)
        for fraction in (0.0, 0.5, 0.9):
            zero = region.center + fraction * region.radius * np.exp(0.3j)
            value = indicator(_scalar(zero), region, [1.0], 16)
            assert value >= 0.5

    def test_outside(self) -> None:
        """A zero far outside the circle gives a small indicator."""
        region = SearchRegion(1 + 1j, 0.5)
        zero = region.center + 2 * region.radius * np.exp(1.1j)
        assert indicator(_scalar(zero), region, [1.0], 16) <= 1e-3

    def test_diagonal(self) -> None:
        """For a diagonal matrix only the components inside are projected."""
        fn = HolomorphicMatrixFunction.from_polynomial(
            [np.diag([-1.0, -5.0]), np.eye(2)],
        )
        g = np.array([0.6, 0.8])
        value = indicator(fn, SearchRegion(1, 0.5), g, 32)
        assert value == pytest.approx(0.6, abs=1e-8)

    def test_random_unit_vector(self) -> None:
        """The random vector has unit norm and depends only on the seed."""
        first = random_unit_vector(50, np.random.default_rng(7))
        second = random_unit_vector(50, np.random.default_rng(7))
        assert np.linalg.norm(first) == pytest.approx(1)
        np.testing.assert_array_equal(first, second)


class SimConfigTests(unittest.TestCase):
    """Validation of the search parameters."""

    def test_invalid(self) -> None:
        """Invalid parameters are rejected."""
        with pytest.raises(ValueError, match="m0"):
            SimConfig(m0=15)
        with pytest.raises(ValueError, match="delta0"):
            SimConfig(delta0=0)
        with pytest.raises(ValueError, match="beta0"):
            SimConfig(beta0=-1e-4)
        with pytest.raises(ValueError, match="workers"):
            SimConfig(workers=0)


class SearchTests(unittest.TestCase):
    """Quadtree search on small functions."""

    def test_scalar(self) -> None:
        """A single zero is found within the precision."""
        zero = 0.3141 + 0.1234j
        estimates = find_eigenvalues(_scalar(zero), SearchRegion(0, 1))
        assert len(estimates) == 1
        assert abs(estimates[0].value - zero) <= 1e-4

    def test_no_eigenvalue(self) -> None:
        """A square without eigenvalues gives no estimate."""
        result = search(_scalar(5.0), SearchRegion(0, 1), SimConfig())
        assert result.estimates == ()
        assert result.trace == ()

    def test_trace(self) -> None:
        """The trace holds one square per level down to the precision."""
        cfg = SimConfig(beta0=1e-2)
        result = search(_scalar(0.3141 + 0.1234j), SearchRegion(0, 1), cfg)
        levels = [record.level for record in result.trace]
        assert levels == sorted(levels)
        assert levels[0] == 0
        assert all(record.indicator > cfg.delta0 for record in result.trace)
        deepest = [r for r in result.trace if r.level == levels[-1]]
        assert all(2 * math.sqrt(2) * r.half_side <= cfg.beta0 for r in deepest)

    def test_several_regions(self) -> None:
        """An eigenvalue on a common edge is reported once."""
        fn = HolomorphicMatrixFunction.from_polynomial(
            [np.diag([-1.0, -2.5]), np.eye(2)],
        )
        regions = [SearchRegion(0.5, 0.5), SearchRegion(1.5, 0.5),
                   SearchRegion(2.5, 0.5)]
        estimates = search(fn, regions, SimConfig()).estimates
        assert len(estimates) == 2
        assert abs(estimates[0].value - 1) <= 1e-4
        assert abs(estimates[1].value - 2.5) <= 1e-4

    def test_workers(self) -> None:
        """Threads do not change the result."""
        coefficients = random_matrix_polynomial(np.random.default_rng(11))
        fn = HolomorphicMatrixFunction.from_polynomial(coefficients)
        region = SearchRegion(0, 1.0)
        serial = search(fn, region, SimConfig(beta0=1e-3))
        threaded = search(fn, region, SimConfig(beta0=1e-3, workers=4))
        assert serial == threaded
        assert serial.trace == threaded.trace

    def test_seed(self) -> None:
        """The same seed gives the same trace."""
        coefficients = random_matrix_polynomial(np.random.default_rng(5))
        fn = HolomorphicMatrixFunction.from_polynomial(coefficients)
        cfg = SimConfig(beta0=1e-3, rng_seed=42)
        first = search(fn, SearchRegion(0, 1.0), cfg)
        second = search(fn, SearchRegion(0, 1.0), cfg)
        assert first.trace == second.trace

    def test_budget(self) -> None:
        """Too shallow a budget is reported."""
        cfg = SimConfig(max_level=3)
        with pytest.raises(BudgetExceededError, match="(?i)budget"):
            search(_scalar(0.25), SearchRegion(0, 1), cfg)

    def test_not_admissible(self) -> None:
        """Squares around a pole are refused."""
        fn = HolomorphicMatrixFunction(
            1,
            lambda omega: sp.csc_matrix([[omega]]),
            admissible=lambda _: False,
        )
        with pytest.raises(RegionNotAdmissibleError):
            search(fn, SearchRegion(0, 1), SimConfig())

    def test_eigenvalue_on_node(self) -> None:
        """A quadrature node on an eigenvalue moves the square."""
        region = SearchRegion(0, 1.0)
        zero = complex(region.center + region.radius)

        def evaluate(omega: complex) -> sp.spmatrix:
            value = 0 if abs(omega - zero) < 1e-9 else omega - zero
            return sp.csc_matrix([[value]], dtype=np.complex128)

        result = search(
            HolomorphicMatrixFunction(1, evaluate),
            region,
            SimConfig(),
        )
        assert result.estimates == ()
        assert result.trace[0].center == region.center
        assert math.isfinite(result.trace[0].indicator)

    def test_singular_everywhere(self) -> None:
        """Squares failing twice are kept with an infinite indicator."""
        fn = HolomorphicMatrixFunction(
            1,
            lambda _: sp.csc_matrix((1, 1), dtype=np.complex128),
        )
        result = search(fn, SearchRegion(0, 1), SimConfig(beta0=1.0))
        assert len(result.trace) == 1 + 4 + 16
        assert all(math.isinf(r.indicator) for r in result.trace)
        assert len(result.estimates) == 1
        assert abs(result.estimates[0].value) < 1e-12


def test_failed_solves_logged(caplog: pytest.LogCaptureFixture) -> None:
    """Squares kept after failed solves are counted in the log."""
    fn = HolomorphicMatrixFunction(
        1,
        lambda _: sp.csc_matrix((1, 1), dtype=np.complex128),
    )
    with caplog.at_level(logging.INFO, logger="phcsim.sim"):
        search(fn, SearchRegion(0, 1), SimConfig(beta0=1.0))
    assert "21 of 21 kept squares" in caplog.text

    caplog.clear()
    with caplog.at_level(logging.INFO, logger="phcsim.sim"):
        search(_scalar(0.25), SearchRegion(0, 1), SimConfig(beta0=1e-2))
    assert "kept squares" not in caplog.text


def test_merge() -> None:
    """Close terminal squares are merged into one estimate."""
    squares = [
        SearchRegion(0, 1e-5),
        SearchRegion(1e-4, 1e-5),
        SearchRegion(1, 1e-5),
    ]
    estimates = merge_terminal_squares(squares, [0.1, 0.3, 0.2], 2e-4)
    assert len(estimates) == 2
    assert estimates[0].value == pytest.approx(5e-5)
    assert estimates[0].indicator == 0.3
    assert estimates[1].value == 1
    assert merge_terminal_squares([], [], 2e-4) == []


@pytest.mark.parametrize("seed", range(20))
def test_random_polynomials(seed: int) -> None:
    """Eigenvalues of quadratic matrix polynomials match the companion ones."""
    coefficients = random_matrix_polynomial(np.random.default_rng(seed))
    fn = HolomorphicMatrixFunction.from_polynomial(coefficients)
    exact = companion_eigenvalues(coefficients)
    region = SearchRegion(0, 1.0)
    cfg = SimConfig(delta0=1e-3, beta0=1e-4)

    estimates = search(fn, region, cfg).estimates

    for value in eigenvalues_inside(exact, region, margin=0.01):
        assert min(abs(e.value - value) for e in estimates) <= cfg.beta0
    for estimate in estimates:
        assert np.min(np.abs(exact - estimate.value)) <= cfg.beta0
        assert relative_singularity(fn(estimate.value).toarray()) < 1e-2


def test_grid_scan_agrees_with_companion() -> None:
    """A brute-force scan of the square finds the companion eigenvalues."""
    coefficients = [np.diag([-1.0, -4.0]), np.zeros((2, 2)), np.eye(2)]
    fn = HolomorphicMatrixFunction.from_polynomial(coefficients)
    region = SearchRegion(1.5, 1.0)

    hits = det_grid_scan(fn, region, points_per_side=101)
    exact = eigenvalues_inside(
        companion_eigenvalues(coefficients), region, margin=0.01,
    )

    np.testing.assert_allclose(
        sorted(hits, key=lambda z: z.real),
        sorted(exact, key=lambda z: z.real),
        atol=1e-9,
    )
