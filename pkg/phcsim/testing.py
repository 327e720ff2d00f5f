"""Reference spectra used to check the solvers."""

from __future__ import annotations

import itertools
import math
from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt
import scipy.linalg

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .nep import HolomorphicMatrixFunction
    from .sim import SearchRegion


def empty_lattice_frequencies(
    k: Sequence[float],
    *,
    eps: float = 1.0,
    m_max: int = 3,
) -> list[float]:
    """
    Frequencies ``ω·a/c`` of a homogeneous medium, with multiplicity.

    They are ``|2πm + k|/√ε`` for integer vectors ``m`` with
    ``|m_i| ≤ m_max``, sorted increasingly. Only the values below
    ``2π·m_max/√ε`` are complete.

    Examples:
        >>> import math
        >>> from phcsim.testing import empty_lattice_frequencies
        >>> values = empty_lattice_frequencies((math.pi, math.pi))
        >>> [round(v, 5) for v in values[:4]]
        [4.44288, 4.44288, 4.44288, 4.44288]

    """
    k1, k2 = k
    return sorted(
        math.hypot(2 * math.pi * m1 + k1, 2 * math.pi * m2 + k2) / math.sqrt(eps)
        for m1, m2 in itertools.product(range(-m_max, m_max + 1), repeat=2)
    )


def random_matrix_polynomial(
    rng: np.random.Generator,
    dimension: int = 4,
    degree: int = 2,
) -> list[npt.NDArray[np.complex128]]:
    """
    Coefficients of a random matrix polynomial with invertible leading term.

    Entries are standard complex normal; the leading coefficient is shifted
    by the identity times its dimension so that it is safely invertible.

    """
    coefficients = [
        rng.standard_normal((dimension, dimension))
        + 1j * rng.standard_normal((dimension, dimension))
        for _ in range(degree + 1)
    ]
    coefficients[-1] += dimension * np.eye(dimension)
    return coefficients


def companion_eigenvalues(
    coefficients: Sequence[npt.ArrayLike],
) -> npt.NDArray[np.complex128]:
    """
    Eigenvalues of ``C₀ + ωC₁ + … + ωᵈC_d`` from its companion pencil.

    Examples:
        >>> from phcsim.testing import companion_eigenvalues
        >>> values = companion_eigenvalues([[[-4]], [[0]], [[1]]])
        >>> sorted(values.real.round(6).tolist())
        [-2.0, 2.0]

    """
    matrices = [
        np.atleast_2d(np.asarray(c, dtype=np.complex128)) for c in coefficients
    ]
    degree = len(matrices) - 1
    n = matrices[0].shape[0]
    if degree < 1:
        msg = "the polynomial must have degree at least 1"
        raise ValueError(msg)

    size = n * degree
    a = np.zeros((size, size), dtype=np.complex128)
    b = np.eye(size, dtype=np.complex128)

    # First block companion form: unknowns (x, ωx, ..., ω^{d-1}x)
    a[: size - n, n:] = np.eye(size - n)
    for j in range(degree):
        a[size - n:, j * n:(j + 1) * n] = -matrices[j]
    b[size - n:, size - n:] = matrices[-1]

    values = scipy.linalg.eigvals(a, b)
    return values[np.isfinite(values)]


def eigenvalues_inside(
    values: npt.ArrayLike,
    region: SearchRegion,
    *,
    margin: float = 0.0,
) -> list[complex]:
    """Values at least ``margin`` inside a square, sorted."""
    lo_re, hi_re, lo_im, hi_im = region.bounds
    return sorted(
        (
            complex(v) for v in np.asarray(values).ravel()
            if lo_re + margin <= v.real <= hi_re - margin
            and lo_im + margin <= v.imag <= hi_im - margin
        ),
        key=lambda v: (v.real, v.imag),
    )


def relative_singularity(matrix: npt.ArrayLike) -> float:
    """Ratio of the smallest to the largest singular value."""
    singular_values = scipy.linalg.svdvals(np.asarray(matrix))
    return float(singular_values[-1] / singular_values[0])


def det_grid_scan(
    fn: HolomorphicMatrixFunction,
    region: SearchRegion,
    *,
    points_per_side: int = 201,
    threshold: float = 1e-6,
) -> list[complex]:
    """
    Grid points of a square where the matrix is numerically singular.

    A point is reported when the ratio of the extreme singular values of
    the dense matrix falls below ``threshold``. Intended for small
    dimensions only.

    """
    lo_re, hi_re, lo_im, hi_im = region.bounds
    hits = []
    for re, im in itertools.product(
        np.linspace(lo_re, hi_re, points_per_side),
        np.linspace(lo_im, hi_im, points_per_side),
    ):
        omega = complex(re, im)
        if relative_singularity(fn(omega).toarray()) < threshold:
            hits.append(omega)
    return hits
