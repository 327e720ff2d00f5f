from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Final

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .._exceptions import SingularSystemError

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from ..dielectric import DiskLike

logger = logging.getLogger(__name__)

#: Relative residual above which a solve is flagged as ill conditioned.
DEFAULT_SOLVE_TOL: Final = 1e-10


def _always_admissible(region: DiskLike) -> bool:  # noqa: ARG001
    return True


@dataclass(frozen=True)
class HolomorphicMatrixFunction:
    """
    Holomorphic map from complex frequencies to square sparse matrices.

    Attributes:
        dimension: Size ``N`` of the matrices.
        evaluate: Function returning the ``N × N`` matrix at a frequency.
            It must be deterministic.
        admissible: Predicate telling whether the function is holomorphic
            on (a neighbourhood of) a closed disk.

    """

    dimension: int
    evaluate: Callable[[complex], sp.spmatrix]
    admissible: Callable[[DiskLike], bool] = _always_admissible

    def __post_init__(self) -> None:
        if self.dimension < 1:
            msg = f"dimension must be positive, got {self.dimension}"
            raise ValueError(msg)

    def __call__(self, omega: complex) -> sp.spmatrix:
        return self.evaluate(omega)

    @classmethod
    def from_polynomial(
        cls,
        coefficients: Sequence[npt.ArrayLike],
    ) -> HolomorphicMatrixFunction:
        """
        Build the matrix polynomial ``C₀ + ωC₁ + ω²C₂ + …``.

        Examples:
            >>> from phcsim.nep import HolomorphicMatrixFunction
            >>> fn = HolomorphicMatrixFunction.from_polynomial([[[-3]], [[1]]])
            >>> fn(5).toarray()
            array([[2.+0.j]])

        """
        matrices = [
            sp.csc_matrix(np.atleast_2d(np.asarray(c, dtype=np.complex128)))
            for c in coefficients
        ]
        if not matrices:
            msg = "at least one coefficient is needed"
            raise ValueError(msg)

        shape = matrices[0].shape
        if shape[0] != shape[1] or any(m.shape != shape for m in matrices):
            msg = "coefficients must be square matrices of equal shape"
            raise ValueError(msg)

        def evaluate(omega: complex) -> sp.spmatrix:
            # Horner scheme
            result = matrices[-1]
            for matrix in reversed(matrices[:-1]):
                result = complex(omega) * result + matrix
            return result

        return cls(dimension=shape[0], evaluate=evaluate)


class ConditionFlag(enum.Enum):
    """Outcome of the a posteriori residual check."""

    OK = "Ok"
    ILL_CONDITIONED = "IllConditioned"


@dataclass(frozen=True)
class LinearSolveReport:
    """
    Solution of ``T(ω)x = g`` with its residual check.

    Attributes:
        solution: The computed ``x``.
        residual_norm: ``‖T(ω)x - g‖₂``.
        condition_flag: Whether the residual is below the tolerance.

    """

    solution: npt.NDArray[np.complex128]
    residual_norm: float
    condition_flag: ConditionFlag


def solve(
    fn: HolomorphicMatrixFunction,
    omega: complex,
    rhs: npt.ArrayLike,
    *,
    solve_tol: float = DEFAULT_SOLVE_TOL,
) -> LinearSolveReport:
    """
    Solve ``T(ω)x = g`` with a sparse LU factorization.

    Args:
        fn: Matrix function.
        omega: Frequency at which the matrix is evaluated.
        rhs: Right hand side ``g``.
        solve_tol: Relative residual tolerance.

    Returns:
        The solution and the residual check. The solve is flagged
        ``IllConditioned`` when ``‖T(ω)x - g‖₂ > solve_tol·‖g‖₂``.

    Raises:
        SingularSystemError: If the factorization breaks down, which means
            that ``omega`` is numerically an eigenvalue.

    Examples:
        >>> from phcsim.nep import HolomorphicMatrixFunction, solve
        >>> fn = HolomorphicMatrixFunction.from_polynomial([[[-3]], [[1]]])
        >>> solve(fn, 5, [1]).solution
        array([0.5+0.j])

    """
    g = np.asarray(rhs, dtype=np.complex128).reshape(-1)
    if g.shape != (fn.dimension,):
        msg = f"rhs must have {fn.dimension} entries, got {g.shape[0]}"
        raise ValueError(msg)
    if not np.all(np.isfinite(g)):
        msg = "rhs must be finite"
        raise ValueError(msg)

    matrix = sp.csc_matrix(fn.evaluate(omega), dtype=np.complex128)

    try:
        factorization = splu(matrix)
    except RuntimeError as error:
        msg = f"T(ω) is singular at ω={omega}: {error}"
        raise SingularSystemError(msg) from error

    solution = factorization.solve(g)
    if not np.all(np.isfinite(solution)):
        msg = f"T(ω) is singular at ω={omega}: non finite solution"
        raise SingularSystemError(msg)

    residual_norm = float(np.linalg.norm(matrix @ solution - g))
    flag = (
        ConditionFlag.OK
        if residual_norm <= solve_tol * np.linalg.norm(g)
        else ConditionFlag.ILL_CONDITIONED
    )
    logger.debug(
        "Solve at ω=%s: residual %.3e (%s)",
        omega,
        residual_norm,
        flag.value,
    )

    return LinearSolveReport(
        solution=solution,
        residual_norm=residual_norm,
        condition_flag=flag,
    )
