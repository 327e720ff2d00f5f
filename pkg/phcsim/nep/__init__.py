"""Holomorphic matrix functions and their linear solves."""

from ._core import (
    DEFAULT_SOLVE_TOL as DEFAULT_SOLVE_TOL,
    ConditionFlag as ConditionFlag,
    HolomorphicMatrixFunction as HolomorphicMatrixFunction,
    LinearSolveReport as LinearSolveReport,
    solve as solve,
)
