"""Linear finite element matrices of the quasi-periodic operator."""

from ._assembly import (
    OperatorBundle as OperatorBundle,
    Wavevector as Wavevector,
    assemble as assemble,
    operator_at as operator_at,
)
