"""Exact symbolic kernel: polynomials, Laurent series, partitions, linalg."""

from .linalg import (
    determinant,
    invert,
    kernel_basis,
    rank,
    rref,
    solve_unique,
)
from .partitions import Partition, partition_count, partitions_of
from .poly import (
    CC,
    LAMBDA,
    CoeffPoly,
    Generator,
    GradingError,
    a,
    abar,
)
from .series import (
    InsufficientOrderError,
    LaurentSeries,
    pre_schwarzian,
    schwarzian,
    series_reversion,
)

__all__ = [
    "CoeffPoly",
    "Generator",
    "GradingError",
    "a",
    "abar",
    "LAMBDA",
    "CC",
    "LaurentSeries",
    "InsufficientOrderError",
    "schwarzian",
    "pre_schwarzian",
    "series_reversion",
    "Partition",
    "partitions_of",
    "partition_count",
    "rref",
    "rank",
    "kernel_basis",
    "solve_unique",
    "invert",
    "determinant",
]
