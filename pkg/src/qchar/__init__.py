"""Exact q-series engine for characters, Jacobi constant terms and modular differential equations."""

from .qseries import (
    DenominatorOverflow,
    NonConvergent,
    QExp,
    UnknownCoefficient,
    Verdict,
    ZeroSeries,
    denominator_cap,
    equality_to_order,
    series_sum,
)

__version__ = "0.1.0"

__all__ = [
    "QExp",
    "Verdict",
    "equality_to_order",
    "series_sum",
    "denominator_cap",
    "ZeroSeries",
    "DenominatorOverflow",
    "NonConvergent",
    "UnknownCoefficient",
]
