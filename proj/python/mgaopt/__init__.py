"""Multiple gravity assist trajectory models and global search."""

from ._core import (
    PENALTY,
    Catalog,
    Error,
    FlybyError,
    KeplerError,
    LambertError,
    MultistartReport,
    Problem,
    SearchParams,
    SearchResult,
    ValidationError,
    date,
    grid,
    minimize,
    mjd2000,
    multistart,
    search,
    two_impulse_cost,
)

__all__ = [
    "PENALTY",
    "Catalog",
    "Error",
    "FlybyError",
    "KeplerError",
    "LambertError",
    "MultistartReport",
    "Problem",
    "SearchParams",
    "SearchResult",
    "ValidationError",
    "date",
    "grid",
    "minimize",
    "mjd2000",
    "multistart",
    "search",
    "two_impulse_cost",
]
