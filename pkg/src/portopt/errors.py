"""Exception types shared across the package."""


class PortfolioError(Exception):
    """Base class for all errors raised by this package."""


class DataError(PortfolioError):
    """Bad or unusable input data: files, calendars, windows, manifests."""


class InsufficientDownsideData(PortfolioError):
    """Fewer than two negative returns: downside deviation is undefined."""


class NoValidCandidateError(PortfolioError):
    """No candidate carries a valid ratio for the requested objective."""
