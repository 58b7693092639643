"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid grid, stencil, or solver configuration."""


class DataError(ValueError):
    """Non-finite or otherwise unusable field data."""
