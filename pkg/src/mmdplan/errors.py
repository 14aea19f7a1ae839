"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid user-supplied configuration (scenario, noise model, grid ...).

    Messages name the offending field. The CLI maps this to exit code 2.
    """


class DimensionError(ValueError):
    """Sample or particle counts that must agree by index pairing do not."""
