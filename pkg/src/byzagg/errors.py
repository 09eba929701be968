"""Error types shared across the package.

ConfigError and its subclasses mark invalid parameters or configs (CLI exit
code 2, HTTP 400); ProtocolViolationError and its subclasses mark runtime
violations of the synchronous-round protocol (CLI exit code 3, HTTP 500).
"""


class ConfigError(ValueError):
    """A parameter or configuration violates a documented invariant."""


class UnsupportedParameterError(ConfigError):
    """A parameter value outside the supported family (e.g. even redundancy)."""


class UnsupportedOrderError(ConfigError):
    """A design order with no construction (v not congruent to 1 or 3 mod 6)."""


class CapacityError(ConfigError):
    """A request beyond the exhaustive-search capacity bound."""


class ProtocolViolationError(RuntimeError):
    """The synchronous-round contract was broken at runtime."""


class MissingGradientError(ProtocolViolationError):
    """A worker's gradient for an assigned file was never recorded."""


class DegenerateDetectionError(ProtocolViolationError):
    """Detection produced an empty honest set; no gradient can be selected."""
