"""reqspec: turn English city requirements into formal spatio-temporal
specifications through an interactive clarification dialogue."""

__version__ = "0.1.0"
