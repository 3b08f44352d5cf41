"""Statistical weight-distribution estimation for binary linear codes."""

__version__ = "0.1.0"
