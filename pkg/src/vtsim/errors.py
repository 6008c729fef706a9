"""Base exception. Each module defines its own subclasses next to the code raising them."""


class VtsimError(Exception):
    """Root of all errors raised by vtsim."""


class InvalidArgumentError(VtsimError, ValueError):
    """An argument violates an operation's precondition."""
