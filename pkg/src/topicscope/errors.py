"""Exception hierarchy shared across the package.

ConfigError covers invalid parameters and misuse of the API surface
(CLI exit code 1); DataError covers problems with the data itself,
malformed inputs, or mismatched artifacts (CLI exit code 2).
"""


class TopicScopeError(Exception):
    """Base class for all errors raised by topicscope."""


class ConfigError(TopicScopeError):
    """Invalid configuration value or unsatisfiable parameter combination."""


class DataError(TopicScopeError):
    """Malformed or inconsistent input data."""
