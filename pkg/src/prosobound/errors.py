"""Error types shared across the pipeline.

Anything raised as a PipelineError is a user-facing input or configuration
problem (CLI exit code 1). Everything else escaping a command is treated as
an internal fault (exit code 2).
"""


class PipelineError(Exception):
    """Base class for all expected, user-correctable failures."""


class ParseError(PipelineError):
    """A file could not be read: bad syntax, missing field, bad value.

    Messages include the file and, where possible, the line or field path.
    """


class ValidationError(PipelineError):
    """Well-formed input violating a data-model invariant."""


class ConfigError(PipelineError):
    """Invalid configuration value or flag combination."""


class StitchError(PipelineError):
    """Chunked score files do not fit the chunk plan."""
