"""Exception types used across the package.

Everything derives from WptsimError so callers can catch the package's own
failures without swallowing genuine bugs.  DomainError doubles as ValueError
because most bad-argument cases are just that.
"""


class WptsimError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(WptsimError):
    """Array shapes or counts do not line up."""


class DomainError(WptsimError, ValueError):
    """An argument value is outside the valid domain."""


class DegenerateChannelError(DomainError):
    """A channel with zero gain on every tone cannot be matched."""


class ZeroWaveformError(DomainError):
    """Peak-to-average ratio of an identically zero waveform is undefined."""


class ConfigError(WptsimError):
    """A config file, table file, or parameter set failed validation."""


class CodebookIOError(WptsimError):
    """A codebook file is missing, corrupt, or of the wrong version."""


class ProtocolError(WptsimError):
    """Feedback encoding/decoding violated the frame contract."""


class SummaryError(WptsimError):
    """Campaign summary could not be computed (e.g. missing baseline row)."""
