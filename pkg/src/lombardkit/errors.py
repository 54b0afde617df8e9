"""Exception types shared across the package."""


class LombardkitError(Exception):
    """Base class for all package-specific errors."""


class InvalidSignalError(LombardkitError, ValueError):
    """A waveform violates a precondition (empty, non-finite, silent, too short)."""


class WavFormatError(LombardkitError, ValueError):
    """A WAV container is malformed: bad magic, truncated header, inconsistent chunks."""


class UnsupportedWavError(LombardkitError, ValueError):
    """A WAV file is well-formed but uses an encoding outside PCM 16/24-bit and float-32."""


class ConfigError(LombardkitError, ValueError):
    """A configuration object or file is invalid."""


class ManifestError(LombardkitError, ValueError):
    """A corpus manifest cannot be parsed or is structurally unusable."""


class DegenerateDataError(LombardkitError, ValueError):
    """Input data carries no usable variation (e.g. all abscissae equal in a fit)."""
