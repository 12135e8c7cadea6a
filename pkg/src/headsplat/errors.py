"""Exception hierarchy shared across the package."""


class HeadSplatError(Exception):
    """Base class for all package errors."""


class ParameterError(HeadSplatError):
    """Invalid runtime parameters (wrong shape, non-finite values, ...)."""


class ConfigError(HeadSplatError):
    """Invalid activation / runtime configuration."""


class ModelError(HeadSplatError):
    """Head model is missing required data (labels, topology, ...)."""


class AssetError(HeadSplatError):
    """Asset-level inconsistency (bad triangle ids, mismatched resolutions)."""


class FileFormatError(AssetError):
    """Container magic does not match."""


class FileVersionError(AssetError):
    """Container version is not supported."""


class FileTruncatedError(AssetError):
    """Container ends before a declared chunk is complete."""


class FileChecksumError(AssetError):
    """Chunk CRC32 mismatch."""
