"""Exception types shared across the stack."""


class ObjnavError(Exception):
    """Base class for all package-specific errors."""


class InvalidFrameError(ObjnavError):
    """Frame dimensions or pixel buffer are unusable."""


class PlanningError(ObjnavError):
    """A task description could not be decomposed into instructions."""


class EncodingError(ObjnavError):
    """Tokenized input does not fit the model's sequence contract."""


class VocabMismatchError(ObjnavError):
    """Token ids do not belong to the checkpoint's vocabulary."""


class ConfigError(ObjnavError):
    """Invalid or inconsistent configuration."""


class BridgeError(ObjnavError):
    """External bridge handshake or protocol failure."""


class DataError(ObjnavError):
    """Corpus or checkpoint contents violate their schema."""
