# coalmu/core/exceptions.py
from typing import Optional


class CoalMuError(Exception):
    """Base class for every error raised by the engine"""


class FormulaSyntaxError(CoalMuError):
    """Formula text does not match the grammar"""

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class SignatureError(CoalMuError):
    """Modality or model does not belong to the selected logic"""


class GuardednessError(CoalMuError):
    """Input is unguarded or cannot be made clean"""

    def __init__(self, message: str, variable: Optional[str] = None):
        self.variable = variable
        super().__init__(message)


class CapExceeded(CoalMuError):
    """A configured input cap was exceeded"""


class CeilingExceeded(CoalMuError):
    """An exploration ceiling was exceeded"""


class InvalidLasso(CoalMuError):
    """A lasso is not a valid play or tile word"""


class ModelFormatError(CoalMuError):
    """A model document violates the model invariants"""


class CertificateError(CoalMuError):
    """A certificate document cannot be decoded"""


class StrategyError(CoalMuError):
    """A strategy does not win where it is required to"""


class ExtractionError(CoalMuError):
    """Model extraction failed at an atomic position"""

    def __init__(self, message: str, position: Optional[str] = None):
        self.position = position
        if position is not None:
            message = f"{message} at {position}"
        super().__init__(message)
