class OtelbaevError(Exception):
    """Base class for every failure raised by the library"""


class MeasureError(OtelbaevError, ValueError):
    """Invalid atoms, density segments or coordinates"""


class ParameterError(OtelbaevError, ValueError):
    """A numeric parameter is outside its admissible range"""


class ConvergenceError(OtelbaevError):
    """An iteration cap or refinement depth was exhausted"""


class CrossCheckError(OtelbaevError):
    """Two independent computations of the same quantity disagree"""


class BoundaryAmbiguousError(OtelbaevError):
    """A spectral threshold sits on an eigenvalue within tolerance"""

    def __init__(self, message: str, eigenvalue: float):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class ScenarioError(OtelbaevError):
    """A scenario file cannot be parsed or validated"""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


class ReportError(OtelbaevError):
    """Report files cannot be written"""
