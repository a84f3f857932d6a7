"""
Exception hierarchy for hetnet
"""


class HetNetError(Exception):
    """Base class for every error raised by the library"""


class InvalidInput(HetNetError):
    """Input rejected before any analysis ran (maps to exit code 1)"""


class PositivityViolation(InvalidInput):
    """A rate that must be positive is not"""


class AssumptionViolation(InvalidInput):
    """A flagged standing assumption does not hold"""


class NonGeneric(InvalidInput):
    """A dispatch quantity sits on a case boundary"""


class InvalidSignPattern(HetNetError):
    """Sign pattern of the b-quantities matches no case of the decision table"""


class UnsupportedForm(HetNetError):
    """Monomial map shape the wedge calculus does not handle"""


class UnsupportedRegime(HetNetError):
    """Parameter set outside every regime with known index formulas"""


class CapExceeded(HetNetError):
    """An iteration hit its cap before reaching a decision"""


class SearchFailed(HetNetError):
    """Rejection sampling found no admissible parameter set"""


class NoSaddlePair(InvalidInput):
    """The x1-axis polynomial has no pair of opposite-sign roots"""


class EquivarianceViolation(InvalidInput):
    """A vector field term breaks the sign-change symmetries"""


class UnknownMap(HetNetError):
    """Map identifier not defined for the network"""


class DomainUnderflow(HetNetError):
    """A section coordinate dropped below the floating point floor"""

    def __init__(self, message: str, cycle: str = None):
        super().__init__(message)
        self.cycle = cycle


class InsufficientSamples(HetNetError):
    """Too few escaping or attracted points for a regression"""


class Blowup(HetNetError):
    """Integrated trajectory left every bounded region"""
