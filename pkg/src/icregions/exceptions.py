# icregions/exceptions.py
"""
Error hierarchy shared by the library and the CLI.

Every error carries the process exit code the CLI reports for it.
"""


class RegionError(Exception):
    """Base class for all icregions errors."""

    exit_code: int = 1


# ============================================================================
# Parse errors (exit 2)
# ============================================================================


class ParseError(RegionError):
    exit_code = 2


# ============================================================================
# Validation errors (exit 3)
# ============================================================================


class ValidationFailed(RegionError):
    exit_code = 3


class UnknownVariable(ValidationFailed):
    pass


class EmptySelection(ValidationFailed):
    pass


class OverlappingSets(ValidationFailed):
    pass


class VariableSetMismatch(ValidationFailed):
    pass


class AlphabetMismatch(ValidationFailed):
    pass


class FamilyMismatch(ValidationFailed):
    pass


class MissingAssignment(ValidationFailed):
    pass


class PointNotInRegion(ValidationFailed):
    pass


class QTooSmall(ValidationFailed):
    pass


# ============================================================================
# Cap errors (exit 4)
# ============================================================================


class CapExceeded(RegionError):
    exit_code = 4


class StateSpaceTooLarge(CapExceeded):
    pass


class SupportTooLarge(CapExceeded):
    pass


class BlowupCapExceeded(CapExceeded):
    pass


# ============================================================================
# Infeasible input (exit 5)
# ============================================================================


class InfeasibleInput(RegionError):
    exit_code = 5


class InfeasibleSubstitution(InfeasibleInput):
    pass


class RegionInfeasible(InfeasibleInput):
    pass


class UnboundedSystem(InfeasibleInput):
    pass


# ============================================================================
# Codec failures (counted per trial, not fatal)
# ============================================================================


class CosetEmpty(RegionError):
    """The constrained support has zero total mass."""

    exit_code = 5


class EncoderError(CosetEmpty):
    def __init__(self, stage: str, message: str = ""):
        self.stage = stage
        super().__init__(message or f"encoder coset empty at stage {stage}")


class DecoderCosetEmpty(CosetEmpty):
    def __init__(self, decoder: int, message: str = ""):
        self.decoder = decoder
        super().__init__(message or f"decoder {decoder}: coset has zero posterior mass")
