"""Exception hierarchy.

Every exception carries a short machine-readable ``code`` used by the CLI
when rendering error reports and choosing exit codes.
"""


class AnticycloError(Exception):
    code = "ERROR"

    def __init__(self, message=""):
        super().__init__(message or self.code)


# --- p-adic layer ---------------------------------------------------------

class StructureMismatch(AnticycloError):
    code = "STRUCTURE_MISMATCH"


class NotAResidue(AnticycloError):
    code = "NOT_A_RESIDUE"


class ZeroInput(AnticycloError):
    code = "ZERO_INPUT"


class NotPrincipal(AnticycloError):
    code = "NOT_PRINCIPAL"


class NonUnit(AnticycloError):
    code = "NON_UNIT"


class PrecisionExhausted(AnticycloError):
    code = "PRECISION_EXHAUSTED"


class AllZero(AnticycloError):
    code = "ALL_ZERO"


# --- quadratic field layer ------------------------------------------------

class NotFundamental(AnticycloError):
    code = "NOT_FUNDAMENTAL"


class BoundExceeded(AnticycloError):
    code = "BOUND_EXCEEDED"


class NotCoprime(AnticycloError):
    code = "NOT_COPRIME"


# --- eigenform layer ------------------------------------------------------

class SchemaError(AnticycloError):
    code = "SCHEMA_ERROR"


class InvariantViolation(AnticycloError):
    code = "INVARIANT_VIOLATION"


class DivisibilityViolation(AnticycloError):
    code = "DIVISIBILITY_VIOLATION"


class EmbeddingMismatch(AnticycloError):
    code = "EMBEDDING_MISMATCH"


class DecompositionInvalid(AnticycloError):
    code = "DECOMPOSITION_INVALID"


class MissingCoefficient(AnticycloError):
    code = "MISSING_COEFFICIENT"


# --- local terms ----------------------------------------------------------

class PIsLevel(AnticycloError):
    code = "P_IS_LEVEL"


class SearchExhausted(AnticycloError):
    code = "SEARCH_EXHAUSTED"


# --- hypothesis / transfer layer ------------------------------------------

class NotDivisible(AnticycloError):
    code = "NOT_DIVISIBLE"


class HypothesisNotMet(AnticycloError):
    code = "HYPOTHESIS_NOT_MET"


class NegativeResult(AnticycloError):
    code = "NEGATIVE_RESULT"


class UnknownLocalTerm(AnticycloError):
    code = "UNKNOWN_LOCAL_TERM"


class ParityViolation(AnticycloError):
    code = "PARITY_VIOLATION"


class PreconditionFailed(AnticycloError):
    code = "PRECONDITION_FAILED"
