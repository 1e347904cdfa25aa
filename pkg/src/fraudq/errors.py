"""Exception types shared across the package."""


class FraudqError(Exception):
    """Base class for all errors raised by this package."""


# --- ingest ---------------------------------------------------------------

class MalformedRowError(FraudqError):
    """Row does not have the configured number of fields."""


class BadNumberError(FraudqError):
    """An amount field failed to parse as a positive decimal."""


class BadTimestampError(FraudqError):
    """Timestamp field failed to parse."""


class BadLabelError(FraudqError):
    """Label field is not 0 or 1."""


class NoPositivesError(FraudqError):
    """Undersampling ratio is undefined without at least one positive row."""


class DegenerateClassError(FraudqError):
    """A class has too few rows to stratify."""


# --- features -------------------------------------------------------------

class BadAlphaError(FraudqError):
    """EWMA smoothing factor outside (0, 1]."""


class SchemaMismatchError(FraudqError):
    """Feature vector or category does not match the frozen schema."""


class OutOfOrderError(FraudqError):
    """Transaction arrived earlier than already-processed history (strict mode)."""


# --- models ---------------------------------------------------------------

class DimensionMismatchError(FraudqError):
    """Input width does not match the model."""


class SingleClassError(FraudqError):
    """Training data contains only one class."""


class NotSymmetricError(FraudqError):
    """Kernel matrix is not symmetric."""


class NonFiniteError(FraudqError):
    """Input contains NaN or infinity."""


# --- quantum --------------------------------------------------------------

class QubitIndexError(FraudqError, IndexError):
    """Qubit index outside the register."""


class WidthMismatchError(DimensionMismatchError):
    """Feature or parameter vector width does not match the circuit."""


class UnsupportedGateError(FraudqError):
    """Gate kind cannot carry a trainable parameter."""


# --- evaluation -----------------------------------------------------------

class LengthMismatchError(FraudqError):
    """Label and prediction sequences differ in length."""


class EmptyMatrixError(FraudqError):
    """Confusion matrix has no entries."""


# --- service --------------------------------------------------------------

class UnknownModelError(FraudqError):
    """Requested model id is not loaded."""


class NoFallbackConfiguredError(FraudqError):
    """A quantum model has no classical surrogate in the fallback map."""
