"""Exception hierarchy for qcorr."""


class QCorrError(Exception):
    """Base class for all errors raised by qcorr."""


class DimensionError(QCorrError, ValueError):
    """Shapes or partitions do not fit together."""


class NotHermitianError(QCorrError, ValueError):
    pass


class NotUnitaryError(QCorrError, ValueError):
    pass


class InvalidStateError(QCorrError, ValueError):
    """A ket or density matrix fails validation."""


class UndefinedConditionalError(QCorrError, ValueError):
    """Conditioning on an outcome (or branch) of vanishing probability."""


class IncompleteTableError(QCorrError, ValueError):
    pass


class InconsistentTableError(QCorrError, ValueError):
    """A complete correlation table whose reconstruction is not a valid state.

    The reconstructed matrix is kept on the exception so callers can still
    inspect or write it.
    """

    def __init__(self, message, density=None):
        super().__init__(message)
        self.density = density


class DegenerateAngleError(QCorrError, ValueError):
    pass
