"""Exceptions raised by the framework and the exit codes they map to."""

EXIT_SUCCESS = 0
EXIT_VALIDATION_ERROR = 1
EXIT_RUNTIME_ERROR = 2


class TseNasError(Exception):
    """Base class of all errors raised by the framework."""


class InvalidInputError(TseNasError, ValueError):
    """Raised when an input violates a precondition."""


class CurveValidationError(InvalidInputError):
    """Raised when a learning curve violates one of its invariants."""

    def __init__(self, field, message):
        """Create a new instance of the class.

        Parameters
        ----------
        field: str, required
            The name of the offending field.
        message: str, required
            The description of the violation.
        """
        super().__init__("{}: {}".format(field, message))
        self.field = field
        self.message = message

    def __reduce__(self):
        return (type(self), (self.field, self.message))


class BenchmarkFormatError(InvalidInputError):
    """Raised when a benchmark file cannot be ingested."""

    def __init__(self, path, message, line_number=None, arch_id=None):
        """Create a new instance of the class.

        Parameters
        ----------
        path: str, required
            The path of the benchmark file.
        message: str, required
            The description of the problem.
        line_number: int, optional
            The 1-based line number where the problem was found.
        arch_id: str, optional
            The id of the offending architecture record.
        """
        location = str(path)
        if line_number is not None:
            location = "{}:{}".format(location, line_number)
        if arch_id is not None:
            location = "{} (arch_id={})".format(location, arch_id)
        super().__init__("{}: {}".format(location, message))
        self.path = path
        self.line_number = line_number
        self.arch_id = arch_id
        self.message = message

    def __reduce__(self):
        return (type(self), (self.path, self.message, self.line_number,
                             self.arch_id))


class ConfigError(InvalidInputError):
    """Raised when a configuration file is missing or invalid."""


class EstimatorUnavailableError(InvalidInputError):
    """Raised when an estimator needs a curve field that was not recorded."""


class NumericalError(TseNasError, ArithmeticError):
    """Raised when a computation produces non-finite values."""


class TrainingRunError(NumericalError):
    """Raised when one run of a batch of training runs fails."""


class TrainingDivergedError(NumericalError):
    """Raised when a training run produces a non-finite loss or gradient."""

    def __init__(self, epoch, minibatch, message="non-finite loss"):
        """Create a new instance of the class.

        Parameters
        ----------
        epoch: int, required
            The 1-based epoch where training diverged.
        minibatch: int, required
            The 1-based minibatch index within the epoch.
        message: str, optional
            The description of the failure.
        """
        super().__init__("{} at epoch {}, minibatch {}".format(
            message, epoch, minibatch))
        self.epoch = epoch
        self.minibatch = minibatch
        self.message = message

    def __reduce__(self):
        return (type(self), (self.epoch, self.minibatch, self.message))


def exit_code_for(error):
    """Get the process exit code for the provided error.

    Parameters
    ----------
    error: Exception, required
        The error that terminated a command.

    Returns
    -------
    exit_code: int
        1 for validation errors; 2 for everything else.
    """
    if isinstance(error, InvalidInputError):
        return EXIT_VALIDATION_ERROR
    return EXIT_RUNTIME_ERROR
