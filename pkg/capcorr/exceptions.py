from typing import Optional


class InputError(Exception):
    def __init__(self, message):
        """Thrown when input data or arguments are invalid
        Args:
            message: A more specific error message
        Returns:
            None
        """
        msg = "Invalid input: {}".format(message)
        super(InputError, self).__init__(msg)


class NumericError(Exception):
    def __init__(self, message):
        """Thrown when a computation cannot produce a well-defined number
        Args:
            message: A more specific error message
        Returns:
            None
        """
        msg = "A numerical error occurred: {}".format(message)
        super(NumericError, self).__init__(msg)


class ReadScoreTableError(InputError):
    def __init__(self, message, line: Optional[int] = None):
        """Thrown when a score table fails to parse
        Args:
            message: A more specific error message
            line: The 1-based line number of the offending row, if known
        Returns:
            None
        """
        self.line = line
        self.detail = message
        if line is not None:
            message = "line {}: {}".format(line, message)
        msg = "An error occurred while reading score table: {}".format(message)
        super(InputError, self).__init__(msg)


class ReadMetadataError(InputError):
    def __init__(self, message):
        """Thrown when benchmark metadata is missing, malformed or inconsistent with the score table
        Args:
            message: A more specific error message
        Returns:
            None
        """
        msg = "An error occurred while reading benchmark metadata: {}".format(message)
        super(InputError, self).__init__(msg)


class ReadPredictionLogError(InputError):
    def __init__(self, message, line: Optional[int] = None):
        """Thrown when a prediction log record is malformed
        Args:
            message: A more specific error message
            line: The 1-based line number of the offending record, if known
        Returns:
            None
        """
        self.line = line
        self.detail = message
        if line is not None:
            message = "line {}: {}".format(line, message)
        msg = "An error occurred while reading prediction log: {}".format(message)
        super(InputError, self).__init__(msg)


class ReadConfigError(InputError):

    def __init__(self, message):
        """Thrown when we couldn't read or validate a configuration
        Args:
            message: A more specific error message
        Returns:
            None
        """
        msg = "An error occurred when reading configuration: {}".format(message)
        super(InputError, self).__init__(msg)


class InvalidSyntheticSpecError(InputError):
    def __init__(self, message):
        """Thrown when a synthetic population spec is invalid
        Args:
            message: A more specific error message
        Returns:
            None
        """
        msg = "Synthetic population spec is invalid: {}".format(message)
        super(InputError, self).__init__(msg)


class UnknownFormatError(InputError):
    def __init__(self, requested: str, supported):
        msg = "Unknown format '{}'; must be one of: {}".format(requested, ', '.join(supported))
        super(InputError, self).__init__(msg)


class ZeroVarianceError(NumericError):
    def __init__(self, column: str):
        """Thrown when a column cannot be standardized because all of its values are equal
        Args:
            column: The benchmark identifier of the constant column
        Returns:
            None
        """
        self.column = column
        msg = "A numerical error occurred: column '{}' has zero variance".format(column)
        super(NumericError, self).__init__(msg)


class UndefinedCorrelationError(NumericError):
    def __init__(self, message):
        msg = "A numerical error occurred: undefined correlation; {}".format(message)
        super(NumericError, self).__init__(msg)


class EigensolverConvergenceError(NumericError):
    def __init__(self, message):
        """Thrown when the eigensolver fails to converge within its iteration budget
        Args:
            message: A more specific error message
        Returns:
            None
        """
        msg = "A numerical error occurred: eigensolver did not converge; {}".format(message)
        super(NumericError, self).__init__(msg)


class BootstrapDegeneracyError(NumericError):
    def __init__(self, skipped: int, resamples: int):
        msg = "A numerical error occurred: {} of {} bootstrap resamples were degenerate".format(skipped, resamples)
        super(NumericError, self).__init__(msg)


class WriteReportError(Exception):
    def __init__(self, message):
        """Thrown when a report or data file does not write out properly
        Args:
            message: A more specific error message
        Returns:
            None
        """
        msg = "An error occurred when writing output: {}".format(message)
        super(WriteReportError, self).__init__(msg)
