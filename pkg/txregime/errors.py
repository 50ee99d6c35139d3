""" All errors raised by the regime-switching toolkit. """


class RegimeError(Exception):
    """
    Base class of all errors raised by txregime.
    Every subclass builds its message from the structured arguments it is given
    and keeps those arguments as attributes, so callers can react to them.
    """

    def __init__(self, message):
        super(RegimeError, self).__init__(message)
        self.message = message


class InvalidInputError(RegimeError, ValueError):
    """ Error due to an argument that violates the preconditions of an operation. """

    def __init__(self, name, reason):
        message = 'Invalid value for \'{name}\': {reason}'.format(name=name, reason=reason)
        super(InvalidInputError, self).__init__(message)
        self.name = name
        self.reason = reason


class InsufficientDataError(InvalidInputError):
    """ Error because a series is too short for the requested computation. """

    def __init__(self, required, actual):
        super(InsufficientDataError, self).__init__(
            'observations', 'expected more than {required} rows, got {actual}'.format(
                required=required, actual=actual))
        self.required = required
        self.actual = actual


class InvalidModelError(RegimeError, ValueError):
    """ Error because the parameters of a hidden Markov model violate an invariant. """

    def __init__(self, reason):
        super(InvalidModelError, self).__init__('Invalid model: ' + reason)
        self.reason = reason


class NumericalError(RegimeError, ArithmeticError):
    """ General numerical failure during inference. """


class SingularCovarianceError(NumericalError):
    """ Error because a state covariance matrix can not be factorized. """

    def __init__(self, state):
        message = 'The covariance matrix of state {state} is not positive definite'.format(
            state=state)
        super(SingularCovarianceError, self).__init__(message)
        self.state = state


class UnderflowError(NumericalError):
    """ Error because every hidden state became numerically impossible at some time step. """

    def __init__(self, timeIndex):
        message = 'All states have zero probability at time step {time}'.format(time=timeIndex)
        super(UnderflowError, self).__init__(message)
        self.timeIndex = timeIndex


class DegenerateStateError(RegimeError):
    """ Error because a hidden state received no responsibility and no prior mass. """

    def __init__(self, state, responsibility):
        message = 'State {state} is degenerate (total responsibility {weight:.3g}) and has ' \
                  'no prior strength to fall back to'.format(state=state, weight=responsibility)
        super(DegenerateStateError, self).__init__(message)
        self.state = state
        self.responsibility = responsibility


class DegenerateFeatureError(RegimeError):
    """ Error because a feature column has zero variance over the fitting window. """

    def __init__(self, column):
        message = 'Feature column {column} has zero variance over the ' \
                  'normalization window'.format(column=column)
        super(DegenerateFeatureError, self).__init__(message)
        self.column = column


class DegenerateRegimeError(RegimeError):
    """ Error because the de-normalized volatility of a state is not positive. """

    def __init__(self, state, volatility):
        message = 'State {state} has a non-positive volatility mean ({vol!r})'.format(
            state=state, vol=volatility)
        super(DegenerateRegimeError, self).__init__(message)
        self.state = state
        self.volatility = volatility


class TrainingFailureError(RegimeError):
    """ Error because every training run failed. """

    def __init__(self, diagnostics):
        message = 'All {count} training runs failed:\n  '.format(count=len(diagnostics)) \
            + '\n  '.join(diagnostics)
        super(TrainingFailureError, self).__init__(message)
        self.diagnostics = list(diagnostics)


class UndefinedSharpeError(RegimeError):
    """ Error because a return series has zero volatility. """

    def __init__(self):
        super(UndefinedSharpeError, self).__init__(
            'The Sharpe ratio is undefined for a series with zero volatility')


class CsvFormatError(RegimeError, ValueError):
    """ Base class for errors in an instrument CSV file. """


class MissingColumnError(CsvFormatError):
    """ Error due to a missing column in a CSV file. """

    def __init__(self, column):
        super(MissingColumnError, self).__init__(
            'The CSV file is missing the \'{column}\' column'.format(column=column))
        self.column = column


class UnparseableValueError(CsvFormatError):
    """ Error due to a value that can not be parsed. """

    def __init__(self, row, column, value):
        message = 'Row {row}: unable to parse {column} value {value!r}'.format(
            row=row, column=column, value=value)
        super(UnparseableValueError, self).__init__(message)
        self.row = row
        self.column = column
        self.value = value


class NonIncreasingDateError(CsvFormatError):
    """ Error because a date is a duplicate or earlier than the previous one. """

    def __init__(self, row, date):
        message = 'Row {row}: date {date} is not after the previous date'.format(
            row=row, date=date)
        super(NonIncreasingDateError, self).__init__(message)
        self.row = row
        self.date = date


class BundleFormatError(RegimeError, ValueError):
    """ Base class for errors in a stored model bundle. """


class FormatVersionError(BundleFormatError):
    """ Error because a model document has an unsupported format version. """

    def __init__(self, found, expected):
        message = 'Unsupported format version {found!r}, expected {expected!r}'.format(
            found=found, expected=expected)
        super(FormatVersionError, self).__init__(message)
        self.found = found


class MissingFieldError(BundleFormatError):
    """ Error because a model document is missing a field. """

    def __init__(self, field):
        super(MissingFieldError, self).__init__(
            'The model document is missing the \'{field}\' field'.format(field=field))
        self.field = field


class ManifestError(RegimeError, ValueError):
    """ Error due to an invalid run manifest or command line. """

    def __init__(self, msg=None):
        message = 'The run manifest is invalid'
        if msg is not None:
            message += ': ' + msg
        super(ManifestError, self).__init__(message)
