""" Tests for the errors of the toolkit. """

from txregime.errors import RegimeError, InvalidInputError, InsufficientDataError, \
    InvalidModelError, NumericalError, SingularCovarianceError, UnderflowError, \
    DegenerateStateError, DegenerateFeatureError, DegenerateRegimeError, TrainingFailureError, \
    UndefinedSharpeError, CsvFormatError, MissingColumnError, UnparseableValueError, \
    NonIncreasingDateError, BundleFormatError, FormatVersionError, MissingFieldError, \
    ManifestError

from tests import TwistedTestCase


class RegimeErrorTest(TwistedTestCase):
    """ Test the messages and attributes of the errors. """

    def testHierarchy(self):
        """ Test that every error is a RegimeError and the input errors are ValueErrors. """
        errors = [InvalidInputError('span', 'too small'), InsufficientDataError(30, 10),
                  InvalidModelError('bad'), SingularCovarianceError(1), UnderflowError(5),
                  DegenerateStateError(0, 0.0), DegenerateFeatureError(1),
                  DegenerateRegimeError(2, -0.1), TrainingFailureError(['a']),
                  UndefinedSharpeError(), MissingColumnError('date'),
                  UnparseableValueError(2, 'return', 'x'), NonIncreasingDateError(3, '2020'),
                  FormatVersionError('v0', 'v1'), MissingFieldError('model'), ManifestError()]
        for error in errors:
            self.assertIsInstance(error, RegimeError, msg=type(error).__name__)
            self.assertEqual(error.message, str(error),
                             msg='Expected the message as the string of {name}.'.format(
                                 name=type(error).__name__))
        for error in [InvalidInputError('a', 'b'), InvalidModelError('c'),
                      MissingColumnError('date'), MissingFieldError('model'), ManifestError()]:
            self.assertIsInstance(error, ValueError, msg=type(error).__name__)
        self.assertIsInstance(UnderflowError(0), NumericalError, msg='Expected a NumericalError.')
        self.assertIsInstance(SingularCovarianceError(0), ArithmeticError,
                              msg='Expected an ArithmeticError.')
        self.assertIsInstance(UnparseableValueError(1, 'a', 'b'), CsvFormatError,
                              msg='Expected a CsvFormatError.')
        self.assertIsInstance(FormatVersionError('a', 'b'), BundleFormatError,
                              msg='Expected a BundleFormatError.')

    def testInvalidInput(self):
        """ Test that the invalid argument is named. """
        error = InvalidInputError('span', 'expected an integer >= 1')
        self.assertEqual('Invalid value for \'span\': expected an integer >= 1', str(error),
                         msg='Expected the name and the reason.')
        self.assertEqual(('span', 'expected an integer >= 1'), (error.name, error.reason),
                         msg='Expected the name and the reason as attributes.')

    def testInsufficientData(self):
        """ Test the required and the actual number of rows. """
        error = InsufficientDataError(30, 12)
        self.assertIsInstance(error, InvalidInputError, msg='Expected an InvalidInputError.')
        self.assertEqual((30, 12), (error.required, error.actual), msg='Expected both counts.')
        self.assertIn('30', str(error), msg='Expected the required count in the message.')

    def testStateErrors(self):
        """ Test that the errors of a state name it. """
        self.assertEqual(2, SingularCovarianceError(2).state, msg='Expected the state.')
        error = DegenerateStateError(1, 1e-12)
        self.assertEqual((1, 1e-12), (error.state, error.responsibility),
                         msg='Expected the state and its responsibility.')
        self.assertEqual(-0.01, DegenerateRegimeError(0, -0.01).volatility,
                         msg='Expected the volatility.')
        self.assertEqual(17, UnderflowError(17).timeIndex, msg='Expected the time step.')

    def testTrainingFailure(self):
        """ Test that every diagnostic is part of the message. """
        error = TrainingFailureError(['run 0: degenerate', 'run 1: singular'])
        self.assertEqual(['run 0: degenerate', 'run 1: singular'], error.diagnostics,
                         msg='Expected the diagnostics.')
        self.assertEqual('All 2 training runs failed:\n  run 0: degenerate\n  run 1: singular',
                         str(error), msg='Expected one line per run.')

    def testCsvErrors(self):
        """ Test that the CSV errors locate the problem. """
        error = UnparseableValueError(4, 'close', 'n/a')
        self.assertEqual('Row 4: unable to parse close value \'n/a\'', str(error),
                         msg='Expected the row, the column and the value.')
        error = NonIncreasingDateError(7, '2020-01-03')
        self.assertEqual((7, '2020-01-03'), (error.row, error.date), msg='Expected the location.')
        self.assertEqual('The CSV file is missing the \'date\' column',
                         str(MissingColumnError('date')), msg='Expected the column.')

    def testBundleErrors(self):
        """ Test the errors of the model documents. """
        error = FormatVersionError('regime-hmm/0', 'regime-hmm/1')
        self.assertEqual('regime-hmm/0', error.found, msg='Expected the found version.')
        self.assertIn('regime-hmm/1', str(error), msg='Expected the supported version.')
        self.assertEqual('model', MissingFieldError('model').field, msg='Expected the field.')

    def testManifest(self):
        """ Test the optional detail of a manifest error. """
        self.assertEqual('The run manifest is invalid', str(ManifestError()),
                         msg='Expected the plain message.')
        self.assertEqual('The run manifest is invalid: missing "runs"',
                         str(ManifestError('missing "runs"')), msg='Expected the detail.')
