""" Tests for the instrument series, the synthetic generator and the model bundles. """

import json
import math
import os

import numpy as np
import pandas as pd
from scipy import stats

from txregime.data import InstrumentSeries, loadCsv, saveCsv, RegimeSpec, generateSynthetic, \
    presetSpec, rollingStats, writeRollingStatsCsv, ModelBundle, saveModel, loadModel
from txregime.errors import InvalidInputError, MissingColumnError, UnparseableValueError, \
    NonIncreasingDateError, InvalidModelError, MissingFieldError, BundleFormatError, \
    FormatVersionError
from txregime.features import FeatureConfig, NormalizationStats
from txregime.hmm import HmmModel
from txregime.modes import RegimeLabel
from txregime.util import IndexRange

from tests import TwistedTestCase


class CsvTest(TwistedTestCase):
    """ Test reading and writing instrument CSV files. """

    def _writeCsv(self, content, name='test.csv'):
        """
        :param content: The content of the file.
        :param name: The file name.
        :return: The path of a new file with the content.
        """
        directory = self.mktemp()
        os.makedirs(directory)
        path = os.path.join(directory, name)
        with open(path, 'w') as csvFile:
            csvFile.write(content)
        return path

    def testCloses(self):
        """ Test that close prices are converted to simple returns. """
        series = loadCsv(self._writeCsv(
            'date,close\n2020-01-01,100\n2020-01-02,101\n2020-01-03,100.495\n'))
        self.assertArrayAlmostEqual([0.01, -0.005], series.returns, 1e-12,
                                    msg='Expected the simple returns of the closes.')
        self.assertEqual([pd.Timestamp('2020-01-02'), pd.Timestamp('2020-01-03')],
                         list(series.dates), msg='Expected the first date to be dropped.')

    def testReturns(self):
        """ Test that returns are read unchanged and the file name labels the series. """
        series = loadCsv(self._writeCsv('date,return\n2020-01-01,0.01\n2020-01-02,-0.02\n',
                                        name='spx.csv'))
        self.assertEqual([0.01, -0.02], series.returns.tolist(), msg='Expected the returns.')
        self.assertEqual('spx', series.instrumentId, msg='Expected the file name as label.')
        self.assertEqual(2, len(series), msg='Expected two days.')

    def testDuplicateDate(self):
        """ Test that a repeated date names its row. """
        path = self._writeCsv('date,return\n2020-01-01,0.01\n2020-01-01,0.02\n')
        with self.assertRaises(NonIncreasingDateError) as context:
            loadCsv(path)
        self.assertEqual(3, context.exception.row, msg='Expected the second data row.')

    def testMissingColumn(self):
        """ Test that a file without a value column is rejected. """
        with self.assertRaises(MissingColumnError) as context:
            loadCsv(self._writeCsv('date,price\n2020-01-01,100\n'))
        self.assertEqual('return', context.exception.column, msg='Expected the return column.')
        self.assertRaises(MissingColumnError, loadCsv, self._writeCsv('day,return\n1,0.01\n'))

    def testUnparseableValue(self):
        """ Test that an invalid number or date names its row and column. """
        with self.assertRaises(UnparseableValueError) as context:
            loadCsv(self._writeCsv('date,return\n2020-01-01,0.01\n2020-01-02,abc\n'))
        self.assertEqual((3, 'return', 'abc'), (context.exception.row, context.exception.column,
                                                context.exception.value),
                         msg='Expected the location of the invalid value.')
        with self.assertRaises(UnparseableValueError) as context:
            loadCsv(self._writeCsv('date,return\n01/02/2020,0.01\n'))
        self.assertEqual('date', context.exception.column, msg='Expected the date column.')
        self.assertRaises(UnparseableValueError, loadCsv,
                          self._writeCsv('date,close\n2020-01-01,0\n2020-01-02,1\n'))

    def testSaveAndLoad(self):
        """ Test that a saved series is read back exactly. """
        series, _ = generateSynthetic(presetSpec('co2', 50, seed=4), instrumentId='co2')
        path = self.mktemp() + '.csv'
        saveCsv(series, path)
        restored = loadCsv(path)
        self.assertEqual(series.returns.tolist(), restored.returns.tolist(),
                         msg='Expected identical returns.')
        self.assertTrue(series.dates.equals(restored.dates), msg='Expected identical dates.')

    def testInvalidSeries(self):
        """ Test that a series needs one finite return above -1 per increasing date. """
        dates = pd.bdate_range('2020-01-01', periods=2)
        self.assertRaises(InvalidInputError, InstrumentSeries, 'a', dates, [0.01])
        self.assertRaises(InvalidInputError, InstrumentSeries, 'a', dates, [0.01, -1.0])
        self.assertRaises(InvalidInputError, InstrumentSeries, 'a', dates[::-1], [0.01, 0.02])


class SyntheticTest(TwistedTestCase):
    """ Test the synthetic regime series. """

    def testDeterminism(self):
        """ Test that equal specs generate equal series. """
        first, firstPath = generateSynthetic(presetSpec('equity', 500, seed=7))
        second, secondPath = generateSynthetic(presetSpec('equity', 500, seed=7))
        other, _ = generateSynthetic(presetSpec('equity', 500, seed=8))
        self.assertEqual(first.returns.tolist(), second.returns.tolist(),
                         msg='Expected identical returns.')
        self.assertEqual(firstPath.tolist(), secondPath.tolist(), msg='Expected identical paths.')
        self.assertNotEqual(first.returns.tolist(), other.returns.tolist(),
                            msg='Expected another seed to change the returns.')

    def testIdentityTransitions(self):
        """ Test that the regime never changes without transitions. """
        _, path = generateSynthetic(RegimeSpec(3, np.eye(3), [0.0, 0.0, 0.0],
                                               [0.01, 0.01, 0.01], 300, seed=1))
        self.assertEqual(1, len(set(path.tolist())), msg='Expected a constant regime.')

    def testTransitionFrequencies(self):
        """ Test that the empirical transition frequencies approach the transition matrix. """
        spec = presetSpec('co2', 100000, seed=2)
        _, path = generateSynthetic(spec)
        counts = np.zeros((3, 3))
        np.add.at(counts, (path[:-1], path[1:]), 1.0)
        frequencies = counts / counts.sum(axis=1, keepdims=True)
        self.assertArrayAlmostEqual(spec.transitionMatrix, frequencies, 0.01,
                                    msg='Expected the transition probabilities.')

    def testStateMoments(self):
        """ Test that the returns of each regime have the moments of that regime. """
        spec = presetSpec('equity', 50000, seed=3)
        series, path = generateSynthetic(spec)
        for state in range(3):
            returns = series.returns[path == state]
            self.assertLess(abs(returns.std() - spec.stateVols[state]) / spec.stateVols[state],
                            0.05, msg='State {s}.'.format(s=state))

    def testBusinessDays(self):
        """ Test that the series starts at the given date and skips weekends. """
        series, _ = generateSynthetic(presetSpec('fi4', 10), startDate='2020-01-03')
        self.assertEqual(pd.Timestamp('2020-01-03'), series.dates[0],
                         msg='Expected the start date.')
        self.assertEqual(pd.Timestamp('2020-01-06'), series.dates[1],
                         msg='Expected the following Monday.')

    def testInvalidSpec(self):
        """ Test that invalid specs and presets are rejected. """
        self.assertRaises(InvalidInputError, RegimeSpec, 2, [[0.5, 0.6], [0.5, 0.5]],
                          [0.0, 0.0], [0.01, 0.01], 10)
        self.assertRaises(InvalidInputError, RegimeSpec, 2, np.eye(2), [0.0, 0.0],
                          [0.01, 0.0], 10)
        self.assertRaises(InvalidInputError, RegimeSpec, 2, np.eye(2), [0.0, 0.0],
                          [0.01, 0.01], 0)
        self.assertRaises(InvalidInputError, presetSpec, 'gold')


class RollingStatsTest(TwistedTestCase):
    """ Test the trailing window moments. """

    @staticmethod
    def _series(returns):
        return InstrumentSeries('test', pd.bdate_range('2020-01-01', periods=len(returns)),
                                returns)

    def testConstant(self):
        """ Test that constant windows have zero volatility and undefined shape. """
        frame, summary = rollingStats(self._series(np.full(10, 0.001)), window=5)
        self.assertTrue(frame[['mean', 'std', 'skew', 'kurt']].iloc[:4].isna().all().all(),
                        msg='Expected undefined values before the first full window.')
        self.assertEqual([0.0] * 6, frame['std'].iloc[4:].tolist(), msg='Expected zero std.')
        self.assertTrue(frame['skew'].iloc[4:].isna().all(), msg='Expected undefined skewness.')
        self.assertTrue(frame['kurt'].iloc[4:].isna().all(), msg='Expected undefined kurtosis.')
        self.assertTrue(all(math.isnan(value) for value in summary['skew']),
                        msg='Expected an undefined skewness range.')

    def testAlternating(self):
        """ Test the moments of a symmetric two point series. """
        frame, summary = rollingStats(self._series([0.01, -0.01] * 6), window=4)
        self.assertEqual([0.0] * 9, frame['skew'].iloc[3:].tolist(),
                         msg='Expected zero skewness.')
        self.assertArrayAlmostEqual(np.full(9, -2.0), frame['kurt'].iloc[3:].values, 1e-12,
                                    msg='Expected an excess kurtosis of -2.')
        self.assertArrayAlmostEqual([0.01, 0.01], summary['std'], 1e-15,
                                    msg='Expected a constant std of 0.01.')

    def testWholeSample(self):
        """ Test that a window over the whole series gives the sample moments. """
        returns = np.random.default_rng(5).standard_t(5, size=300) * 0.01
        frame, _ = rollingStats(self._series(returns), window=300)
        last = frame.iloc[-1]
        self.assertAlmostEqual(returns.mean(), last['mean'], delta=1e-15,
                               msg='Expected the sample mean.')
        self.assertAlmostEqual(returns.std(), last['std'], delta=1e-15,
                               msg='Expected the population std.')
        self.assertAlmostEqual(stats.skew(returns), last['skew'], delta=1e-10,
                               msg='Expected the sample skewness.')
        self.assertAlmostEqual(stats.kurtosis(returns), last['kurt'], delta=1e-10,
                               msg='Expected the excess kurtosis.')

    def testWrite(self):
        """ Test that undefined values are written as empty cells. """
        frame, _ = rollingStats(self._series(np.full(6, 0.002)), window=4)
        path = self.mktemp()
        writeRollingStatsCsv(frame, path)
        with open(path) as csvFile:
            lines = csvFile.read().splitlines()
        self.assertEqual('date,mean,std,skew,kurt', lines[0], msg='Expected the header.')
        self.assertEqual('2020-01-01,,,,', lines[1], msg='Expected empty cells.')
        self.assertEqual(7, len(lines), msg='Expected one line per day.')

    def testInvalidWindow(self):
        """ Test that windows below four days or above the series length are rejected. """
        series = self._series(np.zeros(10))
        self.assertRaises(InvalidInputError, rollingStats, series, 3)
        self.assertRaises(InvalidInputError, rollingStats, series, 11)
        self.assertRaises(InvalidInputError, rollingStats, series, 5.5)


class ModelBundleTest(TwistedTestCase):
    """ Test saving and loading fitted models. """

    @staticmethod
    def _bundle():
        model = HmmModel([0.5, 0.3, 0.2], [[0.9, 0.05, 0.05], [0.1, 0.8, 0.1], [0.2, 0.2, 0.6]],
                         [[1.0, -0.5], [-1.0, 0.2], [0.1, 2.0]],
                         [np.eye(2), [[2.0, 0.3], [0.3, 1.0]], 0.5 * np.eye(2)])
        norm = NormalizationStats([0.0004, 0.01], [0.003, 0.004], IndexRange(30, 1000))
        return ModelBundle(model, norm, FeatureConfig(30), 'spx',
                           [RegimeLabel.BULL, RegimeLabel.BEAR, RegimeLabel.HIGH_VOL], -1234.5,
                           {'val_start': '2012-01-01', 'test_start': '2016-01-01', 'num_states': 3})

    def _save(self, data):
        path = self.mktemp()
        with open(path, 'w') as bundleFile:
            json.dump(data, bundleFile)
        return path

    def testRoundTrip(self):
        """ Test that a loaded bundle equals the saved one. """
        bundle = self._bundle()
        path = self.mktemp()
        saveModel(path, bundle)
        restored = loadModel(path)
        self.assertEqual(bundle.toDict(), restored.toDict(), msg='Expected an equal bundle.')
        self.assertEqual(bundle.labels, restored.labels, msg='Expected the labels.')
        self.assertEqual(FeatureConfig(30), restored.featureConfig,
                         msg='Expected the feature configuration.')
        self.assertEqual('2016-01-01', restored.provenance['test_start'],
                         msg='Expected the training settings.')

    def testIdenticalFiles(self):
        """ Test that saving the same bundle twice writes identical files. """
        first, second = self.mktemp(), self.mktemp()
        saveModel(first, self._bundle())
        saveModel(second, self._bundle())
        with open(first, 'rb') as firstFile, open(second, 'rb') as secondFile:
            self.assertEqual(firstFile.read(), secondFile.read(), msg='Expected identical bytes.')

    def testCorruptedTransitionRow(self):
        """ Test that a transition row that does not sum to one is rejected. """
        data = self._bundle().toDict()
        data['model']['transition_matrix'][1] = [0.1, 0.8, 0.2]
        self.assertRaises(InvalidModelError, loadModel, self._save(data))

    def testMissingField(self):
        """ Test that a missing field is named. """
        data = self._bundle().toDict()
        del data['normalization']
        with self.assertRaises(MissingFieldError) as context:
            loadModel(self._save(data))
        self.assertEqual('normalization', context.exception.field,
                         msg='Expected the missing field.')

    def testVersion(self):
        """ Test that another format version is rejected. """
        data = self._bundle().toDict()
        data['format_version'] = 'regime-hmm/0'
        self.assertRaises(FormatVersionError, loadModel, self._save(data))

    def testInvalidDocument(self):
        """ Test that files that are not bundle documents are rejected. """
        path = self.mktemp()
        with open(path, 'w') as bundleFile:
            bundleFile.write('{"format_version": ')
        self.assertRaises(BundleFormatError, loadModel, path)
        self.assertRaises(BundleFormatError, loadModel, self._save([1, 2]))
        data = self._bundle().toDict()
        data['labels'] = ['bull', 'sideways', 'bear']
        self.assertRaises(BundleFormatError, loadModel, self._save(data))
