""" Instrument series: CSV files, synthetic generation, rolling statistics and model bundles. """

import json
import logging
import math
import os

import numpy as np
import pandas as pd
from numpy.lib.stride_tricks import sliding_window_view

from txregime.errors import InvalidInputError, MissingColumnError, UnparseableValueError, \
    NonIncreasingDateError, BundleFormatError, FormatVersionError, MissingFieldError
from txregime.features import FeatureConfig, NormalizationStats
from txregime.hmm import HmmModel, FORMAT_VERSION
from txregime.modes import RegimeLabel
from txregime.util import frozenArray, isIntType, checkProbabilityVector

DATE_FORMAT = '%Y-%m-%d'
DEFAULT_START_DATE = '2000-01-03'
MIN_ROLLING_WINDOW = 4


class InstrumentSeries(object):
    """ The simple daily returns of one instrument. """

    def __init__(self, instrumentId, dates, returns):
        """
        :raises InvalidInputError: If the dates are not strictly increasing
                                   or a return is not finite or not above -1.
        :param instrumentId: The label of the instrument.
        :param dates: The dates of the returns.
        :param returns: The simple return of each day.
        """
        super(InstrumentSeries, self).__init__()
        self.instrumentId = instrumentId
        self.dates = pd.DatetimeIndex(dates)
        self.returns = frozenArray(returns)
        if self.returns.ndim != 1 or self.returns.shape[0] != len(self.dates):
            raise InvalidInputError('returns', 'expected one return per date')
        if not self.dates.is_monotonic_increasing or not self.dates.is_unique:
            raise InvalidInputError('dates', 'the dates must be strictly increasing')
        if not np.all(np.isfinite(self.returns)) or np.any(self.returns <= -1):
            raise InvalidInputError('returns', 'returns must be finite and above -1')

    def __len__(self):
        return self.returns.shape[0]


def _parseDate(value, row):
    try:
        date = pd.to_datetime(value, format=DATE_FORMAT)
    except (ValueError, TypeError):
        raise UnparseableValueError(row, 'date', value)
    if pd.isna(date):
        raise UnparseableValueError(row, 'date', value)
    return date


def _parseNumber(value, row, column):
    try:
        number = float(value)
    except ValueError:
        raise UnparseableValueError(row, column, value)
    if not math.isfinite(number):
        raise UnparseableValueError(row, column, value)
    return number


def loadCsv(path, instrumentId=None):
    """
    Load an instrument from a CSV file with the header date,return or date,close.
    Close prices are converted to simple returns, dropping the first row.
    Rows are numbered like the lines of the file, the header is row 1.

    :raises MissingColumnError: If the date column or both value columns are missing.
    :raises UnparseableValueError: If a date or number can not be parsed.
    :raises NonIncreasingDateError: If a date is not after the date of the previous row.
    :param path: The path of the CSV file.
    :param instrumentId: The label of the instrument, defaults to the file name.
    :return: The InstrumentSeries.
    """
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    frame.columns = [str(column).strip().lower() for column in frame.columns]
    if 'date' not in frame.columns:
        raise MissingColumnError('date')
    if 'return' in frame.columns:
        column = 'return'
    elif 'close' in frame.columns:
        column = 'close'
    else:
        raise MissingColumnError('return')
    dates = []
    values = []
    for index, (dateText, valueText) in enumerate(zip(frame['date'], frame[column])):
        row = index + 2
        date = _parseDate(dateText.strip(), row)
        if dates and date <= dates[-1]:
            raise NonIncreasingDateError(row, dateText)
        value = _parseNumber(valueText.strip(), row, column)
        if column == 'close' and value <= 0:
            raise UnparseableValueError(row, column, valueText)
        dates.append(date)
        values.append(value)
    values = np.asarray(values, dtype=float)
    if column == 'close':
        dates = dates[1:]
        values = values[1:] / values[:-1] - 1.0
    if instrumentId is None:
        instrumentId = os.path.splitext(os.path.basename(path))[0]
    logging.getLogger('txRegime').info('Loaded %d returns of %s from %s', len(values),
                                       instrumentId, path)
    return InstrumentSeries(instrumentId, dates, values)


def saveCsv(series, path):
    """
    Write an instrument as a date,return CSV file that loadCsv reads back exactly.

    :param series: The InstrumentSeries.
    :param path: The path of the file.
    """
    frame = pd.DataFrame({
        'date': series.dates.strftime(DATE_FORMAT),
        'return': [repr(float(value)) for value in series.returns],
    }, columns=['date', 'return'])
    frame.to_csv(path, index=False)


class RegimeSpec(object):
    """ A hidden Markov chain of regimes with normally distributed daily returns. """

    def __init__(self, numStates, transitionMatrix, stateMeans, stateVols, length, seed=0):
        """
        :raises InvalidInputError: If the specification is not valid.
        :param numStates: The number of regimes.
        :param transitionMatrix: The row-stochastic transition matrix between the regimes.
        :param stateMeans: The mean daily return of each regime.
        :param stateVols: The daily return volatility of each regime.
        :param length: The number of days to generate.
        :param seed: The seed of the random generator.
        """
        super(RegimeSpec, self).__init__()
        if not isIntType(numStates) or numStates < 1:
            raise InvalidInputError('numStates', 'expected an integer >= 1')
        if not isIntType(length) or length < 1:
            raise InvalidInputError('length', 'expected an integer >= 1')
        if not isIntType(seed) or seed < 0:
            raise InvalidInputError('seed', 'expected an unsigned integer')
        self.numStates = int(numStates)
        self.transitionMatrix = frozenArray(transitionMatrix)
        if self.transitionMatrix.shape != (numStates, numStates):
            raise InvalidInputError('transitionMatrix', 'expected a {n}x{n} matrix'.format(
                n=numStates))
        for row in self.transitionMatrix:
            checkProbabilityVector(row, numStates, 'transitionMatrix')
        self.stateMeans = frozenArray(stateMeans)
        self.stateVols = frozenArray(stateVols)
        if self.stateMeans.shape != (numStates,) or self.stateVols.shape != (numStates,):
            raise InvalidInputError('stateVols', 'expected one mean and volatility per state')
        if not np.all(np.isfinite(self.stateMeans)) or not np.all(self.stateVols > 0) \
                or not np.all(np.isfinite(self.stateVols)):
            raise InvalidInputError('stateVols', 'means must be finite and volatilities positive')
        self.length = int(length)
        self.seed = int(seed)


def generateSynthetic(spec, instrumentId='synthetic', startDate=DEFAULT_START_DATE):
    """
    Sample a regime path with a uniformly drawn initial regime and the returns it emits.
    The same spec always produces the same output.

    :param spec: The RegimeSpec.
    :param instrumentId: The label of the generated instrument.
    :param startDate: The first business day of the series.
    :return: The InstrumentSeries and the hidden regime of every day.
    """
    rng = np.random.default_rng(spec.seed)
    cumulative = np.cumsum(spec.transitionMatrix, axis=1)
    path = np.empty(spec.length, dtype=int)
    path[0] = rng.integers(spec.numStates)
    draws = rng.random(spec.length - 1)
    lastState = spec.numStates - 1
    for day in range(1, spec.length):
        path[day] = min(int(np.searchsorted(cumulative[path[day - 1]], draws[day - 1],
                                            side='right')), lastState)
    returns = rng.normal(spec.stateMeans[path], spec.stateVols[path])
    dates = pd.bdate_range(startDate, periods=spec.length)
    return InstrumentSeries(instrumentId, dates, returns), path


# Three regimes each: a calm bull market, a bear market and a volatile trendless market.
PRESETS = {
    'equity': {
        'transitionMatrix': [[0.990, 0.005, 0.005],
                             [0.010, 0.980, 0.010],
                             [0.020, 0.020, 0.960]],
        'stateMeans': [0.0008, -0.0008, 0.0],
        'stateVols': [0.007, 0.009, 0.022],
    },
    'co2': {
        'transitionMatrix': [[0.980, 0.010, 0.010],
                             [0.015, 0.970, 0.015],
                             [0.030, 0.030, 0.940]],
        'stateMeans': [0.0020, -0.0020, 0.0],
        'stateVols': [0.024, 0.027, 0.055],
    },
    'fi4': {
        'transitionMatrix': [[0.990, 0.005, 0.005],
                             [0.010, 0.980, 0.010],
                             [0.020, 0.020, 0.960]],
        'stateMeans': [0.0001, -0.0001, 0.0],
        'stateVols': [0.0015, 0.0017, 0.0035],
    },
}


def presetSpec(name, length=5000, seed=0):
    """
    :raises InvalidInputError: If there is no preset with the name.
    :param name: The name of a preset in PRESETS.
    :param length: The number of days to generate.
    :param seed: The seed of the random generator.
    :return: The RegimeSpec of the preset.
    """
    if name not in PRESETS:
        raise InvalidInputError('preset', 'unknown preset {name!r}, expected one of {names}'
                                .format(name=name, names=', '.join(sorted(PRESETS))))
    preset = PRESETS[name]
    return RegimeSpec(len(preset['stateMeans']), preset['transitionMatrix'],
                      preset['stateMeans'], preset['stateVols'], length, seed)


def rollingStats(series, window=252):
    """
    Trailing window moments of the returns: mean, standard deviation, skewness and
    excess kurtosis, all from population central moments. Days before the first
    full window and the skewness and kurtosis of constant windows are NaN.

    :raises InvalidInputError: If the window is shorter than 4 days or longer than the series.
    :param series: The InstrumentSeries.
    :param window: The number of days per window.
    :return: A DataFrame with the columns date, mean, std, skew and kurt and a dict
             mapping each statistic to its (min, max) over all full windows.
    """
    if not isIntType(window) or window < MIN_ROLLING_WINDOW or window > len(series):
        raise InvalidInputError('window', 'expected an integer between {low} and {high}, got '
                                          '{window!r}'.format(low=MIN_ROLLING_WINDOW,
                                                              high=len(series), window=window))
    windows = sliding_window_view(np.asarray(series.returns), window)
    means = windows.mean(axis=1)
    deviations = windows - means[:, np.newaxis]
    secondMoments = np.mean(deviations ** 2, axis=1)
    constant = np.ptp(windows, axis=1) == 0
    with np.errstate(divide='ignore', invalid='ignore'):
        skews = np.mean(deviations ** 3, axis=1) / secondMoments ** 1.5
        kurts = np.mean(deviations ** 4, axis=1) / secondMoments ** 2 - 3.0
    stds = np.where(constant, 0.0, np.sqrt(secondMoments))
    skews[constant] = np.nan
    kurts[constant] = np.nan
    padding = np.full(window - 1, np.nan)
    frame = pd.DataFrame({
        'date': series.dates.strftime(DATE_FORMAT),
        'mean': np.concatenate([padding, means]),
        'std': np.concatenate([padding, stds]),
        'skew': np.concatenate([padding, skews]),
        'kurt': np.concatenate([padding, kurts]),
    }, columns=['date', 'mean', 'std', 'skew', 'kurt'])
    summary = {}
    for name, values in [('mean', means), ('std', stds), ('skew', skews), ('kurt', kurts)]:
        defined = values[~np.isnan(values)]
        summary[name] = (float(defined.min()), float(defined.max())) if defined.shape[0] \
            else (float('nan'), float('nan'))
    return frame, summary


def writeRollingStatsCsv(frame, path):
    """
    :param frame: The DataFrame returned by rollingStats.
    :param path: The path of the CSV file, undefined values are written as empty cells.
    """
    frame.to_csv(path, index=False, na_rep='')


class ModelBundle(object):
    """ A fitted model together with everything needed to apply it to new returns. """

    def __init__(self, model, norm, featureConfig, instrumentId, labels=None, objective=None,
                 provenance=None):
        """
        :param model: The HmmModel fitted on normalized features.
        :param norm: The NormalizationStats of the training features.
        :param featureConfig: The FeatureConfig of the features.
        :param instrumentId: The instrument the model was trained on.
        :param labels: The RegimeLabel of every state or None.
        :param objective: The final training objective or None.
        :param provenance: A JSON compatible dict of the settings the model was trained with
                           or None.
        """
        super(ModelBundle, self).__init__()
        self.model = model
        self.norm = norm
        self.featureConfig = featureConfig
        self.instrumentId = instrumentId
        self.labels = None if labels is None else list(labels)
        self.objective = objective
        self.provenance = provenance

    def toDict(self):
        return {
            'format_version': FORMAT_VERSION,
            'instrument_id': self.instrumentId,
            'model': self.model.toDict(),
            'normalization': self.norm.toDict(),
            'features': self.featureConfig.toDict(),
            'labels': None if self.labels is None else [label.value for label in self.labels],
            'objective': self.objective,
            'provenance': self.provenance,
        }

    @classmethod
    def fromDict(cls, data):
        """
        :raises FormatVersionError: If the format version is not supported.
        :raises MissingFieldError: If a field is missing.
        :raises InvalidModelError: If the model parameters violate an invariant.
        :param data: A dict created by toDict.
        :return: The bundle.
        """
        if not isinstance(data, dict):
            raise BundleFormatError('The model document must be a JSON object')
        if 'format_version' not in data:
            raise MissingFieldError('format_version')
        if data['format_version'] != FORMAT_VERSION:
            raise FormatVersionError(data['format_version'], FORMAT_VERSION)
        for field in ['instrument_id', 'model', 'normalization', 'features']:
            if field not in data:
                raise MissingFieldError(field)
        try:
            labels = data.get('labels')
            labels = None if labels is None else [RegimeLabel(label) for label in labels]
        except ValueError as error:
            raise BundleFormatError('Invalid regime label: {error}'.format(error=error))
        return cls(HmmModel.fromDict(data['model']),
                   NormalizationStats.fromDict(data['normalization']),
                   FeatureConfig.fromDict(data['features']), data['instrument_id'],
                   labels, data.get('objective'), data.get('provenance'))


def saveModel(path, bundle):
    """
    Write a bundle as a JSON document. Identical bundles produce identical files.

    :param path: The path of the file.
    :param bundle: The ModelBundle.
    """
    with open(path, 'w') as bundleFile:
        json.dump(bundle.toDict(), bundleFile, sort_keys=True, indent=2, allow_nan=False)
        bundleFile.write('\n')


def loadModel(path):
    """
    :raises BundleFormatError: If the file is not a valid bundle document.
    :param path: The path of the file.
    :return: The ModelBundle.
    """
    with open(path, 'r') as bundleFile:
        try:
            data = json.load(bundleFile)
        except ValueError as error:
            raise BundleFormatError('Unable to parse the model document {path}: {error}'.format(
                path=path, error=error))
    return ModelBundle.fromDict(data)
