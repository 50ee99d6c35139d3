""" Exponentially weighted moment features and their normalization. """

import numpy as np
from scipy.signal import lfilter

from txregime.errors import InvalidInputError, InsufficientDataError, DegenerateFeatureError, \
    MissingFieldError
from txregime.util import isIntType, frozenArray, IndexRange

VARIANCE_FLOOR = 1e-12
MIN_FEATURE_STD = 1e-12


class FeatureConfig(object):
    """ The span s of the exponentially weighted moments, with smoothing factor 2 / (s + 1). """

    def __init__(self, span):
        """
        :raises InvalidInputError: If the span is not an integer >= 1.
        :param span: The span s.
        """
        super(FeatureConfig, self).__init__()
        if not isIntType(span) or span < 1:
            raise InvalidInputError('span', 'expected an integer >= 1, got {span!r}'.format(
                span=span))
        self.span = int(span)

    @property
    def smoothing(self):
        """ The smoothing factor lambda in (0, 1]. """
        return 2.0 / (self.span + 1)

    def __eq__(self, other):
        return isinstance(other, FeatureConfig) and self.span == other.span

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.span)

    def __repr__(self):
        return 'FeatureConfig(span={span})'.format(span=self.span)

    def toDict(self):
        return {'span': self.span}

    @classmethod
    def fromDict(cls, data):
        if 'span' not in data:
            raise MissingFieldError('features.span')
        return cls(data['span'])


def ewmm(series, span, init=None):
    """
    The exponentially weighted moving moment
    out[t] = lambda * series[t] + (1 - lambda) * out[t - 1], lambda = 2 / (span + 1).

    :raises InvalidInputError: If the series is empty or not finite or the span is invalid.
    :param series: The values M_t.
    :param span: The span s >= 1.
    :param init: The value before the first sample, defaults to the first sample.
    :return: The moving moment, one value per sample.
    """
    smoothing = FeatureConfig(span).smoothing
    series = np.asarray(series, dtype=float)
    if series.ndim != 1 or series.shape[0] == 0:
        raise InvalidInputError('series', 'expected a non-empty vector')
    if not np.all(np.isfinite(series)):
        raise InvalidInputError('series', 'all entries must be finite')
    init = series[0] if init is None else float(init)
    out, _ = lfilter([smoothing], [1.0, smoothing - 1.0], series,
                     zi=[(1.0 - smoothing) * init])
    return out


def extractFeatures(returns, config):
    """
    Compute the raw features of a return series: the exponentially weighted mean
    and the exponentially weighted volatility around that running mean.

    :raises InsufficientDataError: If the series is not longer than the span.
    :param returns: The daily returns.
    :param config: The FeatureConfig.
    :return: An n x 2 array of raw features.
    """
    returns = np.asarray(returns, dtype=float)
    if returns.ndim != 1:
        raise InvalidInputError('returns', 'expected a vector')
    if returns.shape[0] <= config.span:
        raise InsufficientDataError(config.span, returns.shape[0])
    mean = ewmm(returns, config.span, init=returns[0])
    squaredDeviation = (returns - mean) ** 2
    variance = ewmm(squaredDeviation, config.span, init=squaredDeviation[0])
    return np.column_stack([mean, np.sqrt(np.maximum(variance, VARIANCE_FLOOR))])


def _checkRaw(raw):
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 2:
        raise InvalidInputError('raw', 'expected an n x d matrix, got shape ' + str(raw.shape))
    return raw


class NormalizationStats(object):
    """ Per column means and standard deviations of the features over the training rows. """

    def __init__(self, means, stds, fittedRange):
        """
        :raises InvalidInputError: If the shapes disagree or a std is not positive.
        :param means: The column means.
        :param stds: The column standard deviations.
        :param fittedRange: The IndexRange of the rows they were computed on.
        """
        super(NormalizationStats, self).__init__()
        self.means = frozenArray(means)
        self.stds = frozenArray(stds)
        if self.means.ndim != 1 or self.means.shape != self.stds.shape:
            raise InvalidInputError('stds', 'means and stds must be vectors of equal length')
        if not np.all(np.isfinite(self.means)) or not np.all(self.stds > 0):
            raise InvalidInputError('stds', 'means must be finite and stds positive')
        self.fittedRange = fittedRange

    @property
    def dim(self):
        return self.means.shape[0]

    def toDict(self):
        return {
            'means': self.means.tolist(),
            'stds': self.stds.tolist(),
            'fitted_range': self.fittedRange.toList(),
        }

    @classmethod
    def fromDict(cls, data):
        """
        :raises MissingFieldError: If a field is missing.
        :param data: A dict created by toDict.
        :return: The normalization stats.
        """
        for field in ['means', 'stds', 'fitted_range']:
            if field not in data:
                raise MissingFieldError('normalization.' + field)
        return cls(data['means'], data['stds'], IndexRange(*data['fitted_range']))


def zscoreFit(raw, trainRange):
    """
    :raises DegenerateFeatureError: If a column is constant over the training rows.
    :param raw: The n x d raw features.
    :param trainRange: The IndexRange of the rows to fit on.
    :return: NormalizationStats with the population statistics of the training rows.
    """
    raw = _checkRaw(raw)
    if len(trainRange) == 0 or trainRange.stop > raw.shape[0]:
        raise InvalidInputError('trainRange', 'expected a non-empty range within the {n} rows'
                                .format(n=raw.shape[0]))
    rows = raw[trainRange.asSlice()]
    means = rows.mean(axis=0)
    stds = rows.std(axis=0)
    for column, std in enumerate(stds):
        if not std > MIN_FEATURE_STD:
            raise DegenerateFeatureError(column)
    return NormalizationStats(means, stds, trainRange)


def zscoreApply(raw, norm):
    """
    :param raw: The n x d raw features of any window.
    :param norm: The NormalizationStats fitted on the training rows.
    :return: The normalized features (raw - mean) / std.
    """
    raw = _checkRaw(raw)
    if raw.shape[1] != norm.dim:
        raise InvalidInputError('raw', 'expected {dim} columns, got {cols}'.format(
            dim=norm.dim, cols=raw.shape[1]))
    return (raw - norm.means) / norm.stds


def zscoreInvert(values, norm):
    """
    :param values: Normalized features.
    :param norm: The NormalizationStats they were normalized with.
    :return: The raw features values * std + mean.
    """
    values = _checkRaw(values)
    if values.shape[1] != norm.dim:
        raise InvalidInputError('values', 'expected {dim} columns, got {cols}'.format(
            dim=norm.dim, cols=values.shape[1]))
    return values * norm.stds + norm.means


class FeatureMatrix(object):
    """
    The raw and normalized features of one instrument.
    The first span rows are the warm-up of the moving moments; they are kept
    but excluded from normalization and training.
    """

    def __init__(self, values, rawValues, norm, config):
        super(FeatureMatrix, self).__init__()
        self.values = frozenArray(values)
        self.rawValues = frozenArray(rawValues)
        if self.values.shape != self.rawValues.shape:
            raise InvalidInputError('values', 'normalized and raw features differ in shape')
        self.norm = norm
        self.config = config

    def __len__(self):
        return self.values.shape[0]

    @property
    def warmup(self):
        """ The number of leading rows dominated by the initialization. """
        return self.config.span

    def trainingRows(self, indexRange):
        """
        :param indexRange: An IndexRange of rows.
        :return: The range without the warm-up rows.
        """
        return indexRange.clippedStart(self.warmup)


def buildFeatureMatrix(returns, config, trainRange):
    """
    Extract the features of a return series and normalize them with the statistics
    of the training rows after the warm-up.

    :raises InsufficientDataError: If no training rows remain after the warm-up.
    :param returns: The daily returns of the whole history.
    :param config: The FeatureConfig.
    :param trainRange: The IndexRange of the training rows.
    :return: The FeatureMatrix.
    """
    raw = extractFeatures(returns, config)
    fitRange = trainRange.clippedStart(config.span)
    if len(fitRange) == 0:
        raise InsufficientDataError(config.span, trainRange.stop)
    norm = zscoreFit(raw, fitRange)
    return FeatureMatrix(zscoreApply(raw, norm), raw, norm, config)
