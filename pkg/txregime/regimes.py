""" Expected Sharpe ratios of the hidden states and regime labels. """

import warnings

import numpy as np

from txregime.errors import InvalidInputError, DegenerateRegimeError
from txregime.hmm import propagateStateProbs
from txregime.modes import RegimeLabel
from txregime.util import frozenArray, checkHorizon


class EsrVector(object):
    """ The expected Sharpe ratio of every state, with optional regime labels. """

    def __init__(self, values, stateVols, labels=None, diagnostic=False):
        """
        :param values: The per state expected Sharpe ratios.
        :param stateVols: The de-normalized volatility feature mean of every state.
        :param labels: A RegimeLabel per state or None if the states are not labelled.
        :param diagnostic: Whether the labelling was ambiguous.
        """
        super(EsrVector, self).__init__()
        self.values = frozenArray(values)
        self.stateVols = frozenArray(stateVols)
        self.labels = None if labels is None else list(labels)
        self.diagnostic = diagnostic

    def __len__(self):
        return self.values.shape[0]

    def labelNames(self):
        """
        :return: The label of every state as a string, 'state<n>' if unlabelled.
        """
        if self.labels is None:
            return ['state{num}'.format(num=state + 1) for state in range(len(self))]
        return [label.value for label in self.labels]

    def stateOf(self, label):
        """
        :param label: A RegimeLabel.
        :return: The index of the state with that label.
        """
        if self.labels is None or label not in self.labels:
            raise InvalidInputError('label', 'no state is labelled {label}'.format(
                label=label.value))
        return self.labels.index(label)


def denormalizedMeans(model, norm):
    """
    :param model: A model fitted on normalized features.
    :param norm: The NormalizationStats of the features.
    :return: The S x d state means in the units of the raw features.
    """
    if model.dim != norm.dim:
        raise InvalidInputError('norm', 'the model has {dim} features, the normalization {n}'
                                .format(dim=model.dim, n=norm.dim))
    return model.stateMeans * norm.stds + norm.means


def esrValues(model, norm):
    """
    :raises DegenerateRegimeError: If a de-normalized volatility mean is not positive.
    :param model: A model fitted on the normalized (mean, volatility) features.
    :param norm: The NormalizationStats of the features.
    :return: The per state ratios of the return feature mean to the volatility feature mean.
    """
    if model.dim != 2:
        raise InvalidInputError('model', 'expected a model of the two moment features')
    means = denormalizedMeans(model, norm)
    for state, volatility in enumerate(means[:, 1]):
        if not volatility > 0:
            raise DegenerateRegimeError(state, float(volatility))
    return means[:, 0] / means[:, 1]


def esr(model, norm):
    """
    :param model: A model fitted on the normalized (mean, volatility) features.
    :param norm: The NormalizationStats of the features.
    :return: The unlabelled EsrVector.
    """
    return EsrVector(esrValues(model, norm), denormalizedMeans(model, norm)[:, 1])


def _values(esrVector):
    return esrVector.values if isinstance(esrVector, EsrVector) else np.asarray(esrVector,
                                                                                dtype=float)


def pesr(esrVector, filteredLast, transitionMatrix, horizon):
    """
    The predicted expected Sharpe ratio h steps ahead: the state ratios
    weighted with the forecasted state probabilities.

    :param esrVector: An EsrVector or the per state ratios.
    :param filteredLast: The filtered state probabilities of the last observation.
    :param transitionMatrix: The S x S transition matrix.
    :param horizon: The number of steps h >= 0.
    :return: The predicted ratio.
    """
    values = _values(esrVector)
    forecast = propagateStateProbs(transitionMatrix, filteredLast, horizon)
    if forecast.shape != values.shape:
        raise InvalidInputError('esr', 'expected one value per state')
    return float(values.dot(forecast))


def pesrSeries(esrVector, filtered, transitionMatrix, horizon):
    """
    :param esrVector: An EsrVector or the per state ratios.
    :param filtered: The T x S filtered state probabilities.
    :param transitionMatrix: The S x S transition matrix.
    :param horizon: The number of steps h >= 0.
    :return: The predicted ratio for every row of filtered.
    """
    values = _values(esrVector)
    horizon = checkHorizon(horizon)
    filtered = np.asarray(filtered, dtype=float)
    transitionMatrix = np.asarray(transitionMatrix, dtype=float)
    if filtered.ndim != 2 or filtered.shape[1] != values.shape[0] \
            or transitionMatrix.shape != (values.shape[0], values.shape[0]):
        raise InvalidInputError('filtered', 'expected one column per state')
    return filtered.dot(np.linalg.matrix_power(transitionMatrix, horizon)).dot(values)


def labelRegimes(esrValues, stateVols):
    """
    Label three states: the state with the highest volatility is the high volatility regime,
    of the other two the one with the higher ratio is the bull and the other the bear regime.
    Ties are resolved in favour of the lower state index.
    The labelling is flagged if it involved a tie or if the high volatility state
    is not the one with the ratio closest to zero.

    :param esrValues: The three per state ratios.
    :param stateVols: The three de-normalized state volatilities.
    :return: The list of RegimeLabel and the diagnostic flag.
    """
    esrValues = np.asarray(esrValues, dtype=float)
    stateVols = np.asarray(stateVols, dtype=float)
    if esrValues.shape != (3,) or stateVols.shape != (3,):
        raise InvalidInputError('esrValues', 'regime labels require exactly three states')
    highVol = int(np.argmax(stateVols))
    rest = [state for state in range(3) if state != highVol]
    bull, bear = rest if esrValues[rest[0]] >= esrValues[rest[1]] else rest[::-1]
    labels = [None] * 3
    labels[highVol] = RegimeLabel.HIGH_VOL
    labels[bull] = RegimeLabel.BULL
    labels[bear] = RegimeLabel.BEAR
    reasons = []
    if np.sum(stateVols == stateVols[highVol]) > 1 or esrValues[bull] == esrValues[bear]:
        reasons.append('tied values')
    if int(np.argmin(np.abs(esrValues))) != highVol:
        reasons.append('the high volatility state {state} does not have the ratio closest to '
                       'zero'.format(state=highVol))
    if reasons:
        warnings.warn('Ambiguous regime labels: ' + '; '.join(reasons), RuntimeWarning)
    return labels, bool(reasons)


def describeRegimes(model, norm):
    """
    :param model: A model fitted on the normalized (mean, volatility) features.
    :param norm: The NormalizationStats of the features.
    :return: The EsrVector, labelled if the model has three states.
    """
    result = esr(model, norm)
    if len(result) != 3:
        return result
    labels, diagnostic = labelRegimes(result.values, result.stateVols)
    return EsrVector(result.values, result.stateVols, labels, diagnostic)
