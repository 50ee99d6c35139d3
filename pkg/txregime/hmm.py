""" Inference for hidden Markov models with Gaussian emissions. """

import numpy as np

from scipy import linalg
from scipy.special import logsumexp

from txregime.errors import InvalidInputError, InvalidModelError, MissingFieldError, \
    FormatVersionError, SingularCovarianceError, UnderflowError
from txregime.util import frozenArray, checkObservations, checkProbabilityVector, checkHorizon, \
    isIntType

FORMAT_VERSION = 'regime-hmm/1'
MODEL_TOLERANCE = 1e-12
COVARIANCE_FLOOR = 1e-8
COVARIANCE_RIDGE = 1e-6
_LOG_2PI = np.log(2.0 * np.pi)
_MODEL_FIELDS = ['num_states', 'dim', 'initial_probs', 'transition_matrix',
                 'state_means', 'state_covariances']


def floorCovariance(covariance):
    """
    Symmetrize a covariance matrix and add a ridge to its diagonal if its
    smallest eigenvalue is below COVARIANCE_FLOOR.
    The ridge is COVARIANCE_RIDGE times the mean diagonal, raised if necessary
    so that the result clears the floor.

    :param covariance: A d x d matrix.
    :return: The floored d x d matrix.
    """
    covariance = np.asarray(covariance, dtype=float)
    covariance = (covariance + covariance.T) / 2.0
    minEigenvalue = np.linalg.eigvalsh(covariance)[0]
    if minEigenvalue >= COVARIANCE_FLOOR:
        return covariance
    ridge = COVARIANCE_RIDGE * max(float(np.mean(np.diag(covariance))), 0.0)
    ridge = max(ridge, 2.0 * COVARIANCE_FLOOR - minEigenvalue)
    return covariance + ridge * np.eye(covariance.shape[0])


class HmmModel(object):
    """
    The parameters of a hidden Markov model with S hidden states and
    Gaussian emissions in d dimensions: the initial state probabilities,
    the row-stochastic transition matrix and per state means and covariances.

    Instances are immutable and can be shared between threads.
    """
    initialProbs = None
    transitionMatrix = None
    stateMeans = None
    stateCovariances = None

    def __init__(self, initialProbs, transitionMatrix, stateMeans, stateCovariances,
                 validate=True):
        """
        :raises InvalidModelError: If the parameters violate the model invariants.
        :param initialProbs: The length S initial state distribution.
        :param transitionMatrix: The S x S transition matrix, A[i, j] = P(z_t = j | z_t-1 = i).
        :param stateMeans: The S x d state means (a length S vector if d = 1).
        :param stateCovariances: The S x d x d state covariances (a length S vector if d = 1).
        :param validate: Whether to check the invariants. Only disable this for parameters
                         that are already known to be valid.
        """
        super(HmmModel, self).__init__()
        initialProbs = np.asarray(initialProbs, dtype=float)
        transitionMatrix = np.asarray(transitionMatrix, dtype=float)
        stateMeans = np.asarray(stateMeans, dtype=float)
        stateCovariances = np.asarray(stateCovariances, dtype=float)
        if stateMeans.ndim == 1:
            stateMeans = stateMeans[:, np.newaxis]
        if stateCovariances.ndim == 1:
            stateCovariances = stateCovariances[:, np.newaxis, np.newaxis]
        self._checkShapes(initialProbs, transitionMatrix, stateMeans, stateCovariances)
        if validate:
            self._checkInvariants(initialProbs, transitionMatrix, stateMeans, stateCovariances)
        self.initialProbs = frozenArray(initialProbs)
        self.transitionMatrix = frozenArray(transitionMatrix)
        self.stateMeans = frozenArray(stateMeans)
        self.stateCovariances = frozenArray(stateCovariances)

    @property
    def numStates(self):
        """ The number of hidden states S. """
        return self.initialProbs.shape[0]

    @property
    def dim(self):
        """ The dimension d of the observations. """
        return self.stateMeans.shape[1]

    @staticmethod
    def _checkShapes(initialProbs, transitionMatrix, stateMeans, stateCovariances):
        if initialProbs.ndim != 1 or initialProbs.shape[0] < 1:
            raise InvalidModelError('the initial probabilities must be a non-empty vector')
        numStates = initialProbs.shape[0]
        if transitionMatrix.shape != (numStates, numStates):
            raise InvalidModelError('expected a {n}x{n} transition matrix, got shape {shape}'
                                    .format(n=numStates, shape=transitionMatrix.shape))
        if stateMeans.ndim != 2 or stateMeans.shape[0] != numStates or stateMeans.shape[1] < 1:
            raise InvalidModelError('expected {n} state means, got shape {shape}'.format(
                n=numStates, shape=stateMeans.shape))
        dim = stateMeans.shape[1]
        if stateCovariances.shape != (numStates, dim, dim):
            raise InvalidModelError('expected {n} covariances of shape {d}x{d}, got shape {shape}'
                                    .format(n=numStates, d=dim, shape=stateCovariances.shape))

    @staticmethod
    def _checkInvariants(initialProbs, transitionMatrix, stateMeans, stateCovariances):
        for name, probs in [('initial probabilities', initialProbs),
                            ('transition matrix', transitionMatrix)]:
            if not np.all(np.isfinite(probs)) or np.any(probs < 0) or np.any(probs > 1):
                raise InvalidModelError('the entries of the {name} must lie in [0, 1]'.format(
                    name=name))
        if abs(initialProbs.sum() - 1.0) > MODEL_TOLERANCE:
            raise InvalidModelError('the initial probabilities must sum to 1')
        rowSums = transitionMatrix.sum(axis=1)
        if np.any(np.abs(rowSums - 1.0) > MODEL_TOLERANCE):
            raise InvalidModelError('row {row} of the transition matrix does not sum to 1'.format(
                row=int(np.argmax(np.abs(rowSums - 1.0)))))
        if not np.all(np.isfinite(stateMeans)) or not np.all(np.isfinite(stateCovariances)):
            raise InvalidModelError('the state means and covariances must be finite')
        for state, covariance in enumerate(stateCovariances):
            if np.max(np.abs(covariance - covariance.T)) > MODEL_TOLERANCE:
                raise InvalidModelError('the covariance of state {state} is not symmetric'.format(
                    state=state))
            if np.linalg.eigvalsh(covariance)[0] < COVARIANCE_FLOOR * (1.0 - 1e-6):
                raise InvalidModelError('the covariance of state {state} is below the '
                                        'covariance floor'.format(state=state))

    def permuted(self, order):
        """
        Reorder the hidden states.

        :raises InvalidInputError: If order is not a permutation of the state indices.
        :param order: A permutation; new state k is the old state order[k].
        :return: The model with the states reordered.
        """
        order = np.asarray(order)
        if sorted(order.tolist()) != list(range(self.numStates)):
            raise InvalidInputError('order', 'expected a permutation of the state indices')
        return HmmModel(self.initialProbs[order], self.transitionMatrix[np.ix_(order, order)],
                        self.stateMeans[order], self.stateCovariances[order], validate=False)

    def toDict(self):
        """
        :return: The model as a json serializable dict.
        """
        return {
            'format_version': FORMAT_VERSION,
            'num_states': self.numStates,
            'dim': self.dim,
            'initial_probs': self.initialProbs.tolist(),
            'transition_matrix': self.transitionMatrix.tolist(),
            'state_means': self.stateMeans.tolist(),
            'state_covariances': self.stateCovariances.tolist(),
        }

    @classmethod
    def fromDict(cls, data):
        """
        Create a model from its dict representation, re-validating all invariants.

        :raises FormatVersionError: If the format version is not supported.
        :raises MissingFieldError: If a field is missing.
        :raises InvalidModelError: If the parameters violate an invariant.
        :param data: A dict as returned by toDict.
        :return: The model.
        """
        if 'format_version' not in data:
            raise MissingFieldError('format_version')
        if data['format_version'] != FORMAT_VERSION:
            raise FormatVersionError(data['format_version'], FORMAT_VERSION)
        for field in _MODEL_FIELDS:
            if field not in data:
                raise MissingFieldError(field)
        model = cls(data['initial_probs'], data['transition_matrix'],
                    data['state_means'], data['state_covariances'])
        if not isIntType(data['num_states']) or not isIntType(data['dim']) \
                or (data['num_states'], data['dim']) != (model.numStates, model.dim):
            raise InvalidModelError('num_states and dim do not match the parameter shapes')
        return model


class PosteriorResult(object):
    """
    The result of the forward-backward algorithm:
    The log-likelihood, the filtered and smoothed state probabilities and
    the pairwise posteriors of consecutive states.
    """

    def __init__(self, logLikelihood, filtered, smoothed, pairwise):
        """
        :param logLikelihood: log P(x | model).
        :param filtered: n x S, row t is P(z_t | x_1..x_t).
        :param smoothed: n x S, row t is P(z_t | x_1..x_n).
        :param pairwise: (n-1) x S x S, entry (t, i, j) is P(z_t = i, z_t+1 = j | x).
        """
        super(PosteriorResult, self).__init__()
        self.logLikelihood = float(logLikelihood)
        self.filtered = frozenArray(filtered)
        self.smoothed = frozenArray(smoothed)
        self.pairwise = frozenArray(pairwise)

    @property
    def lastFiltered(self):
        """ The filtered state probabilities at the last time step. """
        return self.filtered[-1]


def _choleskyFactor(covariance, state):
    """
    :raises SingularCovarianceError: If the covariance is below the floor.
    :param covariance: The covariance of the state.
    :param state: The index of the state.
    :return: The lower triangular cholesky factor.
    """
    if np.linalg.eigvalsh(covariance)[0] < COVARIANCE_FLOOR * (1.0 - 1e-6):
        raise SingularCovarianceError(state)
    try:
        return linalg.cholesky(covariance, lower=True)
    except linalg.LinAlgError:
        raise SingularCovarianceError(state)


def logEmissionDensities(model, observations):
    """
    Evaluate the Gaussian log-density of every state at every observation.

    :raises InvalidInputError: If the observations do not match the model dimension.
    :raises SingularCovarianceError: If a state covariance can not be inverted.
    :param model: The model.
    :param observations: The n x d observations.
    :return: An n x S matrix of log-densities.
    """
    observations = checkObservations(observations, dim=model.dim)
    result = np.empty((observations.shape[0], model.numStates))
    for state in range(model.numStates):
        factor = _choleskyFactor(model.stateCovariances[state], state)
        deviation = observations - model.stateMeans[state]
        whitened = linalg.solve_triangular(factor, deviation.T, lower=True)
        logDeterminant = 2.0 * np.sum(np.log(np.diag(factor)))
        result[:, state] = -0.5 * (model.dim * _LOG_2PI + logDeterminant
                                   + np.sum(whitened ** 2, axis=0))
    return result


def _checkStep(logRow, timeIndex):
    if not np.any(np.isfinite(logRow)):
        raise UnderflowError(timeIndex)


def _forwardLog(model, logEmissions):
    """
    The forward recursion in log space.

    :param model: The model.
    :param logEmissions: The n x S log emission densities.
    :return: The n x S matrix of log forward variables log P(x_1..x_t, z_t).
    """
    numSteps = logEmissions.shape[0]
    transition = model.transitionMatrix
    logAlpha = np.empty_like(logEmissions)
    with np.errstate(divide='ignore'):
        logAlpha[0] = np.log(model.initialProbs) + logEmissions[0]
        _checkStep(logAlpha[0], 0)
        for t in range(1, numSteps):
            previous = logAlpha[t - 1]
            shift = previous.max()
            logAlpha[t] = np.log(np.exp(previous - shift).dot(transition)) + shift \
                + logEmissions[t]
            _checkStep(logAlpha[t], t)
    return logAlpha


def _backwardLog(model, logEmissions):
    """
    The backward recursion in log space.

    :param model: The model.
    :param logEmissions: The n x S log emission densities.
    :return: The n x S matrix of log backward variables log P(x_t+1..x_n | z_t).
    """
    numSteps = logEmissions.shape[0]
    transition = model.transitionMatrix
    logBeta = np.zeros_like(logEmissions)
    with np.errstate(divide='ignore'):
        for t in range(numSteps - 2, -1, -1):
            following = logEmissions[t + 1] + logBeta[t + 1]
            shift = following.max()
            logBeta[t] = np.log(transition.dot(np.exp(following - shift))) + shift
            _checkStep(logBeta[t], t)
    return logBeta


def _normalizeRows(logValues):
    probs = np.exp(logValues - logsumexp(logValues, axis=1, keepdims=True))
    return probs / probs.sum(axis=1, keepdims=True)


def forwardFilter(model, observations):
    """
    Run only the forward pass.

    :raises UnderflowError: If every state is impossible at some time step.
    :param model: The model.
    :param observations: The n x d observations.
    :return: The n x S filtered state probabilities and the log-likelihood.
    """
    logAlpha = _forwardLog(model, logEmissionDensities(model, observations))
    return _normalizeRows(logAlpha), float(logsumexp(logAlpha[-1]))


def forwardBackward(model, observations):
    """
    Compute the likelihood and the state posteriors of a sequence.

    :raises InvalidInputError: If the observations do not match the model dimension.
    :raises UnderflowError: If every state is impossible at some time step.
    :param model: The model.
    :param observations: The n x d observations.
    :return: A PosteriorResult.
    """
    logEmissions = logEmissionDensities(model, observations)
    logAlpha = _forwardLog(model, logEmissions)
    logBeta = _backwardLog(model, logEmissions)
    numSteps, numStates = logEmissions.shape
    if numSteps > 1:
        with np.errstate(divide='ignore'):
            logTransition = np.log(model.transitionMatrix)
        logPairs = logAlpha[:-1, :, np.newaxis] + logTransition[np.newaxis] \
            + (logEmissions[1:] + logBeta[1:])[:, np.newaxis, :]
        pairwise = np.exp(logPairs - logsumexp(logPairs, axis=(1, 2), keepdims=True))
        pairwise /= pairwise.sum(axis=(1, 2), keepdims=True)
    else:
        pairwise = np.zeros((0, numStates, numStates))
    return PosteriorResult(logsumexp(logAlpha[-1]), _normalizeRows(logAlpha),
                           _normalizeRows(logAlpha + logBeta), pairwise)


def viterbi(model, observations):
    """
    Find the most probable hidden state path.
    Ties are broken in favour of the lowest state index.

    :raises UnderflowError: If every state is impossible at some time step.
    :param model: The model.
    :param observations: The n x d observations.
    :return: The length n integer array of 0-based state indices.
    """
    logEmissions = logEmissionDensities(model, observations)
    numSteps, numStates = logEmissions.shape
    with np.errstate(divide='ignore'):
        logTransition = np.log(model.transitionMatrix)
        delta = np.log(model.initialProbs) + logEmissions[0]
    _checkStep(delta, 0)
    backPointers = np.zeros((numSteps, numStates), dtype=int)
    columns = np.arange(numStates)
    for t in range(1, numSteps):
        scores = delta[:, np.newaxis] + logTransition
        backPointers[t] = np.argmax(scores, axis=0)
        delta = scores[backPointers[t], columns] + logEmissions[t]
        _checkStep(delta, t)
    path = np.empty(numSteps, dtype=int)
    path[-1] = int(np.argmax(delta))
    for t in range(numSteps - 1, 0, -1):
        path[t - 1] = backPointers[t, path[t]]
    return path


def pathLogProbability(model, observations, path):
    """
    :param model: The model.
    :param observations: The n x d observations.
    :param path: A length n sequence of 0-based state indices.
    :return: log P(x, z | model) for the given path z.
    """
    logEmissions = logEmissionDensities(model, observations)
    path = np.asarray(path, dtype=int)
    if path.shape != (logEmissions.shape[0],):
        raise InvalidInputError('path', 'expected one state per observation')
    with np.errstate(divide='ignore'):
        return float(np.log(model.initialProbs[path[0]])
                     + np.sum(np.log(model.transitionMatrix[path[:-1], path[1:]]))
                     + np.sum(logEmissions[np.arange(path.shape[0]), path]))


def propagateStateProbs(transitionMatrix, stateProbs, horizon):
    """
    Propagate a state distribution h steps through a transition matrix.

    :raises InvalidInputError: If the horizon is negative or the distribution is invalid.
    :param transitionMatrix: The S x S transition matrix.
    :param stateProbs: The current state distribution.
    :param horizon: The number of steps h >= 0.
    :return: stateProbs * A^h.
    """
    transitionMatrix = np.asarray(transitionMatrix, dtype=float)
    horizon = checkHorizon(horizon)
    stateProbs = checkProbabilityVector(stateProbs, transitionMatrix.shape[0], 'stateProbs')
    if horizon == 0:
        return stateProbs.copy()
    return stateProbs.dot(np.linalg.matrix_power(transitionMatrix, horizon))


def forecastStateProbs(model, filteredLast, horizon):
    """
    Forecast the state probabilities h >= 0 steps after the last observation.

    :raises InvalidInputError: If the horizon is negative or the distribution is invalid.
    :param model: The model.
    :param filteredLast: The filtered state probabilities at the last observation.
    :param horizon: The number of steps h >= 0.
    :return: The forecasted state distribution.
    """
    return propagateStateProbs(model.transitionMatrix, filteredLast, horizon)


def stationaryDistribution(transitionMatrix):
    """
    :param transitionMatrix: An S x S transition matrix.
    :return: The stationary distribution, the left eigenvector for the eigenvalue 1.
    """
    transitionMatrix = np.asarray(transitionMatrix, dtype=float)
    eigenvalues, eigenvectors = np.linalg.eig(transitionMatrix.T)
    vector = np.real(eigenvectors[:, np.argmin(np.abs(eigenvalues - 1.0))])
    vector = np.abs(vector)
    return vector / vector.sum()
