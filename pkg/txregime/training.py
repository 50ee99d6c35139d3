""" Baum-Welch training with maximum a posteriori priors. """

import logging
import math

import numpy as np
from scipy.spatial.distance import cdist

from twisted.internet import defer, threads

from txregime.errors import InvalidInputError, InsufficientDataError, DegenerateStateError, \
    DegenerateRegimeError, TrainingFailureError, RegimeError
from txregime.hmm import HmmModel, forwardBackward, forwardFilter, floorCovariance
from txregime.regimes import esrValues
from txregime.util import checkObservations, isIntType

DEGENERATE_RESPONSIBILITY = 1e-10


def _checkReal(name, value, minimum, strict=False):
    """
    :raises InvalidInputError: If the value is not a finite number above the minimum.
    :return: The value as a float.
    """
    if isinstance(value, bool) or not isinstance(value, (int, float, np.number)) \
            or not math.isfinite(value) or value < minimum or (strict and value == minimum):
        raise InvalidInputError(name, 'expected a finite number {op} {minimum}, got {value!r}'
                                .format(op='>' if strict else '>=', minimum=minimum, value=value))
    return float(value)


def _fromMapping(cls, mapping, fields, convert):
    """
    Create a config object from a mapping with snake_case keys.

    :raises InvalidInputError: If the mapping contains an unknown key or an invalid value.
    """
    kwargs = {}
    for key, value in mapping.items():
        if key not in fields:
            raise InvalidInputError(key, 'unknown configuration key')
        if isinstance(value, str):
            try:
                value = convert[key](value)
            except ValueError:
                raise InvalidInputError(key, 'unable to parse {value!r}'.format(value=value))
        kwargs[fields[key]] = value
    return cls(**kwargs)


class PriorConfig(object):
    """
    The conjugate priors of the model parameters: symmetric Dirichlet priors
    on the initial distribution and on every row of the transition matrix
    (with an optional extra concentration on the diagonal), and pseudo-counts
    shrinking the state means and covariances towards the global moments of the data.
    With the default values the estimation reduces to maximum likelihood.
    """
    FIELDS = {
        'dirichlet_initial': 'dirichletInitial',
        'dirichlet_transition': 'dirichletTransition',
        'sticky_bonus': 'stickyBonus',
        'mean_prior_strength': 'meanPriorStrength',
        'cov_prior_strength': 'covPriorStrength',
    }

    def __init__(self, dirichletInitial=1.0, dirichletTransition=1.0, stickyBonus=0.0,
                 meanPriorStrength=0.0, covPriorStrength=0.0):
        """
        :raises InvalidInputError: If a value is outside of its range.
        :param dirichletInitial: Concentration >= 1 of the prior on the initial distribution.
        :param dirichletTransition: Concentration >= 1 of the prior on each transition row.
        :param stickyBonus: Extra concentration >= 0 on the diagonal of the transition prior.
        :param meanPriorStrength: Pseudo-count >= 0 towards the global feature mean.
        :param covPriorStrength: Pseudo-count >= 0 towards the global feature covariance.
        """
        super(PriorConfig, self).__init__()
        self.dirichletInitial = _checkReal('dirichlet_initial', dirichletInitial, 1.0)
        self.dirichletTransition = _checkReal('dirichlet_transition', dirichletTransition, 1.0)
        self.stickyBonus = _checkReal('sticky_bonus', stickyBonus, 0.0)
        self.meanPriorStrength = _checkReal('mean_prior_strength', meanPriorStrength, 0.0)
        self.covPriorStrength = _checkReal('cov_prior_strength', covPriorStrength, 0.0)

    @classmethod
    def fromMapping(cls, mapping):
        """
        :param mapping: A dict with snake_case keys, values may be strings.
        :return: The prior config.
        """
        return _fromMapping(cls, mapping, cls.FIELDS, {key: float for key in cls.FIELDS})

    def toDict(self):
        """
        :return: The prior as a dict with snake_case keys.
        """
        return {key: getattr(self, name) for key, name in self.FIELDS.items()}


class TrainConfig(object):
    """ Convergence control and the number of randomly initialized training runs. """
    FIELDS = {
        'max_iterations': 'maxIterations',
        'tolerance': 'tolerance',
        'num_restarts': 'numRestarts',
        'seed': 'seed',
    }

    def __init__(self, maxIterations=500, tolerance=1e-6, numRestarts=20, seed=0):
        """
        :raises InvalidInputError: If a value is outside of its range.
        :param maxIterations: The maximum number of EM iterations per run.
        :param tolerance: The relative change of the objective below which a run has converged.
        :param numRestarts: The number of independently initialized runs.
        :param seed: The seed of the random initializations.
        """
        super(TrainConfig, self).__init__()
        for name, value in [('max_iterations', maxIterations), ('num_restarts', numRestarts)]:
            if not isIntType(value) or value < 1:
                raise InvalidInputError(name, 'expected an integer >= 1, got {value!r}'.format(
                    value=value))
        if not isIntType(seed) or seed < 0:
            raise InvalidInputError('seed', 'expected an unsigned integer, got {value!r}'.format(
                value=seed))
        self.maxIterations = int(maxIterations)
        self.tolerance = _checkReal('tolerance', tolerance, 0.0, strict=True)
        self.numRestarts = int(numRestarts)
        self.seed = int(seed)

    @classmethod
    def fromMapping(cls, mapping):
        """
        :param mapping: A dict with snake_case keys, values may be strings.
        :return: The training config.
        """
        return _fromMapping(cls, mapping, cls.FIELDS, {
            'max_iterations': int, 'tolerance': float, 'num_restarts': int, 'seed': int})

    def toDict(self):
        """
        :return: The config as a dict with snake_case keys.
        """
        return {key: getattr(self, name) for key, name in self.FIELDS.items()}


class FitReport(object):
    """ The outcome of training: the winning model and how it was found. """

    def __init__(self, model, objectiveTrace, converged, restartIndex, restartObjectives,
                 failures, validationLogLikelihood=None):
        """
        :param model: The fitted model, states in canonical order.
        :param objectiveTrace: log P(x|model) + log G(model) after every iteration
                               of the winning run, starting at its initialization.
        :param converged: Whether the winning run met the tolerance.
        :param restartIndex: The index of the winning run.
        :param restartObjectives: The final objective of every run, None for failed runs.
        :param failures: Diagnostic messages of the failed runs.
        :param validationLogLikelihood: log P(validation data | model) or None.
        """
        super(FitReport, self).__init__()
        self.model = model
        self.objectiveTrace = list(objectiveTrace)
        self.converged = converged
        self.restartIndex = restartIndex
        self.restartObjectives = list(restartObjectives)
        self.failures = list(failures)
        self.validationLogLikelihood = validationLogLikelihood

    @property
    def objective(self):
        """ The final objective of the winning run. """
        return self.objectiveTrace[-1]

    @property
    def iterations(self):
        """ The number of EM iterations of the winning run. """
        return len(self.objectiveTrace) - 1


class _RestartOutcome(object):
    """ The result of a single training run. """

    def __init__(self, index, model=None, trace=None, converged=False, error=None):
        self.index = index
        self.model = model
        self.trace = trace
        self.converged = converged
        self.error = error


def _globalMoments(observations):
    """
    :param observations: The n x d observations.
    :return: The mean and the floored population covariance of all observations.
    """
    mean = observations.mean(axis=0)
    deviation = observations - mean
    covariance = deviation.T.dot(deviation) / observations.shape[0]
    return mean, floorCovariance(covariance)


def eStep(model, observations):
    """
    The expectation step: the smoothed state posteriors and the pairwise posteriors
    of consecutive states, the sufficient statistics of the expected complete log-likelihood.

    :param model: The current model.
    :param observations: The n x d observations.
    :return: A PosteriorResult.
    """
    return forwardBackward(model, observations)


def mStepMap(stats, observations, prior):
    """
    The maximization step: the parameters maximizing the expected complete
    log-likelihood plus the log prior density.

    :raises DegenerateStateError: If a state has no responsibility and its mean or
                                  covariance is not supported by a prior.
    :param stats: The PosteriorResult of the expectation step on the observations.
    :param observations: The n x d observations.
    :param prior: The PriorConfig.
    :return: The updated HmmModel.
    """
    observations = checkObservations(observations)
    smoothed = np.asarray(stats.smoothed)
    if smoothed.shape[0] != observations.shape[0]:
        raise InvalidInputError('stats', 'the posteriors do not match the observations')
    numStates = smoothed.shape[1]
    globalMean, globalCovariance = _globalMoments(observations)

    initialCounts = smoothed[0] + (prior.dirichletInitial - 1.0)
    initialProbs = initialCounts / initialCounts.sum()

    transitionCounts = np.asarray(stats.pairwise).sum(axis=0) \
        + (prior.dirichletTransition - 1.0) + prior.stickyBonus * np.eye(numStates)
    rowSums = transitionCounts.sum(axis=1, keepdims=True)
    transitionMatrix = np.where(rowSums > 0, transitionCounts / np.where(rowSums > 0, rowSums, 1),
                                1.0 / numStates)

    kappa = prior.meanPriorStrength
    nu = prior.covPriorStrength
    weights = smoothed.sum(axis=0)
    means = np.empty((numStates, observations.shape[1]))
    covariances = np.empty((numStates, observations.shape[1], observations.shape[1]))
    for state in range(numStates):
        weight = weights[state]
        if weight < DEGENERATE_RESPONSIBILITY and (kappa == 0 or nu == 0):
            raise DegenerateStateError(state, weight)
        means[state] = (smoothed[:, state].dot(observations) + kappa * globalMean) \
            / (weight + kappa)
        deviation = observations - means[state]
        scatter = (smoothed[:, state, np.newaxis] * deviation).T.dot(deviation)
        shift = means[state] - globalMean
        covariances[state] = floorCovariance(
            (scatter + kappa * np.outer(shift, shift) + nu * globalCovariance) / (weight + nu))
    return HmmModel(initialProbs, transitionMatrix, means, covariances)


def _dirichletLogDensity(coefficients, probs):
    with np.errstate(divide='ignore', invalid='ignore'):
        terms = coefficients * np.log(probs)
    return float(np.sum(np.where(coefficients > 0, terms, 0.0)))


def logPriorDensity(model, observations, prior):
    """
    The log prior density log G(model), additive constants dropped.

    :param model: The model.
    :param observations: The observations that define the global moments of the prior.
    :param prior: The PriorConfig.
    :return: The log prior density.
    """
    observations = checkObservations(observations, dim=model.dim)
    numStates = model.numStates
    total = _dirichletLogDensity(np.full(numStates, prior.dirichletInitial - 1.0),
                                 model.initialProbs)
    total += _dirichletLogDensity(
        np.full((numStates, numStates), prior.dirichletTransition - 1.0)
        + prior.stickyBonus * np.eye(numStates), model.transitionMatrix)
    kappa = prior.meanPriorStrength
    nu = prior.covPriorStrength
    if kappa == 0 and nu == 0:
        return total
    globalMean, globalCovariance = _globalMoments(observations)
    for state in range(numStates):
        covariance = model.stateCovariances[state]
        shift = model.stateMeans[state] - globalMean
        scale = nu * globalCovariance + kappa * np.outer(shift, shift)
        logDeterminant = np.linalg.slogdet(covariance)[1]
        total += -0.5 * nu * logDeterminant - 0.5 * np.trace(np.linalg.solve(covariance, scale))
    return float(total)


def _seedRows(observations, scale, numStates, rng):
    """
    Pick the observations that become the initial means: the first uniformly, every further
    one with a probability proportional to its squared distance from the nearest earlier pick,
    measured in units of the global standard deviations.

    :return: The indices of the picked rows.
    """
    whitened = observations / scale
    numRows = observations.shape[0]
    rows = [int(rng.integers(numRows))]
    for _ in range(1, numStates):
        distances = cdist(whitened[rows], whitened, 'sqeuclidean').min(axis=0)
        total = distances.sum()
        if total > 0:
            rows.append(int(rng.choice(numRows, p=distances / total)))
        else:
            rows.append(int(rng.integers(numRows)))
    return rows


def _initialModel(observations, numStates, rng):
    """
    Random initialization: means at spread out random observations plus a small jitter,
    covariances at the global covariance, probabilities uniform plus Dirichlet noise.
    """
    _, globalCovariance = _globalMoments(observations)
    rows = _seedRows(observations, np.sqrt(np.diag(globalCovariance)), numStates, rng)
    jitter = 1e-3 * np.sqrt(np.diag(globalCovariance)) \
        * rng.standard_normal((numStates, observations.shape[1]))
    means = observations[rows] + jitter
    covariances = np.repeat(globalCovariance[np.newaxis], numStates, axis=0)
    initialProbs = 0.5 / numStates + 0.5 * rng.dirichlet(np.ones(numStates))
    transitionMatrix = 0.5 / numStates + 0.5 * rng.dirichlet(np.ones(numStates), size=numStates)
    return HmmModel(initialProbs / initialProbs.sum(),
                    transitionMatrix / transitionMatrix.sum(axis=1, keepdims=True),
                    means, covariances)


def _runRestart(observations, numStates, prior, config, index, seedSequence):
    """
    Run EM from one random initialization until convergence or the iteration limit.
    A step that lowers the objective, which only the covariance floor or rounding can cause,
    is discarded and ends the run with the previous model.

    :return: A _RestartOutcome, with an error message instead of a model if the run failed.
    """
    logger = logging.getLogger('txRegime')
    rng = np.random.default_rng(seedSequence)
    try:
        model = _initialModel(observations, numStates, rng)
        posterior = eStep(model, observations)
        trace = [posterior.logLikelihood + logPriorDensity(model, observations, prior)]
        converged = False
        for iteration in range(config.maxIterations):
            candidate = mStepMap(posterior, observations, prior)
            candidatePosterior = eStep(candidate, observations)
            objective = candidatePosterior.logLikelihood \
                + logPriorDensity(candidate, observations, prior)
            change = abs(objective - trace[-1]) / (1.0 + abs(objective))
            if objective < trace[-1]:
                converged = change < config.tolerance
                if not converged:
                    logger.warning('Run %d stopped at iteration %d: the objective fell from '
                                   '%.10g to %.10g', index, iteration + 1, trace[-1], objective)
                break
            model, posterior = candidate, candidatePosterior
            trace.append(objective)
            logger.debug('Run %d, iteration %d: objective %.10g (relative change %.3g)',
                         index, iteration + 1, objective, change)
            if change < config.tolerance:
                converged = True
                break
        return _RestartOutcome(index, model, trace, converged)
    except RegimeError as error:
        logger.warning('Training run %d failed: %s', index, error)
        return _RestartOutcome(index, error='run {index}: {error}'.format(index=index, error=error))


def canonicalStateOrder(model, normalization=None):
    """
    Order the states by descending expected Sharpe ratio if the normalization of a
    two dimensional feature model is known, otherwise by descending first mean coordinate.
    Ties keep the lower state index first.

    :param model: The model.
    :param normalization: The NormalizationStats of the features or None.
    :return: The permutation to pass to HmmModel.permuted.
    """
    keys = model.stateMeans[:, 0]
    if normalization is not None and model.dim == 2:
        try:
            keys = esrValues(model, normalization)
        except DegenerateRegimeError as error:
            logging.getLogger('txRegime').debug(
                'Ordering states by mean instead of ESR: %s', error)
    return np.argsort(-np.asarray(keys), kind='stable')


def _buildReport(outcomes, normalization, validationObservations):
    """
    Select the run with the highest final objective (ties: lowest run index),
    put its states in canonical order and evaluate it on the validation data.

    :raises TrainingFailureError: If every run failed.
    """
    failures = [outcome.error for outcome in outcomes if outcome.model is None]
    best = None
    for outcome in outcomes:
        if outcome.model is not None and (best is None or outcome.trace[-1] > best.trace[-1]):
            best = outcome
    if best is None:
        raise TrainingFailureError(failures)
    model = best.model.permuted(canonicalStateOrder(best.model, normalization))
    validationLogLikelihood = None
    if validationObservations is not None:
        validationLogLikelihood = forwardFilter(model, validationObservations)[1]
    logging.getLogger('txRegime').info(
        'Run %d of %d won with objective %.10g after %d iterations (%s)', best.index,
        len(outcomes), best.trace[-1], len(best.trace) - 1,
        'converged' if best.converged else 'not converged')
    return FitReport(model, best.trace, best.converged, best.index,
                     [None if outcome.model is None else outcome.trace[-1]
                      for outcome in outcomes], failures, validationLogLikelihood)


def _prepare(observations, numStates, prior, config):
    observations = checkObservations(observations)
    if not isIntType(numStates) or numStates < 1:
        raise InvalidInputError('numStates', 'expected an integer >= 1, got {value!r}'.format(
            value=numStates))
    if observations.shape[0] <= numStates:
        raise InsufficientDataError(numStates, observations.shape[0])
    prior = PriorConfig() if prior is None else prior
    config = TrainConfig() if config is None else config
    seeds = np.random.SeedSequence(config.seed).spawn(config.numRestarts)
    return [(observations, int(numStates), prior, config, index, seed)
            for index, seed in enumerate(seeds)]


def fit(observations, numStates, prior=None, config=None, normalization=None,
        validationObservations=None):
    """
    Fit a model with numStates hidden states by running EM from config.numRestarts
    random initializations and keeping the run with the highest final objective.

    :raises InsufficientDataError: If there are not more observations than states.
    :raises TrainingFailureError: If every run failed.
    :param observations: The n x d training observations.
    :param numStates: The number of hidden states S.
    :param prior: The PriorConfig, None for the neutral prior.
    :param config: The TrainConfig, None for the defaults.
    :param normalization: The NormalizationStats of the features, used to order the states.
    :param validationObservations: Optional held out observations to evaluate the model on.
    :return: A FitReport.
    """
    runs = _prepare(observations, numStates, prior, config)
    return _buildReport([_runRestart(*run) for run in runs], normalization,
                        validationObservations)


def fitAsync(observations, numStates, prior=None, config=None, normalization=None,
             validationObservations=None):
    """
    Like fit, but the runs are executed in the reactor thread pool.
    The result is identical to the result of fit with the same arguments.

    :return: A Deferred that fires with the FitReport.
    """
    try:
        runs = _prepare(observations, numStates, prior, config)
    except RegimeError:
        return defer.fail()
    deferred = defer.gatherResults([threads.deferToThread(_runRestart, *run) for run in runs],
                                   consumeErrors=True)
    deferred.addCallback(_buildReport, normalization, validationObservations)
    return deferred
