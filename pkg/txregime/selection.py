""" Information criteria and the choice of the number of hidden states. """

import logging
import math

from txregime.errors import InvalidInputError, TrainingFailureError, RegimeError
from txregime.hmm import forwardFilter
from txregime.modes import Criterion
from txregime.training import fit
from txregime.util import isIntType, checkObservations


def numFreeParams(numStates, numMixtures, dim):
    """
    :raises InvalidInputError: If an argument is not a positive integer.
    :param numStates: The number of hidden states S.
    :param numMixtures: The number of Gaussian mixture components per state m.
    :param dim: The dimension of the observations d.
    :return: The number of free parameters S * (S + c * m) with c = d + d * (d + 1) / 2.
    """
    for name, value in [('numStates', numStates), ('numMixtures', numMixtures), ('dim', dim)]:
        if not isIntType(value) or value < 1:
            raise InvalidInputError(name, 'expected an integer >= 1, got {value!r}'.format(
                value=value))
    perComponent = dim + dim * (dim + 1) // 2
    return int(numStates * (numStates + perComponent * numMixtures))


class CriteriaReport(object):
    """ The information criteria of one fitted model. """

    def __init__(self, logLikelihood, numParams, numObs, numStates=None):
        """
        :raises InvalidInputError: If numParams < 1 or numObs < 2.
        :param logLikelihood: The log-likelihood of the data under the fitted model.
        :param numParams: The number of free parameters p.
        :param numObs: The number of observations n.
        :param numStates: The number of hidden states of the model, if known.
        """
        super(CriteriaReport, self).__init__()
        if not isIntType(numParams) or numParams < 1:
            raise InvalidInputError('numParams', 'expected an integer >= 1, got {p!r}'.format(
                p=numParams))
        if not isIntType(numObs) or numObs < 2:
            raise InvalidInputError('numObs', 'expected an integer >= 2, got {n!r}'.format(
                n=numObs))
        self.logLikelihood = float(logLikelihood)
        self.numParams = int(numParams)
        self.numObs = int(numObs)
        self.numStates = numStates
        deviance = -2.0 * self.logLikelihood
        logN = math.log(numObs)
        self.aic = deviance + 2.0 * numParams
        self.bic = deviance + numParams * logN
        self.hqic = deviance + numParams * math.log(logN)
        self.bcaic = deviance + numParams * (logN + 1.0)

    def value(self, criterion):
        """
        :param criterion: A Criterion.
        :return: The value of that criterion.
        """
        return getattr(self, Criterion(criterion).value)


def informationCriteria(logLikelihood, numParams, numObs, numStates=None):
    """
    :return: The CriteriaReport AIC = -2 log L + 2p, BIC = -2 log L + p log n,
             HQIC = -2 log L + p log log n and BCAIC = -2 log L + p (log n + 1).
    """
    return CriteriaReport(logLikelihood, numParams, numObs, numStates)


class SelectionResult(object):
    """ The outcome of a sweep over candidate numbers of states. """

    def __init__(self, reports, chosenStates, criterion, failures, fitReports):
        """
        :param reports: The CriteriaReport of every successfully fitted candidate.
        :param chosenStates: The number of states minimizing the criterion.
        :param criterion: The Criterion used.
        :param failures: A dict mapping each failed candidate to its diagnostic.
        :param fitReports: A dict mapping each fitted candidate to its FitReport.
        """
        super(SelectionResult, self).__init__()
        self.reports = list(reports)
        self.chosenStates = chosenStates
        self.criterion = criterion
        self.failures = dict(failures)
        self.fitReports = dict(fitReports)

    @property
    def chosenFit(self):
        """ The FitReport of the chosen candidate. """
        return self.fitReports[self.chosenStates]


def selectStates(observations, candidates, criterion, prior=None, config=None, fitter=fit):
    """
    Fit every candidate number of states and choose the one with the lowest criterion.
    Ties are resolved in favour of fewer states. A candidate that can not be fitted
    is reported as failed without aborting the sweep.

    :raises TrainingFailureError: If no candidate could be fitted.
    :param observations: The n x d observations.
    :param candidates: The candidate numbers of states.
    :param criterion: The Criterion to minimize.
    :param prior: The PriorConfig passed to the fitter.
    :param config: The TrainConfig passed to the fitter.
    :param fitter: The training function, called as fitter(observations, S, prior, config).
    :return: A SelectionResult.
    """
    observations = checkObservations(observations)
    criterion = Criterion(criterion)
    candidates = list(candidates)
    if not candidates:
        raise InvalidInputError('candidates', 'expected at least one candidate')
    for numStates in candidates:
        if not isIntType(numStates) or numStates < 1:
            raise InvalidInputError('candidates', 'expected integers >= 1, got {s!r}'.format(
                s=numStates))
    logger = logging.getLogger('txRegime')
    reports = []
    failures = {}
    fitReports = {}
    for numStates in sorted(set(candidates)):
        try:
            fitReport = fitter(observations, numStates, prior, config)
            logLikelihood = forwardFilter(fitReport.model, observations)[1]
        except RegimeError as error:
            logger.warning('Unable to fit %d states: %s', numStates, error)
            failures[numStates] = str(error)
            continue
        fitReports[numStates] = fitReport
        reports.append(informationCriteria(
            logLikelihood, numFreeParams(numStates, 1, observations.shape[1]),
            observations.shape[0], numStates))
    if not reports:
        raise TrainingFailureError(['{s} states: {msg}'.format(s=numStates, msg=message)
                                    for numStates, message in sorted(failures.items())])
    best = reports[0]
    for report in reports[1:]:
        if report.value(criterion) < best.value(criterion):
            best = report
    logger.info('Chose %d states by %s', best.numStates, criterion.value.upper())
    return SelectionResult(reports, best.numStates, criterion, failures, fitReports)
