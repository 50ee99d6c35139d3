""" Unit tests for the txregime module. """

import itertools
import unittest

import numpy as np

from twisted.trial.unittest import TestCase

from txregime.hmm import HmmModel, logEmissionDensities


class TwistedTestCase(TestCase):
    """ An abstract base class for the test cases. """
    longMessage = True

    def assertAlmostEqual(self, first, second, places=None, msg=None, delta=None):
        """ Use the standard library semantics, which honour delta unlike trial. """
        return unittest.TestCase.assertAlmostEqual(self, first, second, places=places, msg=msg,
                                                   delta=delta)

    def assertIsInstance(self, instance, classOrTuple, msg=None, message=None):
        """ Accept the standard library msg keyword as well as the trial message keyword. """
        return unittest.TestCase.assertIsInstance(self, instance, classOrTuple,
                                                  msg=msg if msg is not None else message)

    def assertArrayAlmostEqual(self, expected, actual, tolerance=1e-10, msg=None):
        """
        Assert that two arrays have the same shape and agree elementwise within an absolute
        tolerance.

        :param expected: The expected values.
        :param actual: The actual values.
        :param tolerance: The permitted absolute difference.
        :param msg: The message to show if the assertion fails.
        """
        expected = np.asarray(expected, dtype=float)
        actual = np.asarray(actual, dtype=float)
        self.assertEqual(expected.shape, actual.shape, msg=msg)
        difference = float(np.max(np.abs(expected - actual))) if expected.size else 0.0
        self.assertLessEqual(difference, tolerance, msg=msg)


def randomModel(rng, numStates, dim=2, stickiness=0.0):
    """
    Create a random valid model.

    :param rng: A numpy Generator.
    :param numStates: The number of states.
    :param dim: The dimension of the observations.
    :param stickiness: An extra probability mass added to the diagonal of the transitions.
    :return: The HmmModel.
    """
    initialProbs = rng.dirichlet(np.ones(numStates))
    transitionMatrix = rng.dirichlet(np.ones(numStates), size=numStates) \
        + stickiness * np.eye(numStates)
    transitionMatrix /= transitionMatrix.sum(axis=1, keepdims=True)
    means = rng.normal(0.0, 2.0, size=(numStates, dim))
    covariances = []
    for _ in range(numStates):
        factor = rng.normal(size=(dim, dim))
        covariances.append(factor.dot(factor.T) + 0.5 * np.eye(dim))
    return HmmModel(initialProbs, transitionMatrix, means, covariances)


def sampleObservations(model, length, rng):
    """
    Sample a state path and observations from a model.

    :param model: The HmmModel.
    :param length: The number of observations.
    :param rng: A numpy Generator.
    :return: The length x d observations and the state path.
    """
    path = np.empty(length, dtype=int)
    path[0] = rng.choice(model.numStates, p=model.initialProbs)
    for time in range(1, length):
        path[time] = rng.choice(model.numStates, p=model.transitionMatrix[path[time - 1]])
    observations = np.array([rng.multivariate_normal(model.stateMeans[state],
                                                     model.stateCovariances[state])
                             for state in path])
    return observations, path


class PathEnumeration(object):
    """ Exact posterior quantities of a small model, obtained by enumerating every path. """

    def __init__(self, model, observations):
        logEmissions = logEmissionDensities(model, observations)
        length = logEmissions.shape[0]
        self.paths = list(itertools.product(range(model.numStates), repeat=length))
        with np.errstate(divide='ignore'):
            logInitial = np.log(model.initialProbs)
            logTransition = np.log(model.transitionMatrix)
        self.logJoint = np.array([
            logInitial[path[0]] + sum(logTransition[path[t - 1], path[t]]
                                      for t in range(1, length))
            + sum(logEmissions[t, path[t]] for t in range(length)) for path in self.paths])
        self.logLikelihood = float(np.logaddexp.reduce(self.logJoint))
        weights = np.exp(self.logJoint - self.logLikelihood)
        self.smoothed = np.zeros((length, model.numStates))
        self.pairwise = np.zeros((max(length - 1, 0), model.numStates, model.numStates))
        for weight, path in zip(weights, self.paths):
            for t in range(length):
                self.smoothed[t, path[t]] += weight
            for t in range(length - 1):
                self.pairwise[t, path[t], path[t + 1]] += weight
        self.bestScore = float(np.max(self.logJoint))


def bestStateMatching(estimated, truth, numStates):
    """
    :param estimated: A path of estimated states.
    :param truth: The true path.
    :param numStates: The number of states.
    :return: The permutation p maximizing the agreement of p[estimated] with truth
             and that agreement.
    """
    estimated = np.asarray(estimated)
    truth = np.asarray(truth)
    best = None
    for permutation in itertools.permutations(range(numStates)):
        accuracy = float(np.mean(np.asarray(permutation)[estimated] == truth))
        if best is None or accuracy > best[1]:
            best = (np.asarray(permutation), accuracy)
    return best


def separatedModel(separation=6.0, diagonal=0.97):
    """
    :param separation: The distance between neighbouring state means in standard deviations.
    :param diagonal: The probability of staying in a state.
    :return: A three state two dimensional model with well separated unit covariance states.
    """
    offDiagonal = (1.0 - diagonal) / 2.0
    transitionMatrix = np.full((3, 3), offDiagonal) + (diagonal - offDiagonal) * np.eye(3)
    means = [[separation, 0.0], [0.0, separation], [-separation, -separation]]
    return HmmModel(np.full(3, 1.0 / 3.0), transitionMatrix, means, [np.eye(2)] * 3)
