""" Utility methods. """

import numpy as np

from txregime.errors import InvalidInputError

PROBABILITY_TOLERANCE = 1e-10


def isIntType(val):
    """
    :param val: The value to check
    :return: If it is an integer value (includes numpy integers, excludes bool).
    """
    return isinstance(val, (int, np.integer)) and not isinstance(val, (bool, np.bool_))


def frozenArray(values, dtype=float):
    """
    :param values: Array like values.
    :param dtype: The dtype of the result.
    :return: A read-only copy of the values as a numpy array.
    """
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


def checkObservations(observations, dim=None):
    """
    Validate an observation matrix.
    A one dimensional input is treated as a single feature column.

    :raises InvalidInputError: If the matrix is empty, not finite or has the wrong width.
    :param observations: An n x d array like of observations.
    :param dim: The expected number of columns or None.
    :return: The observations as a two dimensional float array.
    """
    values = np.asarray(observations, dtype=float)
    if values.ndim == 1:
        values = values[:, np.newaxis]
    if values.ndim != 2 or values.shape[0] < 1:
        raise InvalidInputError('observations', 'expected a non-empty n x d matrix, got shape '
                                + str(values.shape))
    if dim is not None and values.shape[1] != dim:
        raise InvalidInputError('observations', 'expected {dim} columns, got {cols}'.format(
            dim=dim, cols=values.shape[1]))
    if not np.all(np.isfinite(values)):
        raise InvalidInputError('observations', 'all entries must be finite')
    return values


def checkProbabilityVector(probs, size=None, name='probabilities'):
    """
    :raises InvalidInputError: If the vector is not a probability vector.
    :param probs: The vector to check.
    :param size: The expected length or None.
    :param name: The name used in the error message.
    :return: The vector as a float array.
    """
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1 or (size is not None and probs.shape[0] != size):
        raise InvalidInputError(name, 'expected a vector of length {size}, got shape {shape}'
                                .format(size=size, shape=probs.shape))
    if np.any(probs < 0) or np.any(probs > 1) or not np.all(np.isfinite(probs)):
        raise InvalidInputError(name, 'entries must lie in [0, 1]')
    if abs(probs.sum() - 1.0) > PROBABILITY_TOLERANCE:
        raise InvalidInputError(name, 'entries must sum to 1, got {total!r}'.format(
            total=float(probs.sum())))
    return probs


def checkHorizon(horizon):
    """
    :raises InvalidInputError: If the horizon is not a non-negative integer.
    :param horizon: The forecast horizon.
    :return: The horizon as an int.
    """
    if not isIntType(horizon) or horizon < 0:
        raise InvalidInputError('horizon', 'expected an integer >= 0, got {h!r}'.format(
            h=horizon))
    return int(horizon)


class IndexRange(object):
    """ A half open interval [start, stop) of row indices. """

    def __init__(self, start, stop):
        """
        :raises InvalidInputError: If the bounds are not ordered integers >= 0.
        :param start: The first index in the range.
        :param stop: One past the last index in the range.
        """
        super(IndexRange, self).__init__()
        if not isIntType(start) or not isIntType(stop) or start < 0 or stop < start:
            raise InvalidInputError('range', 'expected 0 <= start <= stop, got [{start}, {stop})'
                                    .format(start=start, stop=stop))
        self.start = int(start)
        self.stop = int(stop)

    def __len__(self):
        return self.stop - self.start

    def __eq__(self, other):
        return isinstance(other, IndexRange) and \
            (self.start, self.stop) == (other.start, other.stop)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.start, self.stop))

    def __repr__(self):
        return 'IndexRange({start}, {stop})'.format(start=self.start, stop=self.stop)

    def asSlice(self):
        """
        :return: The range as a slice object.
        """
        return slice(self.start, self.stop)

    def clippedStart(self, minimum):
        """
        :param minimum: The smallest permitted start index.
        :return: This range with its start raised to at least minimum.
        """
        start = min(max(self.start, minimum), self.stop)
        return IndexRange(start, self.stop)

    def toList(self):
        """
        :return: The bounds as a [start, stop] list.
        """
        return [self.start, self.stop]
