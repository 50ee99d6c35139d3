""" Abstract storage of fitted model bundles. """

from abc import ABCMeta, abstractmethod

from txregime.errors import InvalidInputError

_KEY_CHARACTERS = frozenset('abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.')


def checkKey(key):
    """
    :raises InvalidInputError: If the key can not be used as a storage key.
    :param key: A bundle key.
    :return: The key.
    """
    if not isinstance(key, str) or not key or key.startswith('.') \
            or not set(key) <= _KEY_CHARACTERS:
        raise InvalidInputError('key', 'expected a non-empty name of letters, digits, '
                                       '"_", "-" and ".", got {key!r}'.format(key=key))
    return key


def bundleKey(instrumentId, span):
    """
    :param instrumentId: The instrument of a bundle.
    :param span: The feature span of a bundle.
    :return: The key under which the bundle is stored.
    """
    return checkKey('{instrument}_span{span}'.format(instrument=instrumentId, span=span))


class ModelStorage(object, metaclass=ABCMeta):
    """ An object that stores ModelBundles under string keys. """

    @abstractmethod
    def put(self, key, bundle):
        """
        Store a bundle, replacing any bundle stored under the same key.

        :raises InvalidInputError: If the key is not valid.
        :param key: The key of the bundle.
        :param bundle: The ModelBundle.
        """
        raise NotImplementedError()

    @abstractmethod
    def get(self, key):
        """
        :raises KeyError: If no bundle is stored under the key.
        :param key: The key of the bundle.
        :return: The stored ModelBundle.
        """
        raise NotImplementedError()

    @abstractmethod
    def contains(self, key):
        """
        :param key: A key.
        :return: True if a bundle is stored under the key, False otherwise.
        """
        raise NotImplementedError()

    @abstractmethod
    def keys(self):
        """
        :return: The sorted list of the keys of all stored bundles.
        """
        raise NotImplementedError()
