""" Tests for the model bundle storages. """

import os
import warnings

import numpy as np

from txregime.data import ModelBundle
from txregime.errors import InvalidInputError
from txregime.features import FeatureConfig, NormalizationStats
from txregime.hmm import HmmModel
from txregime.imp import JsonModelStorage, DictModelStorage
from txregime.storage import bundleKey, checkKey
from txregime.util import IndexRange

from tests import TwistedTestCase


def _bundle(instrumentId, bullMean=1.0):
    """
    :param instrumentId: The instrument of the bundle.
    :param bullMean: The mean return feature of the first state.
    :return: A small two state bundle.
    """
    model = HmmModel([0.5, 0.5], [[0.95, 0.05], [0.1, 0.9]], [[bullMean, -0.5], [-1.0, 1.0]],
                     [np.eye(2), 2.0 * np.eye(2)])
    norm = NormalizationStats([0.0003, 0.012], [0.002, 0.005], IndexRange(20, 500))
    return ModelBundle(model, norm, FeatureConfig(20), instrumentId)


class Abstract(object):
    """ Wrapper for the abstract ModelStorageTest to hide it during test discovery. """

    class ModelStorageTest(TwistedTestCase):
        """
        An abstract test case for ModelStorage implementations. A subclass must
        call setupModelStorage with an instance of the storage to test.
        """
        _MODEL_STORAGE = None

        def setupModelStorage(self, modelStorage):
            """
            Set the model storage implementation to use for the tests.
            :param modelStorage: The model storage implementation to test.
            """
            self._MODEL_STORAGE = modelStorage

        def testPutAndGet(self):
            """ Test that a stored bundle can be retrieved. """
            bundle = _bundle('spx')
            self.assertFalse(self._MODEL_STORAGE.contains('spx_span20'),
                             msg='Expected the storage to be empty.')
            self._MODEL_STORAGE.put('spx_span20', bundle)
            self.assertTrue(self._MODEL_STORAGE.contains('spx_span20'),
                            msg='Expected the storage to contain the bundle after it was stored.')
            self.assertEqual(bundle.toDict(), self._MODEL_STORAGE.get('spx_span20').toDict(),
                             msg='Expected the storage to return the stored bundle.')

        def testReplace(self):
            """ Test that storing under an existing key replaces the bundle. """
            self._MODEL_STORAGE.put('co2', _bundle('co2'))
            with warnings.catch_warnings():
                warnings.simplefilter('ignore')
                self._MODEL_STORAGE.put('co2', _bundle('co2', bullMean=2.0))
            self.assertEqual(2.0, self._MODEL_STORAGE.get('co2').model.stateMeans[0, 0],
                             msg='Expected the newer bundle.')
            self.assertEqual(['co2'], self._MODEL_STORAGE.keys(), msg='Expected a single key.')

        def testGetMissing(self):
            """ Test that retrieving a missing key raises a KeyError. """
            self.assertRaises(KeyError, self._MODEL_STORAGE.get, 'missing')

        def testKeys(self):
            """ Test that the keys are listed in sorted order. """
            for key in ['fi4_span30', 'co2_span30', 'spx_span30']:
                self._MODEL_STORAGE.put(key, _bundle(key.split('_')[0]))
            self.assertEqual(['co2_span30', 'fi4_span30', 'spx_span30'],
                             self._MODEL_STORAGE.keys(), msg='Expected the sorted keys.')

        def testInvalidKey(self):
            """ Test that keys that are not plain names are rejected. """
            for key in ['', '../spx', 'a/b', '.hidden', 'with space']:
                self.assertRaises(InvalidInputError, self._MODEL_STORAGE.put, key, _bundle('a'))


class JsonModelStorageTest(Abstract.ModelStorageTest):
    """ Test the JsonModelStorage. """

    def setUp(self):
        super(JsonModelStorageTest, self).setUp()
        self.directory = self.mktemp()
        self.setupModelStorage(JsonModelStorage(self.directory))

    def testFiles(self):
        """ Test that every bundle is a JSON document in the directory. """
        self.assertEqual([], self._MODEL_STORAGE.keys(), msg='Expected no directory yet.')
        self._MODEL_STORAGE.put('spx_span20', _bundle('spx'))
        self.assertEqual(['spx_span20.json'], os.listdir(self.directory),
                         msg='Expected one document per bundle.')

    def testReplaceWarns(self):
        """ Test that replacing a stored bundle emits a warning. """
        self._MODEL_STORAGE.put('spx', _bundle('spx'))
        with warnings.catch_warnings(record=True) as caughtWarnings:
            warnings.simplefilter('always')
            self._MODEL_STORAGE.put('spx', _bundle('spx'))
        self.assertEqual(1, len(caughtWarnings), msg='Expected a warning.')
        self.assertTrue(issubclass(caughtWarnings[0].category, RuntimeWarning),
                        msg='Expected a RuntimeWarning.')

    def testPersistent(self):
        """ Test that a new storage on the same directory sees the stored bundles. """
        self._MODEL_STORAGE.put('spx', _bundle('spx'))
        self.assertTrue(JsonModelStorage(self.directory).contains('spx'),
                        msg='Expected the bundle to survive the storage object.')


class DictModelStorageTest(Abstract.ModelStorageTest):
    """ Test the DictModelStorage. """

    def setUp(self):
        super(DictModelStorageTest, self).setUp()
        self.setupModelStorage(DictModelStorage())


class KeyTest(TwistedTestCase):
    """ Test the storage keys. """

    def testBundleKey(self):
        """ Test the key of an instrument and a span. """
        self.assertEqual('spx_span30', bundleKey('spx', 30), msg='Expected instrument and span.')
        self.assertRaises(InvalidInputError, bundleKey, 's p x', 30)

    def testCheckKey(self):
        """ Test that valid keys are returned unchanged. """
        self.assertEqual('a-b.c_1', checkKey('a-b.c_1'), msg='Expected the key.')
        self.assertRaises(InvalidInputError, checkKey, 12)
