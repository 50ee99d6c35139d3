""" Implementations of the abstract classes and the configuration file readers. """

import json
import os
import warnings

from configparser import RawConfigParser, Error as ConfigParserError

from txregime.data import saveModel, loadModel
from txregime.errors import InvalidInputError
from txregime.storage import ModelStorage, checkKey
from txregime.training import PriorConfig, TrainConfig

_CONFIG_SECTIONS = {'prior': PriorConfig, 'training': TrainConfig}


class JsonModelStorage(ModelStorage):
    """ A ModelStorage that keeps one JSON document per bundle in a directory. """
    directory = None

    def __init__(self, directory):
        """
        :param directory: The directory of the bundle documents, created on the first put.
        """
        super(JsonModelStorage, self).__init__()
        self.directory = os.path.abspath(directory)

    def _path(self, key):
        return os.path.join(self.directory, checkKey(key) + '.json')

    def put(self, key, bundle):
        path = self._path(key)
        if os.path.exists(path):
            warnings.warn('Replacing the model bundle ' + path, RuntimeWarning)
        try:
            os.makedirs(self.directory)
        except OSError:
            pass
        saveModel(path, bundle)

    def get(self, key):
        path = self._path(key)
        if not os.path.isfile(path):
            raise KeyError('No model bundle with key "{key}" exists'.format(key=key))
        return loadModel(path)

    def contains(self, key):
        return os.path.isfile(self._path(key))

    def keys(self):
        if not os.path.isdir(self.directory):
            return []
        return sorted(name[:-len('.json')] for name in os.listdir(self.directory)
                      if name.endswith('.json'))


class DictModelStorage(ModelStorage):
    """
    This storage keeps the bundles in memory, they do not survive the process.
    It is useful for tests and for pipelines that do not need to persist their models.
    """

    def __init__(self):
        super(DictModelStorage, self).__init__()
        self._bundles = {}

    def put(self, key, bundle):
        self._bundles[checkKey(key)] = bundle

    def get(self, key):
        if key not in self._bundles:
            raise KeyError('No model bundle with key "{key}" exists'.format(key=key))
        return self._bundles[key]

    def contains(self, key):
        return key in self._bundles

    def keys(self):
        return sorted(self._bundles)


def _readSections(path):
    with open(path, 'r') as configFile:
        content = configFile.read()
    if path.endswith('.json') or content.lstrip().startswith('{'):
        try:
            sections = json.loads(content)
        except ValueError as error:
            raise InvalidInputError(path, 'invalid JSON: {error}'.format(error=error))
        if not isinstance(sections, dict) or \
                not all(isinstance(section, dict) for section in sections.values()):
            raise InvalidInputError(path, 'expected an object of sections')
        return sections
    configParser = RawConfigParser()
    try:
        configParser.read_string(content, source=path)
    except ConfigParserError as error:
        raise InvalidInputError(path, str(error))
    return {section: dict(configParser.items(section)) for section in configParser.sections()}


def loadTrainingConfig(path):
    """
    Read the prior and the training configuration from a JSON document
    {"prior": {...}, "training": {...}} or an ini style file with the sections
    [prior] and [training]. All keys are optional.

    :raises InvalidInputError: If the file contains an unknown section or key or an invalid value.
    :param path: The path of the configuration file.
    :return: The PriorConfig and the TrainConfig.
    """
    sections = _readSections(path)
    for section in sections:
        if section not in _CONFIG_SECTIONS:
            raise InvalidInputError(section, 'unknown configuration section')
    return tuple(_CONFIG_SECTIONS[name].fromMapping(sections.get(name, {}))
                 for name in ['prior', 'training'])
