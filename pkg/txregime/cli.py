""" The txregime command line: ingest, synth, train, select, predict, backtest and report. """

import datetime
import json
import logging
import math
import os
import sys

import numpy as np
import pandas as pd

from twisted.internet import defer, task, threads
from twisted.python import usage

from txregime.backtest import StrategyConfig, splitTrainValTest, runBacktest, benchmarkMetrics
from txregime.data import loadCsv, saveCsv, presetSpec, generateSynthetic, rollingStats, \
    writeRollingStatsCsv, ModelBundle, PRESETS, DATE_FORMAT
from txregime.errors import RegimeError, ManifestError
from txregime.features import FeatureConfig, FeatureMatrix, buildFeatureMatrix, extractFeatures, \
    zscoreApply
from txregime.hmm import forwardFilter, stationaryDistribution
from txregime.imp import JsonModelStorage, loadTrainingConfig
from txregime.modes import StrategyMode, Criterion
from txregime.plot import writeEquityCurveSvg
from txregime.regimes import describeRegimes, esrValues, pesrSeries
from txregime.selection import selectStates
from txregime.storage import bundleKey
from txregime.training import PriorConfig, TrainConfig, fit
from txregime.util import isIntType

OUTPUT_DIR_VARIABLE = 'TXREGIME_OUTPUT_DIR'
DEFAULT_OUTPUT_DIR = 'txregime-output'
EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2
BUY_AND_HOLD = 'buy_and_hold'


def _parseDate(name, value):
    try:
        return datetime.datetime.strptime(str(value), DATE_FORMAT).date()
    except ValueError:
        raise ManifestError('{name} must be a date like 2016-01-01, got {value!r}'.format(
            name=name, value=value))


def _parseIntList(name, value):
    if isinstance(value, str):
        value = [item for item in value.split(',') if item.strip()]
    try:
        items = [int(item) if isinstance(item, str) else item for item in value]
    except (TypeError, ValueError):
        raise ManifestError('{name} must be a list of integers, got {value!r}'.format(
            name=name, value=value))
    if not items or not all(isIntType(item) and item >= 1 for item in items):
        raise ManifestError('{name} must be a non-empty list of integers >= 1'.format(name=name))
    return items


def _parseNumber(name, value, minimum=0, integer=False):
    convert = int if integer else float
    if isinstance(value, str):
        try:
            value = convert(value)
        except ValueError:
            raise ManifestError('{name} must be a number, got {value!r}'.format(
                name=name, value=value))
    if integer:
        valid = isIntType(value)
    else:
        valid = isinstance(value, (int, float)) and not isinstance(value, bool) \
            and not math.isnan(value)
    if not valid or value < minimum:
        raise ManifestError('{name} must be {kind} >= {minimum}, got {value!r}'.format(
            name=name, kind='an integer' if integer else 'a number', minimum=minimum,
            value=value))
    return value


class RunManifest(object):
    """ The settings of a pipeline run, read from a JSON document and overridden by flags. """
    FIELDS = {
        'instruments': 'instruments',
        'spans': 'spans',
        'num_states': 'numStates',
        'modes': 'modes',
        'val_start': 'valStart',
        'test_start': 'testStart',
        'seed': 'seed',
        'cost_bps': 'costBps',
        'horizon': 'horizon',
        'neutral_band': 'neutralBand',
        'jobs': 'jobs',
        'output_dir': 'outputDir',
        'training_config': 'trainingConfig',
    }

    def __init__(self, instruments=(), spans=(15, 30, 60), numStates=3,
                 modes=(StrategyMode.LONG_ONLY.value, StrategyMode.LONG_SHORT.value),
                 valStart='2012-01-01', testStart='2016-01-01', seed=0, costBps=5.0, horizon=1,
                 neutralBand=0.0, jobs=4, outputDir=None, trainingConfig=None):
        """
        :raises ManifestError: If a setting is invalid.
        """
        super(RunManifest, self).__init__()
        if isinstance(instruments, str) or \
                not all(isinstance(path, str) for path in instruments):
            raise ManifestError('instruments must be a list of CSV paths')
        self.instruments = list(instruments)
        self.spans = _parseIntList('spans', spans)
        self.numStates = _parseNumber('num_states', numStates, 1, integer=True)
        if isinstance(modes, str):
            modes = [mode for mode in modes.split(',') if mode.strip()]
        try:
            self.modes = [StrategyMode(mode.strip() if isinstance(mode, str) else mode)
                          for mode in modes]
        except ValueError:
            raise ManifestError('modes must be a list of {choices}, got {modes!r}'.format(
                choices=', '.join(mode.value for mode in StrategyMode), modes=modes))
        if not self.modes:
            raise ManifestError('at least one strategy mode is required')
        self.valStart = _parseDate('val_start', valStart)
        self.testStart = _parseDate('test_start', testStart)
        if not self.valStart < self.testStart:
            raise ManifestError('val_start must be before test_start')
        self.seed = _parseNumber('seed', seed, 0, integer=True)
        self.costBps = float(_parseNumber('cost_bps', costBps))
        self.horizon = _parseNumber('horizon', horizon, 0, integer=True)
        self.neutralBand = float(_parseNumber('neutral_band', neutralBand))
        self.jobs = _parseNumber('jobs', jobs, 1, integer=True)
        if outputDir is None:
            outputDir = os.environ.get(OUTPUT_DIR_VARIABLE, DEFAULT_OUTPUT_DIR)
        self.outputDir = outputDir
        self.trainingConfig = trainingConfig

    @classmethod
    def fromDict(cls, data, baseDir='.'):
        """
        :raises ManifestError: If the document has an unknown key or an invalid value.
        :param data: The manifest as a dict with snake_case keys.
        :param baseDir: The directory relative paths in the manifest refer to.
        :return: The RunManifest.
        """
        if not isinstance(data, dict):
            raise ManifestError('the manifest must be a JSON object')
        kwargs = {}
        for key, value in data.items():
            if key not in cls.FIELDS:
                raise ManifestError('unknown key ' + repr(key))
            kwargs[cls.FIELDS[key]] = value
        if isinstance(kwargs.get('instruments'), list):
            kwargs['instruments'] = [os.path.join(baseDir, path) if isinstance(path, str)
                                     else path for path in kwargs['instruments']]
        for name in ['outputDir', 'trainingConfig']:
            if isinstance(kwargs.get(name), str):
                kwargs[name] = os.path.join(baseDir, kwargs[name])
        return cls(**kwargs)

    @classmethod
    def fromFile(cls, path):
        """
        :raises ManifestError: If the file can not be read or is invalid.
        :param path: The path of a JSON manifest.
        :return: The RunManifest.
        """
        try:
            with open(path, 'r') as manifestFile:
                data = json.load(manifestFile)
        except (IOError, ValueError) as error:
            raise ManifestError('unable to read {path}: {error}'.format(path=path, error=error))
        return cls.fromDict(data, os.path.dirname(os.path.abspath(path)))

    def toDict(self):
        data = {key: getattr(self, name) for key, name in self.FIELDS.items()}
        data['modes'] = [mode.value for mode in self.modes]
        data['val_start'] = self.valStart.isoformat()
        data['test_start'] = self.testStart.isoformat()
        return data

    def withOverrides(self, options):
        """
        :param options: Parsed command line options, unset options are None.
        :return: A new manifest with the given command line values replacing the file values.
        """
        data = self.toDict()
        for option, key in [('span', 'spans'), ('states', 'num_states'), ('mode', 'modes'),
                            ('cost-bps', 'cost_bps'), ('horizon', 'horizon'), ('seed', 'seed'),
                            ('out', 'output_dir'), ('jobs', 'jobs'),
                            ('config', 'training_config')]:
            if options.get(option) is not None:
                data[key] = options[option]
        if options.get('instruments'):
            data['instruments'] = list(options['instruments'])
        return RunManifest(**{self.FIELDS[key]: value for key, value in data.items()})

    def trainingSettings(self):
        """
        :raises ManifestError: If the training configuration file is invalid.
        :return: The PriorConfig and the TrainConfig with the seed of the manifest.
        """
        prior, config = PriorConfig(), TrainConfig()
        if self.trainingConfig is not None:
            try:
                prior, config = loadTrainingConfig(self.trainingConfig)
            except (IOError, RegimeError) as error:
                raise ManifestError(str(error))
        return prior, TrainConfig(config.maxIterations, config.tolerance, config.numRestarts,
                                  self.seed)

    def provenance(self, prior, config):
        """
        :param prior: The PriorConfig of the training.
        :param config: The TrainConfig of the training.
        :return: The settings a stored model must have been trained with to be reused.
        """
        return {'val_start': self.valStart.isoformat(), 'test_start': self.testStart.isoformat(),
                'num_states': self.numStates, 'prior': prior.toDict(), 'training': config.toDict()}

    def strategy(self, mode):
        return StrategyConfig(mode, self.neutralBand, self.costBps, self.horizon)

    def path(self, *parts):
        """
        :return: The path of an output file, its directory is created if necessary.
        """
        path = os.path.join(self.outputDir, *parts)
        try:
            os.makedirs(os.path.dirname(path))
        except OSError:
            pass
        return path


class _Job(object):
    """ One unit of work of a command and its outcome. """

    def __init__(self, instrumentPath, span=None, mode=None):
        self.instrumentPath = instrumentPath
        self.span = span
        self.mode = mode
        self.result = None
        self.error = None

    @property
    def name(self):
        parts = [os.path.basename(self.instrumentPath)]
        if self.span is not None:
            parts.append('span {span}'.format(span=self.span))
        if self.mode is not None:
            parts.append(self.mode.value)
        return ', '.join(parts)


def _runJob(function, job, manifest):
    """ Execute a job in a worker thread, recording a pipeline failure instead of raising it. """
    try:
        job.result = function(job, manifest)
    except (RegimeError, IOError, ValueError) as error:
        logging.getLogger('txRegime').error('Job %s failed: %s', job.name, error,
                                            exc_info=True)
        job.error = str(error)
    return job


def _runJobs(function, jobs, manifest):
    """
    Run jobs in the reactor thread pool, at most manifest.jobs at the same time.

    :return: A Deferred that fires with the jobs in their original order.
    """
    semaphore = defer.DeferredSemaphore(manifest.jobs)
    return defer.gatherResults(
        [semaphore.run(threads.deferToThread, _runJob, function, job, manifest) for job in jobs],
        consumeErrors=True)


def _writeCsv(frame, path):
    frame.to_csv(path, index=False, na_rep='')
    logging.getLogger('txRegime').info('Wrote %s', path)


def _exitCode(jobs):
    failed = [job for job in jobs if job.error is not None]
    for job in failed:
        sys.stderr.write('{name}: {error}\n'.format(name=job.name, error=job.error))
    return EXIT_FAILURE if failed else EXIT_SUCCESS


def _instrumentJobs(manifest, withSpans=False, withModes=False):
    if not manifest.instruments:
        raise ManifestError('no instrument CSV files given')
    jobs = []
    for path in manifest.instruments:
        for span in (manifest.spans if withSpans else [None]):
            for mode in (manifest.modes if withModes else [None]):
                jobs.append(_Job(path, span, mode))
    return jobs


def _trainingFeatures(series, span, manifest):
    """
    :return: The FeatureMatrix normalized on the training rows and the split IndexRanges.
    """
    trainRange, valRange, testRange = splitTrainValTest(series.dates, manifest.valStart,
                                                       manifest.testStart)
    features = buildFeatureMatrix(series.returns, FeatureConfig(span), trainRange)
    return features, (features.trainingRows(trainRange), valRange, testRange)


def _trainBundle(series, span, manifest):
    features, (trainRows, valRange, _) = _trainingFeatures(series, span, manifest)
    prior, config = manifest.trainingSettings()
    report = fit(features.values[trainRows.asSlice()], manifest.numStates, prior, config,
                 normalization=features.norm,
                 validationObservations=features.values[valRange.asSlice()])
    labels = None
    if report.model.dim == 2:
        labels = describeRegimes(report.model, features.norm).labels
    return ModelBundle(report.model, features.norm, features.config, series.instrumentId,
                       labels, report.objective, manifest.provenance(prior, config)), report


def _bundleFor(series, span, manifest, storage):
    """
    :return: The stored bundle of the instrument and span if it was trained with the manifest's
             split, number of states and training settings, otherwise a newly trained one,
             and whether it was newly trained.
    """
    key = bundleKey(series.instrumentId, span)
    if storage.contains(key):
        bundle = storage.get(key)
        if bundle.provenance == manifest.provenance(*manifest.trainingSettings()):
            return bundle, False
        logging.getLogger('txRegime').info('Retraining %s, the stored model was trained with '
                                           'other settings', key)
    return _trainBundle(series, span, manifest)[0], True


def _applyBundle(series, bundle):
    raw = extractFeatures(series.returns, bundle.featureConfig)
    return FeatureMatrix(zscoreApply(raw, bundle.norm), raw, bundle.norm, bundle.featureConfig)


def _storage(manifest):
    return JsonModelStorage(os.path.join(manifest.outputDir, 'models'))


def cmdIngest(manifest):
    """ Validate the instrument files and write them as normalized date,return files. """
    def ingest(job, _):
        return loadCsv(job.instrumentPath)

    def write(jobs):
        for job in jobs:
            if job.error is None:
                path = manifest.path('ingest', job.result.instrumentId + '.csv')
                saveCsv(job.result, path)
                logging.getLogger('txRegime').info('Wrote %s', path)
        return _exitCode(jobs)
    return _runJobs(ingest, _instrumentJobs(manifest), manifest).addCallback(write)


def cmdSynth(manifest, presets, length):
    """ Generate synthetic preset series and their hidden regime paths. """
    for name in presets:
        if name not in PRESETS:
            raise ManifestError('unknown preset {name!r}, expected one of {names}'.format(
                name=name, names=', '.join(sorted(PRESETS))))

    def generate(job, _):
        return generateSynthetic(presetSpec(job.instrumentPath, length, manifest.seed),
                                 instrumentId=job.instrumentPath)

    def write(jobs):
        for job in jobs:
            if job.error is None:
                series, path = job.result
                saveCsv(series, manifest.path('synth', series.instrumentId + '.csv'))
                _writeCsv(pd.DataFrame({'date': series.dates.strftime(DATE_FORMAT),
                                        'state': path + 1}, columns=['date', 'state']),
                          manifest.path('synth', series.instrumentId + '_states.csv'))
        return _exitCode(jobs)
    return _runJobs(generate, [_Job(name) for name in presets], manifest).addCallback(write)


def cmdTrain(manifest):
    """ Fit one model bundle per instrument and span. """
    def train(job, _):
        series = loadCsv(job.instrumentPath)
        return _trainBundle(series, job.span, manifest)

    def write(jobs):
        storage = _storage(manifest)
        rows = []
        for job in jobs:
            if job.error is not None:
                continue
            bundle, report = job.result
            storage.put(bundleKey(bundle.instrumentId, job.span), bundle)
            rows.append([bundle.instrumentId, job.span, bundle.model.numStates, report.objective,
                         report.iterations, report.converged, report.restartIndex,
                         report.validationLogLikelihood,
                         ' '.join(label.value for label in bundle.labels or []),
                         ' '.join('{share:.6f}'.format(share=share) for share in
                                  stationaryDistribution(bundle.model.transitionMatrix))])
        _writeCsv(pd.DataFrame(rows, columns=[
            'instrument', 'span', 'states', 'objective', 'iterations', 'converged', 'restart',
            'validation_loglik', 'labels', 'stationary_shares']),
            manifest.path('train_summary.csv'))
        return _exitCode(jobs)
    return _runJobs(train, _instrumentJobs(manifest, withSpans=True), manifest) \
        .addCallback(write)


def cmdSelect(manifest, candidates, criterion):
    """ Compare the information criteria of models with different numbers of states. """
    def select(job, _):
        series = loadCsv(job.instrumentPath)
        features, (trainRows, _, _) = _trainingFeatures(series, job.span, manifest)
        prior, config = manifest.trainingSettings()
        return series.instrumentId, selectStates(features.values[trainRows.asSlice()],
                                                 candidates, criterion, prior, config)

    def write(jobs):
        rows = []
        for job in jobs:
            if job.error is not None:
                continue
            instrumentId, result = job.result
            for report in result.reports:
                rows.append([instrumentId, job.span, report.numStates, report.numParams,
                             report.logLikelihood, report.aic, report.bic, report.hqic,
                             report.bcaic, report.numStates == result.chosenStates])
            for numStates in sorted(result.failures):
                rows.append([instrumentId, job.span, numStates] + [None] * 6 + [False])
        _writeCsv(pd.DataFrame(rows, columns=[
            'instrument', 'span', 'S', 'p', 'logL', 'AIC', 'BIC', 'HQIC', 'BCAIC', 'chosen']),
            manifest.path('select_{name}.csv'.format(name=Criterion(criterion).value)))
        return _exitCode(jobs)
    return _runJobs(select, _instrumentJobs(manifest, withSpans=True), manifest) \
        .addCallback(write)


def cmdPredict(manifest):
    """ Emit the filtered state probabilities and the predicted Sharpe ratio of every day. """
    storage = _storage(manifest)

    def predict(job, _):
        series = loadCsv(job.instrumentPath)
        bundle, trained = _bundleFor(series, job.span, manifest, storage)
        features = _applyBundle(series, bundle)
        rows = slice(features.warmup, len(features))
        filtered = forwardFilter(bundle.model, features.values[rows])[0]
        pesr = pesrSeries(esrValues(bundle.model, bundle.norm), filtered,
                          bundle.model.transitionMatrix, manifest.horizon)
        frame = pd.DataFrame({'date': series.dates[rows].strftime(DATE_FORMAT)})
        for state in range(bundle.model.numStates):
            frame['p_state{num}'.format(num=state + 1)] = filtered[:, state]
        frame['pesr'] = pesr
        return bundle, trained, frame

    def write(jobs):
        for job in jobs:
            if job.error is None:
                bundle, trained, frame = job.result
                if trained:
                    storage.put(bundleKey(bundle.instrumentId, job.span), bundle)
                _writeCsv(frame, manifest.path('predict', '{id}_span{span}.csv'.format(
                    id=bundle.instrumentId, span=job.span)))
        return _exitCode(jobs)
    return _runJobs(predict, _instrumentJobs(manifest, withSpans=True), manifest) \
        .addCallback(write)


def cmdBacktest(manifest, svg=False, smoothed=False):
    """ Trade every instrument, span and mode over the test window. """
    storage = _storage(manifest)

    def backtest(job, _):
        series = loadCsv(job.instrumentPath)
        bundle, trained = _bundleFor(series, job.span, manifest, storage)
        testRange = splitTrainValTest(series.dates, manifest.valStart, manifest.testStart)[2]
        result = runBacktest(series, bundle.model, _applyBundle(series, bundle),
                             manifest.strategy(job.mode), testRange, smoothed=smoothed)
        assetReturns = series.returns[testRange.asSlice()]
        benchmark = benchmarkMetrics(assetReturns) if len(testRange) > 1 else None
        return bundle, trained, result, assetReturns, benchmark

    def write(jobs):
        rows = []
        curves = {}
        benchmarked = set()
        stored = set()
        for job in jobs:
            if job.error is not None:
                continue
            bundle, trained, result, assetReturns, benchmark = job.result
            key = bundleKey(bundle.instrumentId, job.span)
            if trained and key not in stored:
                stored.add(key)
                storage.put(key, bundle)
            name = '{key}_{mode}'.format(key=key, mode=job.mode.value)
            _writeCsv(result.toFrame(), manifest.path('backtest', name + '.csv'))
            if benchmark is not None and bundle.instrumentId not in benchmarked:
                benchmarked.add(bundle.instrumentId)
                rows.append([bundle.instrumentId, '', BUY_AND_HOLD] + benchmark.asList())
            rows.append([bundle.instrumentId, job.span, job.mode.value]
                        + result.metrics.asList())
            curve = curves.setdefault(key, (result.dates, {
                BUY_AND_HOLD: np.cumprod(1.0 + assetReturns)}))[1]
            curve[job.mode.value] = result.equity
        _writeCsv(pd.DataFrame(rows, columns=[
            'instrument', 'span', 'mode', 'return', 'vol', 'sharpe', 'drawdown', 'turnover']),
            manifest.path('backtest_summary.csv'))
        if svg:
            for key in sorted(curves):
                dates, equity = curves[key]
                writeEquityCurveSvg(manifest.path('backtest', key + '.svg'), dates, equity, key)
        return _exitCode(jobs)
    return _runJobs(backtest, _instrumentJobs(manifest, withSpans=True, withModes=True),
                    manifest).addCallback(write)


def cmdReport(manifest, window):
    """ Rolling statistics and buy-and-hold performance of every instrument. """
    def report(job, _):
        series = loadCsv(job.instrumentPath)
        frame, summary = rollingStats(series, window)
        return series, frame, summary, benchmarkMetrics(series.returns)

    def write(jobs):
        rows = []
        for job in jobs:
            if job.error is not None:
                continue
            series, frame, summary, metrics = job.result
            writeRollingStatsCsv(frame, manifest.path('report', series.instrumentId
                                                      + '_rolling.csv'))
            row = [series.instrumentId, len(series), series.dates[0].strftime(DATE_FORMAT),
                   series.dates[-1].strftime(DATE_FORMAT)] + metrics.asList()[:4]
            for name in ['mean', 'std', 'skew', 'kurt']:
                row.extend(summary[name])
            rows.append(row)
        columns = ['instrument', 'days', 'start', 'end', 'return', 'vol', 'sharpe', 'drawdown']
        for name in ['mean', 'std', 'skew', 'kurt']:
            columns.extend([name + '_min', name + '_max'])
        _writeCsv(pd.DataFrame(rows, columns=columns), manifest.path('report_summary.csv'))
        return _exitCode(jobs)
    return _runJobs(report, _instrumentJobs(manifest), manifest).addCallback(write)


class _PipelineOptions(usage.Options):
    """ Options shared by every command. Unset options fall back to the manifest. """
    optParameters = [
        ['manifest', 'm', None, 'A JSON run manifest.'],
        ['span', None, None, 'Comma separated feature spans.'],
        ['states', None, None, 'The number of hidden states.'],
        ['mode', None, None, 'Comma separated strategy modes (long_only, long_short).'],
        ['cost-bps', None, None, 'The transaction cost in basis points per unit traded.'],
        ['horizon', None, None, 'The prediction horizon in days.'],
        ['seed', None, None, 'The seed of the random initializations.'],
        ['out', 'o', None, 'The output directory.'],
        ['jobs', 'j', None, 'The maximum number of jobs running at the same time.'],
        ['config', 'c', None, 'A training configuration file (JSON or ini).'],
    ]

    def parseArgs(self, *instruments):
        self['instruments'] = list(instruments)

    def manifest(self):
        """
        :raises ManifestError: If the manifest or an option is invalid.
        :return: The RunManifest of the command.
        """
        base = RunManifest.fromFile(self['manifest']) if self['manifest'] else RunManifest()
        return base.withOverrides(self)


class IngestOptions(_PipelineOptions):
    synopsis = 'ingest [options] <instrument.csv>...'


class SynthOptions(_PipelineOptions):
    synopsis = 'synth [options]'
    optParameters = [
        ['preset', None, 'equity', 'Comma separated presets: ' + ', '.join(sorted(PRESETS))],
        ['length', None, 5000, 'The number of days to generate.', int],
    ]


class TrainOptions(_PipelineOptions):
    synopsis = 'train [options] <instrument.csv>...'


class SelectOptions(_PipelineOptions):
    synopsis = 'select [options] <instrument.csv>...'
    optParameters = [
        ['candidates', None, '1,2,3,4', 'Comma separated candidate numbers of states.'],
        ['criterion', None, Criterion.BIC.value, 'aic, bic, hqic or bcaic.'],
    ]


class PredictOptions(_PipelineOptions):
    synopsis = 'predict [options] <instrument.csv>...'


class BacktestOptions(_PipelineOptions):
    synopsis = 'backtest [options] <instrument.csv>...'
    optFlags = [
        ['svg', None, 'Also draw the equity curves as SVG files.'],
        ['smoothed', None, 'Use whole-window smoothed probabilities (sees the future).'],
    ]


class ReportOptions(_PipelineOptions):
    synopsis = 'report [options] <instrument.csv>...'
    optParameters = [
        ['window', None, 252, 'The rolling window in days.', int],
    ]


class Options(usage.Options):
    synopsis = 'txregime [--verbose] <command> [options]'
    optFlags = [
        ['verbose', 'v', 'Log debug messages.'],
    ]
    subCommands = [
        ['ingest', None, IngestOptions, 'Validate instrument CSV files.'],
        ['synth', None, SynthOptions, 'Generate synthetic regime series.'],
        ['train', None, TrainOptions, 'Train one model per instrument and span.'],
        ['select', None, SelectOptions, 'Compare numbers of states by information criteria.'],
        ['predict', None, PredictOptions, 'Predict state probabilities and Sharpe ratios.'],
        ['backtest', None, BacktestOptions, 'Backtest the holding strategies.'],
        ['report', None, ReportOptions, 'Rolling statistics and buy-and-hold performance.'],
    ]

    def postOptions(self):
        if self.subCommand is None:
            raise usage.UsageError('a command is required')


def _dispatch(command, options):
    manifest = options.manifest()
    if command in ('train', 'select', 'predict', 'backtest'):
        manifest.trainingSettings()
    if command == 'ingest':
        return cmdIngest(manifest)
    if command == 'synth':
        return cmdSynth(manifest, [name.strip() for name in options['preset'].split(',')
                                   if name.strip()], options['length'])
    if command == 'train':
        return cmdTrain(manifest)
    if command == 'select':
        try:
            criterion = Criterion(options['criterion'].lower())
        except ValueError:
            raise ManifestError('unknown criterion ' + repr(options['criterion']))
        return cmdSelect(manifest, _parseIntList('candidates', options['candidates']),
                         criterion)
    if command == 'predict':
        return cmdPredict(manifest)
    if command == 'backtest':
        return cmdBacktest(manifest, svg=bool(options['svg']),
                           smoothed=bool(options['smoothed']))
    return cmdReport(manifest, options['window'])


def runCommand(argv):
    """
    Parse a command line and run the command.

    :param argv: The arguments without the program name.
    :return: A Deferred that fires with the exit code: 0 on success, 1 if a job failed
             and 2 if the command line or the manifest is invalid.
    """
    options = Options()
    try:
        options.parseOptions(argv)
        deferred = _dispatch(options.subCommand, options.subOptions)
    except usage.UsageError as error:
        sys.stderr.write('{error}\n{usage}\n'.format(error=error, usage=options))
        return defer.succeed(EXIT_INVALID)
    except ManifestError as error:
        sys.stderr.write(str(error) + '\n')
        return defer.succeed(EXIT_INVALID)
    except SystemExit as error:
        return defer.succeed(error.code or EXIT_SUCCESS)
    return deferred


def _configureLogging(argv):
    verbose = '-v' in argv or '--verbose' in argv
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')


def main(argv=None):
    """ The console entry point. """
    argv = sys.argv[1:] if argv is None else argv
    _configureLogging(argv)

    def run(_reactor):
        def finish(code):
            if code != EXIT_SUCCESS:
                raise SystemExit(code)
        return runCommand(argv).addCallback(finish)
    task.react(run)


if __name__ == '__main__':
    main()
