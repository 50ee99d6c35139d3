"""
This is an example of the complete regime pipeline on synthetic data.
It generates a series with known regimes, trains a three state model on the features of the
training window, labels the regimes and backtests both strategies over the test window.
The real instruments would be loaded with txregime.data.loadCsv instead.
"""

import logging
import sys

from twisted.internet import task, defer

from txregime import StrategyMode, RegimeLabel
from txregime.backtest import StrategyConfig, splitTrainValTest, runBacktest, \
    positionsFromPesr, regimeAgreement
from txregime.data import presetSpec, generateSynthetic
from txregime.features import FeatureConfig, buildFeatureMatrix
from txregime.regimes import describeRegimes
from txregime.training import PriorConfig, TrainConfig, fitAsync


def createSeries(length=3000, seed=7):
    """
    :param length: The number of days.
    :param seed: The seed of the generator.
    :return: A synthetic equity like InstrumentSeries and its hidden regime path.
    """
    return generateSynthetic(presetSpec('equity', length, seed), instrumentId='equity')


def splitDates(series):
    """
    :param series: The InstrumentSeries.
    :return: The training, validation and test ranges at 60% and 80% of the history.
    """
    dates = series.dates
    return splitTrainValTest(dates, dates[int(len(dates) * 0.6)], dates[int(len(dates) * 0.8)])


@defer.inlineCallbacks
def runPipeline(span=30, numRestarts=4):
    """
    Train, label and backtest on a synthetic series.

    :param span: The span of the features.
    :param numRestarts: The number of training runs.
    :return: A Deferred that fires with a dict mapping each StrategyMode to its BacktestResult,
             the labelled EsrVector and the agreement of the long-short positions with the
             positions an observer of the true regimes would take.
    """
    series, path = createSeries()
    trainRange, valRange, testRange = splitDates(series)
    features = buildFeatureMatrix(series.returns, FeatureConfig(span), trainRange)
    trainRows = features.trainingRows(trainRange)
    report = yield fitAsync(features.values[trainRows.asSlice()], 3,
                            PriorConfig(stickyBonus=20.0, covPriorStrength=1.0),
                            TrainConfig(numRestarts=numRestarts, maxIterations=200, seed=1),
                            normalization=features.norm,
                            validationObservations=features.values[valRange.asSlice()])
    regimes = describeRegimes(report.model, features.norm)
    results = {}
    for mode in StrategyMode:
        results[mode] = runBacktest(series, report.model, features, StrategyConfig(mode),
                                    testRange)
    # The generating regimes are ordered bull, bear, high volatility.
    oracle = positionsFromPesr([1.0 if state == 0 else -1.0 if state == 1 else 0.0
                                for state in path[testRange.asSlice()]],
                               StrategyConfig(StrategyMode.LONG_SHORT))
    agreement = regimeAgreement(results[StrategyMode.LONG_SHORT].holdings, oracle)
    defer.returnValue((results, regimes, agreement))


def printSummary(outcome):
    """ Print the regimes and the performance of the strategies. """
    results, regimes, agreement = outcome
    for state, name in enumerate(regimes.labelNames()):
        print('{name:>9}: ESR {esr:+.4f}'.format(name=name, esr=regimes.values[state]))
    for mode, result in sorted(results.items(), key=lambda item: item[0].value):
        metrics = result.metrics
        print('{mode:>10}: return {ret:+.2%}, vol {vol:.2%}, sharpe {sr:+.2f}, drawdown {dd:.2%}, '
              'turnover {to:.3f}'.format(mode=mode.value, ret=metrics.annReturn,
                                         vol=metrics.annVol, sr=metrics.sharpe,
                                         dd=metrics.maxDrawdown, to=metrics.dailyTurnover))
    print('Agreement with the true regimes: {agreement:.1%}'.format(agreement=agreement))
    if regimes.labels is not None and RegimeLabel.BULL in regimes.labels:
        print('Bull state: {state}'.format(state=regimes.stateOf(RegimeLabel.BULL) + 1))


def main(_reactor):
    """ Run the pipeline and print its results. """
    logging.basicConfig(level=logging.INFO, stream=sys.stdout)
    return runPipeline().addCallback(printSummary)


if __name__ == '__main__':
    task.react(main)
