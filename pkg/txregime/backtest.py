""" Holding strategies driven by predicted Sharpe ratios, with transaction costs. """

import math
import warnings

import numpy as np
import pandas as pd

from txregime.errors import InvalidInputError, UndefinedSharpeError
from txregime.hmm import forwardBackward, forwardFilter
from txregime.modes import StrategyMode
from txregime.regimes import esrValues, pesrSeries
from txregime.util import IndexRange, checkHorizon, frozenArray

TRADING_DAYS = 252
BASIS_POINT = 1e-4


class StrategyConfig(object):
    """ How predictions are turned into holdings and what trading costs. """

    def __init__(self, mode=StrategyMode.LONG_ONLY, neutralBand=0.0, costBps=5.0, horizon=1):
        """
        :raises InvalidInputError: If a value is outside of its range.
        :param mode: The StrategyMode, long-only holdings in [0, 1] or long-short in [-1, 1].
        :param neutralBand: Predictions with an absolute value up to this band are flat.
        :param costBps: The cost in basis points per unit of position traded.
        :param horizon: The prediction horizon h >= 0 in days.
        """
        super(StrategyConfig, self).__init__()
        try:
            self.mode = StrategyMode(mode)
        except ValueError:
            raise InvalidInputError('mode', 'unknown strategy mode {mode!r}'.format(mode=mode))
        for name, value in [('neutralBand', neutralBand), ('costBps', costBps)]:
            if isinstance(value, bool) or not isinstance(value, (int, float, np.number)) \
                    or math.isnan(value) or value < 0:
                raise InvalidInputError(name, 'expected a number >= 0, got {value!r}'.format(
                    value=value))
        if math.isinf(costBps):
            raise InvalidInputError('costBps', 'expected a finite cost')
        self.neutralBand = float(neutralBand)
        self.costBps = float(costBps)
        self.horizon = checkHorizon(horizon)

    @property
    def costFraction(self):
        """ The cost per unit traded as a fraction of the notional. """
        return self.costBps * BASIS_POINT


def positionsFromPesr(pesr, config):
    """
    Map predictions to positions: long above the neutral band, short below its negative
    (long-short only) and flat otherwise.

    :param pesr: The predicted Sharpe ratios.
    :param config: The StrategyConfig.
    :return: The positions.
    """
    pesr = np.asarray(pesr, dtype=float)
    if not np.all(np.isfinite(pesr)):
        raise InvalidInputError('pesr', 'all predictions must be finite')
    positions = np.where(pesr > config.neutralBand, 1.0, 0.0)
    if config.mode is StrategyMode.LONG_SHORT:
        positions[pesr < -config.neutralBand] = -1.0
    return positions


def _checkSeries(holdings, returns):
    holdings = np.asarray(holdings, dtype=float)
    returns = np.asarray(returns, dtype=float)
    if holdings.ndim != 1 or holdings.shape != returns.shape:
        raise InvalidInputError('holdings', 'holdings and returns must be vectors of equal '
                                            'length, got {a} and {b}'.format(
                                                a=holdings.shape, b=returns.shape))
    return holdings, returns


def tradeSizes(holdings):
    """
    :param holdings: The position held over every day.
    :return: |h_t - h_(t-1)| for every day, starting from a flat position.
    """
    holdings = np.asarray(holdings, dtype=float)
    return np.abs(np.diff(holdings, prepend=0.0))


def applyCosts(holdings, returns, costBps):
    """
    Compute the daily strategy returns. The position h_t is held over day t and earns r_t.
    It is decided at the close of the previous day, so the trade into h_(t+1) is booked on day t;
    the entry into h_0 is booked on day 0 and there is no trade after the last day.

    :raises InvalidInputError: If the lengths differ.
    :param holdings: The positions held over each day.
    :param returns: The asset returns of each day.
    :param costBps: The cost in basis points per unit traded.
    :return: The gross and the net daily returns.
    """
    holdings, returns = _checkSeries(holdings, returns)
    trades = tradeSizes(holdings)
    booked = np.zeros_like(trades)
    if trades.shape[0] > 0:
        booked[0] = trades[0]
        booked[:-1] += trades[1:]
    gross = holdings * returns
    return gross, gross - costBps * BASIS_POINT * booked


class PerformanceMetrics(object):
    """ Annualized performance of a daily return series. """

    FIELDS = ['annReturn', 'annVol', 'sharpe', 'maxDrawdown', 'dailyTurnover']

    def __init__(self, annReturn, annVol, sharpe, maxDrawdown, dailyTurnover):
        super(PerformanceMetrics, self).__init__()
        self.annReturn = annReturn
        self.annVol = annVol
        self.sharpe = sharpe
        self.maxDrawdown = maxDrawdown
        self.dailyTurnover = dailyTurnover

    def asList(self):
        return [getattr(self, name) for name in self.FIELDS]


def equityCurve(returns):
    """
    :param returns: Daily returns.
    :return: The compounded value of one unit invested before the first day.
    """
    return np.cumprod(1.0 + np.asarray(returns, dtype=float))


def maxDrawdown(returns):
    """
    :param returns: Daily returns.
    :return: The largest relative decline of the equity curve from a previous peak,
             including the starting value of 1.
    """
    equity = equityCurve(returns)
    peaks = np.maximum.accumulate(np.concatenate([[1.0], equity]))[1:]
    return float(np.max(1.0 - equity / peaks)) if equity.shape[0] else 0.0


def _metrics(returns, holdings):
    if returns.shape[0] < 2:
        raise InvalidInputError('returns', 'expected at least two days, got {n}'.format(
            n=returns.shape[0]))
    annVol = float(np.std(returns) * math.sqrt(TRADING_DAYS))
    annReturn = float(np.prod(1.0 + returns) ** (TRADING_DAYS / float(returns.shape[0])) - 1.0)
    sharpe = float(np.mean(returns) * TRADING_DAYS / annVol) if annVol > 0 else float('nan')
    return PerformanceMetrics(annReturn, annVol, sharpe, maxDrawdown(returns),
                              float(np.mean(tradeSizes(holdings))))


def performanceMetrics(netReturns, holdings):
    """
    :raises InvalidInputError: If there are fewer than two days.
    :raises UndefinedSharpeError: If the returns have zero volatility.
    :param netReturns: The daily net returns.
    :param holdings: The positions held over each day.
    :return: The PerformanceMetrics.
    """
    holdings, netReturns = _checkSeries(holdings, netReturns)
    metrics = _metrics(netReturns, holdings)
    if metrics.annVol == 0:
        raise UndefinedSharpeError()
    return metrics


def benchmarkMetrics(returns):
    """
    :param returns: The daily asset returns.
    :return: The PerformanceMetrics of buying and holding the asset without costs,
             with an undefined Sharpe ratio as NaN.
    """
    returns = np.asarray(returns, dtype=float)
    return _metrics(returns, np.ones_like(returns))


def splitTrainValTest(dates, valStart, testStart):
    """
    Split a date vector into contiguous training, validation and test ranges.
    Each boundary date belongs to the later range.

    :raises InvalidInputError: If the boundaries are misordered or a range is empty.
    :param dates: The strictly increasing dates.
    :param valStart: The first date of the validation range.
    :param testStart: The first date of the test range.
    :return: The training, validation and test IndexRanges.
    """
    dates = pd.DatetimeIndex(dates)
    valStart = pd.Timestamp(valStart)
    testStart = pd.Timestamp(testStart)
    if not valStart < testStart:
        raise InvalidInputError('valStart', 'the validation start {val} must precede the test '
                                            'start {test}'.format(val=valStart.date(),
                                                                  test=testStart.date()))
    if not dates.is_monotonic_increasing or not dates.is_unique:
        raise InvalidInputError('dates', 'the dates must be strictly increasing')
    valIndex = int(dates.searchsorted(valStart, side='left'))
    testIndex = int(dates.searchsorted(testStart, side='left'))
    ranges = (IndexRange(0, valIndex), IndexRange(valIndex, testIndex),
              IndexRange(testIndex, len(dates)))
    for name, indexRange in zip(['training', 'validation', 'test'], ranges):
        if len(indexRange) == 0:
            raise InvalidInputError('dates', 'the {name} range is empty'.format(name=name))
    return ranges


class BacktestResult(object):
    """ The daily path and the metrics of a strategy over a test window. """

    def __init__(self, dates, holdings, pesr, gross, net, metrics, nonCausal=False):
        """
        :param dates: The dates of the test window.
        :param holdings: The position held over each day.
        :param pesr: The prediction made at the close of each day.
        :param gross: The daily returns before costs.
        :param net: The daily returns after costs.
        :param metrics: The PerformanceMetrics of the net returns.
        :param nonCausal: Whether the predictions used data after the decision day.
        """
        super(BacktestResult, self).__init__()
        self.dates = pd.DatetimeIndex(dates)
        self.holdings = frozenArray(holdings)
        self.pesr = frozenArray(pesr)
        self.gross = frozenArray(gross)
        self.net = frozenArray(net)
        self.metrics = metrics
        self.nonCausal = nonCausal

    @property
    def equity(self):
        return equityCurve(self.net)

    def toFrame(self):
        """
        :return: A DataFrame with the columns date, position, pesr, gross, net and equity.
        """
        return pd.DataFrame({
            'date': self.dates.strftime('%Y-%m-%d'),
            'position': self.holdings,
            'pesr': self.pesr,
            'gross': self.gross,
            'net': self.net,
            'equity': self.equity,
        }, columns=['date', 'position', 'pesr', 'gross', 'net', 'equity'])


def runBacktest(instrument, model, features, config, testRange, smoothed=False):
    """
    Trade an instrument over a test window. At the close of every day the state probabilities
    given the features so far are forecast h days ahead, weighted with the state Sharpe
    ratios and mapped to the position held over the next day. The first position of the
    window is decided at the close of the day before it.

    :param instrument: The InstrumentSeries.
    :param model: The model fitted on the normalized features.
    :param features: The FeatureMatrix of the instrument.
    :param config: The StrategyConfig.
    :param testRange: The IndexRange of the test days.
    :param smoothed: Use the state probabilities given the whole window instead of the
                     filtered ones. The predictions then see the future and the result
                     is flagged as non-causal.
    :return: The BacktestResult.
    """
    if len(features) != len(instrument):
        raise InvalidInputError('features', 'expected one feature row per return')
    if len(testRange) == 0 or testRange.stop > len(instrument):
        raise InvalidInputError('testRange', 'expected a non-empty range within the series')
    filterStart = max(testRange.start - 1, 0)
    observations = features.values[filterStart:testRange.stop]
    if smoothed:
        warnings.warn('Smoothed backtest: the predictions use the whole test window',
                      RuntimeWarning)
        stateProbs = forwardBackward(model, observations).smoothed
    else:
        stateProbs = forwardFilter(model, observations)[0]
    predictions = pesrSeries(esrValues(model, features.norm), stateProbs,
                             model.transitionMatrix, config.horizon)
    decisions = positionsFromPesr(predictions, config)
    if testRange.start == 0:
        holdings = np.concatenate([[0.0], decisions[:-1]])
        signals = predictions
    else:
        holdings = decisions[:-1]
        signals = predictions[1:]
    returns = instrument.returns[testRange.asSlice()]
    gross, net = applyCosts(holdings, returns, config.costBps)
    if len(testRange) > 1:
        metrics = _metrics(net, holdings)
    else:
        metrics = PerformanceMetrics(float((1.0 + net[0]) ** TRADING_DAYS - 1.0), 0.0,
                                     float('nan'), maxDrawdown(net), float(tradeSizes(holdings)[0]))
    return BacktestResult(instrument.dates[testRange.asSlice()], holdings, signals, gross, net,
                          metrics, nonCausal=smoothed)


def regimeAgreement(positions, oraclePositions):
    """
    :param positions: The positions of a strategy.
    :param oraclePositions: The positions of a strategy that knows the true regimes.
    :return: The fraction of days on which both hold the same position.
    """
    positions, oraclePositions = _checkSeries(positions, oraclePositions)
    if positions.shape[0] == 0:
        raise InvalidInputError('positions', 'expected at least one day')
    return float(np.mean(positions == oraclePositions))
