""" Regime-switching hidden Markov models for financial return series. """

from .hmm import HmmModel
from .modes import StrategyMode, Criterion, RegimeLabel

__all__ = ['HmmModel', 'StrategyMode', 'Criterion', 'RegimeLabel', 'backtest', 'cli', 'data',
           'errors', 'features', 'hmm', 'imp', 'plot', 'regimes', 'selection', 'storage',
           'training']
