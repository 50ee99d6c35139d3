""" The enumerations used across the toolkit. """

from enum import Enum


class StrategyMode(Enum):
    """ How predictions are turned into holdings. """
    LONG_ONLY = 'long_only'
    LONG_SHORT = 'long_short'


class Criterion(Enum):
    """ The information criteria available for choosing the number of hidden states. """
    AIC = 'aic'
    BIC = 'bic'
    HQIC = 'hqic'
    BCAIC = 'bcaic'


class RegimeLabel(Enum):
    """ The names of the three regimes of a three state model. """
    BULL = 'bull'
    BEAR = 'bear'
    HIGH_VOL = 'high_vol'
