"""
Moment Zeta Package

Point counts, fibre zeta functions and moment zeta functions of the toric
family x_1 + ... + x_n + 1/(x_1 ... x_n) = lambda over finite fields.
"""

from .config import RunConfig
from .momentzeta import run_moment
