"""Hadamard designs, sparse-target learners and their lower-bound curves."""

from ._spindle import *  # noqa: F401,F403
from ._spindle import __version__  # noqa: F401
