"""Noisy LDPC decoding: density evolution, EXIT charts, code design and BER simulation."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
