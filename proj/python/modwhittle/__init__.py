"""Modulated Whittle estimation for nonstationary time series."""

from ._modwhittle import *  # noqa: F401,F403
from ._modwhittle import LatentModel

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.3.0"
