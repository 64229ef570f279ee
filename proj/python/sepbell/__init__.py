"""Separability Bell operators for N qudits."""

from ._sepbell import *  # noqa: F401,F403
from ._sepbell import SepbellError

__all__ = [name for name in dir() if not name.startswith("_")]
