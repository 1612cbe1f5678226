"""Geometric-optics simulator for TMD (transmissive mirror device) displays."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
