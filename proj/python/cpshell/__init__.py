"""Thermal Casimir-Polder free energy of an atom near a thin plasma sphere."""

from ._cpshell import *  # noqa: F401,F403
from ._cpshell import __doc__  # noqa: F401

__version__ = "0.1.0"
