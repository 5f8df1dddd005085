"""Contact phase structure of a test particle on a Lorentzian spacetime.

The compiled core lives in ``hidsym._hidsym``; this package re-exports it.
"""

from ._hidsym import *  # noqa: F401,F403
from ._hidsym import __doc__  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
