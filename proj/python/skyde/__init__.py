"""Python face of the SkyDe covert-channel laboratory.

Everything lives in the compiled extension; this package only re-exports it.
"""

from skyde._core import *  # noqa: F401,F403
from skyde._core import __doc__  # noqa: F401

__version__ = "0.1.0"
