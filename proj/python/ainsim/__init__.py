"""Link-level simulator for aligned interference neutralization on the
2x2x2 two-hop interference network."""

from ainsim._core import *  # noqa: F401,F403
from ainsim._core import __doc__  # noqa: F401

__version__ = "0.1.0"
