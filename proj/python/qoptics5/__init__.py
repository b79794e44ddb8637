"""Python bindings for the qoptics5 C++ core."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
