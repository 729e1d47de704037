"""Python bindings for the pdtune C++ library."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
