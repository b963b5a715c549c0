"""Python bindings for the cfhom solvers."""

from ._cfhom import *  # noqa: F401,F403
from ._cfhom import __doc__  # noqa: F401
