"""Subprocess host for Python hardware reference models.

The shim reads newline-delimited JSON commands on stdin, executes a
``TopModule`` model in a restricted namespace, and writes exactly one
JSON reply line per command on stdout.  Anything else the model or the
shim wants to say goes to stderr.  Run it as ``python -m pyshim``.
"""

from pyshim.server import ShimSession, serve

__version__ = "0.1.0"

__all__ = ["ShimSession", "serve", "__version__"]
