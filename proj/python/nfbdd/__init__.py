"""Approximate model counting for non-deterministic read-once branching programs."""

try:
    from ._nfbdd import *  # noqa: F401,F403
    from ._nfbdd import __doc__  # noqa: F401
except ImportError:  # in-tree build: the extension sits next to the build outputs
    from _nfbdd import *  # noqa: F401,F403
