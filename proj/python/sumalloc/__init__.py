"""Distributed sum-preserving resource allocation over multi-agent networks.

Gradient-Laplacian protocols (node-based and link-based, discrete and
continuous time) with pluggable nonlinearities, anytime-feasibility tracking,
step-size/rate certificates and epsilon-accuracy under uniform quantization.
"""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __version__  # noqa: F401
except ImportError:  # build-tree layout: extension sits next to the package
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
