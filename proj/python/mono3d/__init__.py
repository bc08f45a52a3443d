"""Numerical core for monocular 3D detection experiments.

Thin wrapper over the C++ extension `_mono3d`: box geometry (IoU3D,
gIoU3D), grouped matrix NMS with analytic Jacobians, target assignment
and the imagewise AP loss, loss gradient-variance analysis with an SGD
simulator, ground-plane depth with height-change trends, and
scale-equivariant steerable convolution.
"""

try:
    from ._mono3d import *  # noqa: F401,F403  (installed package layout)
    from ._mono3d import __doc__ as _core_doc  # noqa: F401
except ImportError:  # build-tree layout used by the ctest smoke tests
    from _mono3d import *  # noqa: F401,F403

__version__ = "0.1.0"
