# SPDX-License-Identifier: Apache-2.0
"""Stochastic-geometry toolkit for propagation losses in shadowed cellular
networks: pattern generators, the marked propagation process, its Poisson
limit, K-S experiment protocols, and the path-loss exponent estimator."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401
