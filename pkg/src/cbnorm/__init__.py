"""Norms of right D_n-module maps on m x n complex matrices.

A right D_n-module map T on M_{m,n} is determined by its n column
operators a_1..a_n in M_m, acting columnwise: column j of T(x) is
a_j times column j of x.  The package computes the Hilbert-Schmidt,
operator and completely bounded norms of such maps, rebuilds the
known extremal examples, bounds the extremal ratio C(m,n), and
searches the permutation-column and unitary-column classes for
large cb/op ratios.
"""

from .modmap import RightModuleMap, Witness, apply, apply_amplified, load_map, save_map
from .norms import EngineOptions, NormReport, hs_norm, norm_report
from .bounds import CBounds, c_bounds
from .constructions import example_2x3, example_2x4, thm_eg_map, p34_example

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "RightModuleMap",
    "Witness",
    "apply",
    "apply_amplified",
    "load_map",
    "save_map",
    "EngineOptions",
    "NormReport",
    "hs_norm",
    "norm_report",
    "CBounds",
    "c_bounds",
    "example_2x3",
    "example_2x4",
    "thm_eg_map",
    "p34_example",
]
