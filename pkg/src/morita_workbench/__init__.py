"""Finite-scale Morita equivalence workbench.

The finite layer builds convolution algebras of finite groupoids and the
bimodule attached to an equivalence bibundle; the smooth layer
(``morita_workbench.poisson``) checks the Poisson-geometric counterpart on
coordinate examples by finite differences.
"""
from .bibundle import (Bibundle, bibundle_to_dict, check_equivalence, rectangle_bibundle, translation_bibundle,
                       validate_bibundle)
from .bimodule import verify_pre_equivalence
from .convolution import block_count, convolve, cstar_norm, involute, morita_oracle
from .errors import WorkbenchError
from .groupoid import FiniteGroupoid, groupoid_to_dict, make_builtin, orbit_decomposition, validate_groupoid

__version__ = "0.1.0"
