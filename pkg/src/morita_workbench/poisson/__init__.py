"""Smooth layer: dual Lie algebroids, momentum maps and the cotangent groupoid in global charts."""
from .algebroid import algebroid_frame, algebroid_from_groupoid, from_annihilator, to_annihilator
from .brackets import canonical_bracket, lie_poisson_bracket, poisson_bivector
from .charts import (
    CoordinateGroupoid, Covector, LieAlgebroidChart, ScalarField, SmoothAction, SmoothBibundle,
    basic_field, generic_field, linear_field, symbol_field,
)
from .checks import (
    check_action_axioms, check_algebroid, check_anti_poisson, check_bracket_match, check_commuting_pullbacks,
    check_cotangent_groupoid, check_jacobi, check_lagrangian_graph, check_poisson_property,
    check_symplectic_orthogonality,
)
from .cotangent import cotangent_act, cotangent_compose, cotangent_source, cotangent_target, cotangent_unit
from .examples import get_example
from .fd import FDConfig
from .manifest import load_manifest, validate_manifest
from .momentum import MomentumMap, momentum_left, momentum_right
