"""Coincidence and common fixed points of mapping pairs on metric spaces with a binary relation."""
__version__ = "0.1.0"

from .contraction import (CATALOG, ComparisonFunction, ImplicitRelation, NotCertifiedError,
                          check_g1, check_g2, check_g3, make_catalog, make_explicit, make_linear)
from .instance import InstanceError, load, loads
from .metric import FiniteMetricSpace, validate_metric
from .relation import Relation, find_g_path, is_tg_closed
from .solver import MappingPair, error_bounds, iterate, promote_to_common_fixed_point
from .urysohn import UrysohnProblem
from .verifier import RANKS, verify
