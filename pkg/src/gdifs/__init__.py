"""Graph-directed IFS attractors of weak contractions and de Rham-type
functional equations, with sampled contraction certification throughout."""

from .contraction import (Certificate, LinearComparison, MaxComparison,
                          PowerLinearComparison, RatioComparison,
                          certify_contraction, estimate_linear, iterate_phi,
                          max_comparison)
from .derham import (Address, CompatibleFamily, DeRhamSystem, PhiValue,
                     address, check_compatibility, eval_phi, graph_attractor,
                     verify_functional_equation)
from .exprfn import (DomainError, Expr, ParseError, PointMap, check_self_map,
                     parse)
from .gdsystem import (Edge, GraphIFS, PointCloudVector, apply_T,
                       iterate_attractor, residual, seed_fixed_point, validate)
from .hausdorff import covering_radius, d_inf, hp_distance, hp_inf
from .semimetric import (BoundedPowerTransformer, CantorTransformer,
                         PowerTransformer, RatioTransformer, SemiMetricSpec,
                         cantor_value, diam, distance, generalized_inverse,
                         triangle_bound)

__version__ = "0.1.0"
