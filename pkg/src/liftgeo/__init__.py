"""Lifted metrics, connections and curvature checks on tangent bundles, evaluated with Taylor jets."""

from .base import (BaseGeometry, ChartDomain, ExplicitConnection, LeviCivitaConnection, MetricField, Probe,
                   VectorFieldBase, a_f, christoffel, cubic_tensor, curvature, gradient, is_codazzi,
                   levi_civita, lie_derivative_connection, lie_derivative_metric, torsion)
from .definitions import BUILTINS, ManifoldDefinition, builtin, load_manifold, parse_definition
from .eigen import charpoly, eigenvalues, sort_spectrum
from .errors import (DefinitionParseError, DomainError, ExprSyntaxError, LiftGeoError, NonConvergence,
                     NonPositiveWeight, SingularMetric, UnknownCheck, ValidationError, ZeroDirection)
from .expr import ScalarFieldExpr, eval_jet, parse
from .harness import REGISTRY, RunConfig, exit_code, run_check
from .report import CheckReport
from .tangent import (TMMetric, TMPoint, TangentBundle, adapted_frame, lc_closed_form, lift_connection,
                      lift_vector, numeric_lc_tm, tm_cubic_tensor, tm_curvature, tm_lie_bracket, tm_metric,
                      tm_torsion)
from .analysis import (check_affine_lift, check_killing_lift, check_statistical, jacobi_operator,
                       k_stein_check, osserman_check)

__version__ = "0.1.0"
