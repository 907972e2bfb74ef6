"""Topological invariants and spectra of classical configurations.

Characteristic-class integrals (Euler, first Chern, first Pontrjagin) are
computed from metrics and U(1) connections by finite differences and
deterministic tensor Gauss-Legendre quadrature. Integrality conditions
on these integrals give discrete parameter spectra.
"""

__version__ = "0.1.0"

from .errors import (BracketAmbiguity, DegenerateMetric, DegreeOverflow, DimensionTooLow, EmptyDomain,  # noqa: E402
                     InvalidParameter, MissingTransition, NoConvergence, NoTurningPoint, NonFiniteEvaluation,
                     ParseError, TopoSpecError, UnknownGroup)
from .kernels import BACKEND  # noqa: E402
from .calculus import (Chart, IntegrationResult, PFormField, QuadratureSpec, d, exterior_derivative,  # noqa: E402
                       integrate, integrate_function, wedge)
from .frame import CoFrame, Curvature, MetricSpec, SpinConnection, coframe_from_metric, curvature, spin_connection  # noqa: E402
from .gauge import FieldStrength, GaugeConnection, field_strength, verify_transition  # noqa: E402
from .jacobi import MechanicalSystem, allowed_region, jacobi_metric, oscillator_system, turning_value  # noqa: E402
from .charclass import (ClassDensity, CycleSpec, chern1_density, euler_density_2d, integrate_class,  # noqa: E402
                        pontrjagin1_density)
from .configurations import (CATALOG, BlackHoleParams, ConfigurationDescriptor, build_configuration,  # noqa: E402
                             bundle_dimension, group_dimension)
from .spectrum import (SpectrumProblem, SpectrumTable, area_spectrum, invariant_curve,  # noqa: E402
                       oscillator_invariant_normalized, rn_chern_invariant, solve_spectrum)
