"""conetrace: trajectories for wave-function-guided Dirac particles whose
interaction is retarded along light cones, with the equal-time guidance
law as built-in reference and an ensemble-statistics harness.

Hot kernels run through a compiled extension when available; set
CONETRACE_PURE_PYTHON=1 to force the numpy fallback.  The active choice
is exposed as conetrace.backend_name.
"""

__version__ = "0.1.0"

from ._backend import backend_name
from .bohm_dirac import bd_run, bd_transport, bd_velocity, compare
from .dynamics import (IntegratorConfig, RunResult, SystemState,
                       guided_velocity, resume_run, run, step, velocity)
from .ensemble import (SampleSet, SweepReport, TransportReport,
                       equivariance_test, limit_sweep, nonconservation_probe,
                       sample)
from .errors import (CoincidentError, ConetraceError, DomainMismatchError,
                     DynamicsError, EnvelopeExceededError,
                     ImaginaryResidueError, LightlikeError,
                     LowAcceptanceWarning, NoCrossingError,
                     NonMonotonicTimeError, OutOfRangeError, PsiZeroError,
                     ScenarioError, SuperluminalSampleError)
from .minkowski import (ETA, boost_matrix, boost_velocity, four_vector,
                        lower_index, minkowski_dot, minkowski_norm2)
from .scenario import Scenario, load_scenario, parse_scenario, scale_scenario
from .spinors import (ALPHA, GAMMA, contract_current, current_tensor,
                      current_vector, dirac_adjoint, gamma, slash,
                      spinor_boost, timelike_certificate)
from .wavefunction import (Packet, PlaneWaveMode, WaveFunction, density,
                           density_batch, dirac_residual, evaluate_multi,
                           evaluate_packet, gaussian_comb, u_spinor)
from .worldline import RetardedPoint, Seed, Trajectory, retarded_point

__all__ = [
    "__version__", "backend_name",
    "bd_run", "bd_transport", "bd_velocity", "compare",
    "IntegratorConfig", "RunResult", "SystemState", "guided_velocity",
    "resume_run", "run", "step", "velocity",
    "SampleSet", "SweepReport", "TransportReport", "equivariance_test",
    "limit_sweep", "nonconservation_probe", "sample",
    "CoincidentError", "ConetraceError", "DomainMismatchError",
    "DynamicsError", "EnvelopeExceededError", "ImaginaryResidueError",
    "LightlikeError", "LowAcceptanceWarning", "NoCrossingError",
    "NonMonotonicTimeError", "OutOfRangeError", "PsiZeroError",
    "ScenarioError", "SuperluminalSampleError",
    "ETA", "boost_matrix", "boost_velocity", "four_vector", "lower_index",
    "minkowski_dot", "minkowski_norm2",
    "Scenario", "load_scenario", "parse_scenario", "scale_scenario",
    "ALPHA", "GAMMA", "contract_current", "current_tensor", "current_vector",
    "dirac_adjoint", "gamma", "slash", "spinor_boost", "timelike_certificate",
    "Packet", "PlaneWaveMode", "WaveFunction", "density", "density_batch",
    "dirac_residual", "evaluate_multi", "evaluate_packet", "gaussian_comb",
    "u_spinor",
    "RetardedPoint", "Seed", "Trajectory", "retarded_point",
]
