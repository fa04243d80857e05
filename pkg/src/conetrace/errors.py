"""Exception hierarchy for conetrace.

``ConetraceError`` is the common base. ``DynamicsError`` subclasses carry
enough context (particle index, lab time) to produce a useful run abort
diagnostic; they map to CLI exit code 3. ``ScenarioError`` maps to exit
code 2.
"""

from __future__ import annotations


class ConetraceError(Exception):
    """Base class for all conetrace errors."""


class ScenarioError(ConetraceError):
    """Invalid scenario input (schema violation, bad numbers, bad paths)."""


class ImaginaryResidueError(ConetraceError):
    """A current-tensor component came out non-real beyond tolerance.

    The tensor is hermitian by construction, so this signals an
    implementation bug rather than bad input.
    """


class OutOfRangeError(ConetraceError):
    """Trajectory interpolation queried below the recorded history."""


class NonMonotonicTimeError(ConetraceError):
    """Sample appended out of order during a backwards run."""


class SuperluminalSampleError(ConetraceError):
    """Sample velocity with |v| >= 1 rejected (world lines must be timelike)."""


class DynamicsError(ConetraceError):
    """Base for errors that abort a trajectory integration."""

    def __init__(self, message, particle=None, t=None):
        super().__init__(message)
        self.particle = particle
        self.t = t

    @property
    def cause(self) -> str:
        return type(self).__name__.removesuffix("Error")


class NoCrossingError(DynamicsError):
    """A world line never meets the required light cone.

    Happens only for world lines without the constant-velocity seed
    extrapolation (any straight timelike extension eventually crosses
    every light cone); the canonical case is a curve that approaches
    light speed while escaping its own cones.
    """


class CoincidentError(DynamicsError):
    """Retarded crossing closer than delay_min: effectively coincident particles."""


class PsiZeroError(DynamicsError):
    """Wave function vanishes at the evaluation points; velocity undefined."""


class LightlikeError(DynamicsError):
    """Guiding current is lightlike within tolerance; speed would reach 1."""


class EnvelopeExceededError(ConetraceError):
    """Rejection-sampling envelope violated: density scan grid too coarse."""


class DomainMismatchError(ConetraceError):
    """Trajectory comparison requested outside the common time domain."""


class LowAcceptanceWarning(UserWarning):
    """Rejection sampling acceptance rate fell below the advisory floor."""
