"""Exception hierarchy.

Two failure families matter to callers: hypothesis violations (the problem
as configured is outside the admissible regime: no spectral gap at 0, rho
beyond the admissible bound, a nonlinearity failing its structural
hypotheses) and numerical failures (iteration caps, singular systems,
post-condition checks).  The command-line front end maps the first family
to exit status 2 and the second to exit status 1.
"""


class LatticeGapError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(LatticeGapError, ValueError):
    """Malformed or inconsistent arguments (dimension mismatch, NaN, ...)."""


class ConfigError(LatticeGapError):
    """Unparseable or invalid run configuration."""


class HypothesisError(LatticeGapError):
    """The configured problem violates a structural hypothesis."""


class NoSpectralGapError(HypothesisError):
    """The periodic operator has no spectral gap at 0."""


class RhoOutOfRangeError(HypothesisError):
    """Requested Hardy coupling exceeds the admissible bound."""


class ModelHypothesisError(HypothesisError):
    """The nonlinearity fails its validated hypotheses."""


class CertificationMissingError(HypothesisError):
    """A stale or missing gap certification blocks a dependent command."""


class NumericalError(LatticeGapError):
    """Numerical failure (non-convergence, singularity, failed post-check)."""


class ZeroEigenvalueError(NumericalError):
    """An eigenvalue sits at 0; the positive/negative splitting is undefined."""


class SingularJacobianError(NumericalError):
    """Newton system could not be factorized."""


class ConvergenceError(NumericalError):
    """Iteration cap exceeded or residual diverged."""


class DegenerateProblemError(NumericalError):
    """No nontrivial critical point exists (e.g. vanishing nonlinearity)."""


class PostConditionError(NumericalError):
    """A computed solution failed its exit checks ("not a Nehari point")."""
