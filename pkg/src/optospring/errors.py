"""Exception hierarchy shared by all modules."""


class OptoSpringError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(OptoSpringError, ValueError):
    """Invalid or incomplete parameter input.

    ``key`` names the offending config key (or dataclass field).
    """

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class SingularityError(OptoSpringError, ArithmeticError):
    """A denominator fell below the singularity guard."""


class DegenerateModeError(OptoSpringError, ArithmeticError):
    """Symmetric and antisymmetric partial modes coincide (Gamma_- = 0)."""


class BranchCutError(OptoSpringError, ArithmeticError):
    """sqrt(1 + Delta^2) evaluated too close to its branch cut."""


class InternalConsistencyError(OptoSpringError, RuntimeError):
    """A quantity that must be real came out with a significant imaginary part."""


class NumericFailure(OptoSpringError, RuntimeError):
    """Iterative root refinement did not converge.

    ``best`` holds the best iterate reached.
    """

    def __init__(self, message, best=None):
        self.best = best
        super().__init__(message)


class PerturbationError(OptoSpringError, ArithmeticError):
    """Perturbative expansion is not applicable at this parameter point."""

    flag = "unavailable"


class OvercriticalPumpError(PerturbationError):
    """p^2 < 0: the zero-order spring is overcritical."""

    flag = "overcritical"


class DoubleResonanceError(PerturbationError):
    """p is (numerically) zero: the double-resonance point."""

    flag = "double_resonance"


class BracketError(OptoSpringError, ValueError):
    """Stability verdict is the same at both ends of a search interval."""


class TuningError(OptoSpringError, RuntimeError):
    """Could not adjust delta_w to reach the requested effective detuning."""
