"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Profile, vector or table shape does not match the game."""


class NormalizationError(ValueError):
    """A probability distribution does not sum to one."""


class CapacityError(RuntimeError):
    """A materialization or enumeration would exceed its configured cap."""


class InvariantViolation(ValueError):
    """Game data breaks one of its declared invariants."""


class StructuralViolation(AssertionError):
    """A gadget game failed one of its structural checks.

    ``failures`` maps check name to the first witness profile found.
    """

    def __init__(self, failures):
        self.failures = dict(failures)
        parts = ", ".join(f"{k} at {v}" for k, v in self.failures.items())
        super().__init__(f"gadget structure violated: {parts}")


class SolverError(RuntimeError):
    pass


class TargetInfeasible(SolverError):
    """Final distance to the negative orthant exceeded epsilon."""


class OracleViolation(SolverError):
    """The MWMP oracle returned a profile with y^T r(a) above its tolerance."""

    def __init__(self, iteration, value, tolerance):
        self.iteration = iteration
        self.value = value
        self.tolerance = tolerance
        super().__init__(
            f"oracle violated its tolerance at iteration {iteration}: "
            f"y.r = {value:.3e} > {tolerance:.3e}")


class LPError(RuntimeError):
    """Simplex failure: infeasible or unbounded where that cannot happen."""
