"""Exception types raised across the package."""


class ClusterSyncError(Exception):
    pass


class InvalidPartition(ClusterSyncError, ValueError):
    pass


class DimensionError(ClusterSyncError, ValueError):
    pass


class InputError(ClusterSyncError, ValueError):
    """Malformed network file. ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class InternalInconsistency(ClusterSyncError, RuntimeError):
    pass


class Infeasible(ClusterSyncError):
    """The sparsity mask cannot realize the invariance constraint."""

    def __init__(self, kkt_residual, threshold):
        super().__init__(
            f"perturbation infeasible under mask: KKT residual {kkt_residual:.3e} "
            f"> threshold {threshold:.3e}"
        )
        self.kkt_residual = kkt_residual
        self.threshold = threshold


class InfeasibleResult(ClusterSyncError):
    pass


class VerificationFailed(ClusterSyncError, AssertionError):
    def __init__(self, check, message=""):
        super().__init__(f"verification failed [{check}] {message}".rstrip())
        self.check = check


class NonFiniteState(ClusterSyncError, FloatingPointError):
    def __init__(self, last_valid_time):
        super().__init__(f"non-finite state after t = {last_valid_time!r}")
        self.last_valid_time = last_valid_time


class ConfigError(ClusterSyncError, ValueError):
    pass
