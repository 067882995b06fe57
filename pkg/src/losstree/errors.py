"""Exception types shared across the package."""


class LossTreeError(ValueError):
    """Base class for all input and contract violations."""


class CycleDetected(LossTreeError):
    """The edge list contains a cycle."""


class DisconnectedInput(LossTreeError):
    """Some node is not reachable from the root."""


class DegreeViolation(LossTreeError):
    """A node violates the degree rules (unary internal node, multi-child root)."""


class ParameterOutOfRange(LossTreeError):
    """A generator parameter is outside its legal range."""


class OutOfDomain(LossTreeError):
    """A value lies outside the domain of the addloss transform."""


class Infeasible(LossTreeError):
    """The requested internal assignment leaves no non-negative leaf solution."""


class NotInternal(LossTreeError):
    """The node is not an internal node."""


class InfeasibleStart(LossTreeError):
    """The supplied starting solution does not satisfy the observations."""


class XOutOfRange(LossTreeError):
    """The local family parameter lies outside its feasible range."""


class InstanceTooLarge(LossTreeError):
    """The instance exceeds the brute-force size limit."""


class KTooSmall(LossTreeError):
    """Requested sparsity is below the minimum the construction supports."""


class NotBranchNode(LossTreeError):
    """The node has fewer than two children."""


class InconsistentObservation(LossTreeError):
    """Binary path observations contradict the tree structure."""


class ConfigInvalid(LossTreeError):
    """An experiment configuration fails validation."""
