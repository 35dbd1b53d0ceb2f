"""Exception and warning types shared across the package."""


class WalksearchError(ValueError):
    """Base class for all errors raised by this package."""


class GraphConstructionError(WalksearchError):
    """A weighted graph violates its structural invariants."""


class NotReversibleError(WalksearchError):
    """A transition matrix fails detailed balance beyond tolerance."""


class NotErgodicError(WalksearchError):
    """An operation requires a connected, non-bipartite (irreducible, aperiodic) chain."""


class DisjointnessError(WalksearchError):
    """Two vertex sets that must be disjoint overlap."""


class InfiniteResistanceError(WalksearchError):
    """The sink set is unreachable from the source support."""


class PreconditionError(WalksearchError):
    """A documented hypothesis of an operation fails; the message names the clause."""


class SizeLimitError(WalksearchError):
    """A construction would exceed the configured dimension cap."""


class DomainError(WalksearchError):
    """A scalar argument lies outside the admissible domain."""


class StateIntegrityError(WalksearchError):
    """A state vector drifted away from unit norm."""


class ConfigError(WalksearchError):
    """A search configuration is malformed."""


class InstanceFormatError(WalksearchError):
    """An instance file is malformed; the message carries field diagnostics."""


class DegenerateChainWarning(UserWarning):
    """The requested operation produced a degenerate (never-moving) chain."""
