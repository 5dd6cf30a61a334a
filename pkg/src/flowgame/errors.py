"""Exception hierarchy shared by all flowgame modules.

Three families, matching the CLI exit-code contract:
- input problems (malformed files, bad strategies, unknown edges) -> exit 1
- model/scale problems (wrong region, violated assumptions, boundary
  parameters, enumeration limits, missing s-t path) -> exit 2
- verification failure is not an exception; the verify command exits 3
  when a report has a positive best-response gap.
"""


class FlowGameError(Exception):
    """Base class for every error raised by this package."""


# ---------------------------------------------------------------- input errors

class InputError(FlowGameError, ValueError):
    """Problems with user-supplied data (networks, strategies, flags)."""


class InvalidNetwork(InputError):
    pass


class MissingNode(InvalidNetwork):
    """An edge endpoint, source or sink is not a declared node."""


class NegativeCapacity(InvalidNetwork):
    pass


class NegativeCost(InvalidNetwork):
    pass


class SelfLoop(InvalidNetwork):
    """Edges from a node to itself are not part of the model."""


class AmbiguousEdge(InputError):
    """A (tail, head) pair matches several parallel edges; use edge_index."""


class InvalidStrategy(InputError):
    """A mixed strategy or one of its atoms fails validation."""


# ------------------------------------------------------- model / scale errors

class ModelError(FlowGameError):
    """The input is well formed but the requested analysis does not apply."""


class NoPathSourceToSink(ModelError):
    """The sink is unreachable from the source."""


class WrongRegion(ModelError):
    """The parameter point lies outside the region the construction needs."""


class BoundaryParameters(WrongRegion):
    """The parameters sit exactly on a region boundary; constructions on the
    boundary are refused rather than silently assigned to one side."""


class AssumptionViolated(ModelError):
    """The network fails the structural assumption the construction needs."""


class InvalidPartition(ModelError):
    """The supplied blocks are not a partition of a verified min-cut."""


class BudgetOutOfRange(ModelError):
    """The defender budget is outside [t_min / p2, t_min]."""


class TooManyNodes(ModelError):
    """Min-cut enumeration refused: more inner nodes than the node limit."""


class TooManyPaths(ModelError):
    """Path enumeration exceeded the configured limit."""


class TooManyEdges(ModelError):
    """Exhaustive attack search or the partition solver got too many edges."""
