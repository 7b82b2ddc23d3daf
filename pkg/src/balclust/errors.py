"""Exception hierarchy for balclust.

Input/validation problems, solver infeasibility, and oracle budget limits
are separate families so the CLI can map them to distinct exit codes.
"""


class BalclustError(Exception):
    """Base class for all balclust errors."""


class InputError(BalclustError):
    """Base class for malformed or invalid input data."""


class WeightOutOfRange(InputError):
    """An edge weight lies outside the open interval (0, 1)."""


class DuplicateEdge(InputError):
    """The same unordered node pair appears more than once."""


class SelfLoop(InputError):
    """An edge connects a node to itself."""


class Disconnected(InputError):
    """The graph does not form a single connected component."""


class NotSquare(InputError):
    """A similarity matrix is not square."""


class Asymmetric(InputError):
    """A similarity matrix differs from its transpose beyond tolerance."""


class DimensionMismatch(InputError):
    """Point vectors do not all share the same dimension."""


class ParseError(InputError):
    """A text input could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NotATree(InputError):
    """An edge set does not form a spanning tree."""


class DisconnectedCluster(InputError):
    """A cluster does not induce a connected subgraph."""


class NotAPartition(InputError):
    """A clustering's clusters are not a partition of the node set."""


class ClusterNotConnectedInTree(InputError):
    """A cluster is not connected using tree edges only."""


class InfeasibleK(BalclustError):
    """No clustering with the requested cluster count is available."""


class TooSmall(BalclustError):
    """The instance is too small for the requested operation."""


class BudgetExceeded(BalclustError):
    """A brute-force enumeration exceeded its configured budget."""


class CorruptProvenance(BalclustError):
    """Internal consistency failure while reconstructing a solution."""
