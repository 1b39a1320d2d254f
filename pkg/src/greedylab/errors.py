"""Exception types shared across the package."""


class GreedyLabError(Exception):
    """Base class for all library errors."""


class CapacityError(GreedyLabError):
    """A vector puts more coordinates into a block than the block has."""

    def __init__(self, block: int, requested: int, size: int):
        self.block = block
        self.requested = requested
        self.size = size
        super().__init__(
            f"block {block} holds {size} coordinates but {requested} were requested"
        )


class TruncationError(GreedyLabError):
    """The materialized schedule is too shallow to answer exactly.

    Raised instead of returning a silently wrong value.
    """


class TieBudgetError(GreedyLabError):
    """Tie-resolution space exceeds the configured enumeration cap."""


class TermBudgetError(GreedyLabError):
    """Quasi-norm series has more terms than the configured budget allows."""


class OracleUnavailableError(GreedyLabError):
    """A brute-force oracle was asked for an instance beyond its feasible size."""


class ScheduleTooShallowError(GreedyLabError):
    """The schedule has no block satisfying the construction's growth requirement."""
