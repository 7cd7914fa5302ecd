"""Exception types shared across the package."""


class NeatLabError(Exception):
    """Base class for all neatlab errors."""


class ContractError(NeatLabError):
    """A caller violated a documented precondition (wrong arity, unset fitness, ...)."""


class ConfigError(NeatLabError):
    """An experiment or algorithm configuration is invalid."""


class ZeroEdgeGraphError(NeatLabError):
    """Modularity is undefined for a graph with no edges (L appears in a denominator)."""


class GraphSizeError(NeatLabError):
    """Exhaustive partition search was requested for a graph beyond the size guard."""


class CycleError(NeatLabError):
    """A feedforward network was requested for a genome whose enabled digraph has a cycle."""

    def __init__(self, edge: tuple[int, int]):
        self.edge = edge
        super().__init__(f"enabled-connection digraph has a cycle through edge {edge[0]} -> {edge[1]}")


class SimulationError(NeatLabError):
    """An environment was stepped from a non-finite state."""


class FormatError(NeatLabError):
    """An input file does not match the expected schema."""


class ExtinctionError(NeatLabError):
    """Every species was culled; the population cannot reproduce."""
