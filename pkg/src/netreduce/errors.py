"""Exception hierarchy with stable, machine-matchable error codes.

Every error carries a ``code`` (its class name) and an ``exit_code``
category used by the CLI: 2 = configuration, 3 = data, 4 = infeasible
strategy. Pipeline stages attach a ``stage`` tag before re-raising.
"""

from __future__ import annotations

EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INFEASIBLE = 4


class NetReduceError(Exception):
    """Base class for all package errors."""

    exit_code = EXIT_DATA

    def __init__(self, message: str):
        super().__init__(message)
        self.stage: str | None = None

    @property
    def code(self) -> str:
        return type(self).__name__


# --- configuration errors (exit 2) ---------------------------------------

class ConfigError(NetReduceError):
    exit_code = EXIT_CONFIG


class UnknownStrategy(NetReduceError):
    exit_code = EXIT_CONFIG


class DuplicateStrategyName(NetReduceError):
    exit_code = EXIT_CONFIG


class UnknownTransform(NetReduceError):
    exit_code = EXIT_CONFIG


# --- data / model errors (exit 3) -----------------------------------------

class DuplicateNodeId(NetReduceError):
    pass


class DuplicateEdgeId(NetReduceError):
    pass


class EdgeEndpointMissing(NetReduceError):
    def __init__(self, edge_id: str, node_id: str):
        super().__init__(f"edge '{edge_id}' references missing node '{node_id}'")
        self.edge_id = edge_id
        self.node_id = node_id


class SelfLoop(NetReduceError):
    pass


class NonPositiveReactance(NetReduceError):
    pass


class InvalidCoordinate(NetReduceError):
    pass


class InvalidProperty(NetReduceError):
    pass


class UnknownNodeId(NetReduceError):
    pass


class UnknownEdgeId(NetReduceError):
    pass


class UnknownProperty(NetReduceError):
    pass


class FileNotFound(NetReduceError):
    pass


class MissingColumn(NetReduceError):
    pass


class IoError(NetReduceError):
    pass


class DomainMismatch(NetReduceError):
    pass


class MissingCoordinates(NetReduceError):
    pass


class SingularSystem(NetReduceError):
    pass


class NotAnIsland(NetReduceError):
    pass


class PartitionDomainMismatch(NetReduceError):
    pass


class StrategyContractViolation(NetReduceError):
    pass


class ReducerTypeMismatch(NetReduceError):
    pass


class NonPositiveForParallel(NetReduceError):
    pass


# --- infeasible strategy (exit 4) ------------------------------------------

class InvalidK(NetReduceError):
    exit_code = EXIT_INFEASIBLE


class InfeasibleClusterCount(NetReduceError):
    exit_code = EXIT_INFEASIBLE
