"""Scikit-learn style estimators wrapping the partition/aggregate pipeline.

``NetworkPartitioner`` is cluster-shaped (``fit`` / ``fit_predict`` over a
Network), ``NetworkReducer`` is transformer-shaped (``fit`` partitions,
``transform`` aggregates), so both compose with the wider ecosystem:
``get_params`` / ``set_params`` / ``clone`` work as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from .aggregate import DomainTransform, aggregate
from .distance import DistanceFamily
from .errors import MissingCoordinates, PartitionDomainMismatch
from .network import Network
from .partition import PartitionResult, StrategySpec, partition
from .preprocess import consolidate_parallel_edges


def check_network(X, require_coords: bool = False) -> Network:
    """Validate estimator input: a Network, optionally fully geo-referenced."""
    if not isinstance(X, Network):
        raise TypeError(f"expected a netreduce Network, got {type(X).__name__}")
    if require_coords:
        for node in X.nodes:
            if node.coords is None:
                raise MissingCoordinates(f"node '{node.id}' has no coordinates")
    return X


def _check_fitted(estimator, attribute: str) -> None:
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"this {type(estimator).__name__} instance is not fitted yet; call 'fit' first"
        )


class NetworkPartitioner(ClusterMixin, BaseEstimator):
    """Cluster the nodes of a Network.

    Parameters mirror the strategy spec: ``algorithm`` is a registry key
    ("kmeans", "kmedoids", "dbscan", "agglomerative-single" ... or a
    user-registered name), ``family`` selects geographical or electrical
    distance, and the awareness flags constrain clusters to voltage levels
    and AC islands.

    Attributes after ``fit``: ``result_`` (the full PartitionResult),
    ``labels_`` (cluster ids in network node order), ``n_clusters_``.
    """

    def __init__(
        self,
        algorithm: str = "kmeans",
        family: str = "geographical",
        n_clusters: int | None = None,
        eps: float | None = None,
        min_pts: int | None = None,
        voltage_aware: bool = False,
        island_aware: bool | None = None,
        seed: int = 0,
        max_iter: int = 300,
    ):
        self.algorithm = algorithm
        self.family = family
        self.n_clusters = n_clusters
        self.eps = eps
        self.min_pts = min_pts
        self.voltage_aware = voltage_aware
        self.island_aware = island_aware
        self.seed = seed
        self.max_iter = max_iter

    def _spec(self) -> StrategySpec:
        return StrategySpec(
            algorithm=self.algorithm,
            family=DistanceFamily(self.family),
            voltage_aware=self.voltage_aware,
            island_aware=self.island_aware,
            k=self.n_clusters,
            eps=self.eps,
            min_pts=self.min_pts,
            seed=self.seed,
            max_iter=self.max_iter,
        )

    def fit(self, X, y=None):
        net = check_network(X)
        self.result_: PartitionResult = partition(net, self._spec())
        self.labels_ = np.asarray([self.result_.assignment[n] for n in net.node_ids])
        self.n_clusters_ = self.result_.cluster_count
        return self


class NetworkReducer(TransformerMixin, BaseEstimator):
    """Partition on ``fit``, aggregate on ``transform``.

    ``fit_transform(net)`` is the one-call spatial reduction; ``fit`` on a
    network followed by ``transform`` on the same network keeps the two
    stages swappable (the partition can be reused across profiles).
    """

    def __init__(
        self,
        algorithm: str = "kmeans",
        family: str = "geographical",
        n_clusters: int | None = None,
        eps: float | None = None,
        min_pts: int | None = None,
        voltage_aware: bool = False,
        island_aware: bool | None = None,
        seed: int = 0,
        max_iter: int = 300,
        profile: str = "generic",
        transforms: tuple[DomainTransform, ...] = (),
        consolidate_parallel: bool = False,
    ):
        self.algorithm = algorithm
        self.family = family
        self.n_clusters = n_clusters
        self.eps = eps
        self.min_pts = min_pts
        self.voltage_aware = voltage_aware
        self.island_aware = island_aware
        self.seed = seed
        self.max_iter = max_iter
        self.profile = profile
        self.transforms = transforms
        self.consolidate_parallel = consolidate_parallel

    def _prepare(self, X) -> Network:
        net = check_network(X)
        if self.consolidate_parallel:
            net = consolidate_parallel_edges(net)
        return net

    def fit(self, X, y=None):
        net = self._prepare(X)
        partitioner = NetworkPartitioner(
            algorithm=self.algorithm,
            family=self.family,
            n_clusters=self.n_clusters,
            eps=self.eps,
            min_pts=self.min_pts,
            voltage_aware=self.voltage_aware,
            island_aware=self.island_aware,
            seed=self.seed,
            max_iter=self.max_iter,
        )
        self.partition_result_ = partitioner.fit(net).result_
        self.labels_ = partitioner.labels_
        return self

    def transform(self, X) -> Network:
        _check_fitted(self, "partition_result_")
        net = self._prepare(X)
        assignment = self.partition_result_.assignment
        if set(net.node_ids) != set(assignment):
            raise PartitionDomainMismatch(
                "transform input does not match the network this reducer was fitted on"
            )
        reduced, membership = aggregate(
            net, self.partition_result_, self.profile, list(self.transforms)
        )
        self.membership_ = membership
        return reduced
