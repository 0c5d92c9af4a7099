"""Networks, partitions and the matrices built from them.

Conventions: ``weights[i, j]`` is the coupling from oscillator ``j`` onto
oscillator ``i`` (row = target), so row ``i`` collects every influence on
oscillator ``i``. Node labels are 0-based and clusters may use any labels;
the adjacency matrix is never permuted into block order.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import DimensionError, InvalidPartition


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class NetworkSpec:
    """Directed weighted Kuramoto network.

    Self-loops are dropped on construction: they contribute ``sin(0) = 0``
    to the dynamics.
    """

    weights: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        a = np.array(self.weights, dtype=float)
        w = np.array(self.omega, dtype=float).reshape(-1)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"weights must be square, got shape {a.shape}")
        if a.shape[0] < 2:
            raise DimensionError("a network needs at least 2 nodes")
        if w.shape[0] != a.shape[0]:
            raise DimensionError(
                f"omega has length {w.shape[0]}, expected {a.shape[0]}"
            )
        if not np.all(np.isfinite(a)):
            raise ValueError("weights contain non-finite entries")
        if not np.all(np.isfinite(w)):
            raise ValueError("omega contains non-finite entries")
        np.fill_diagonal(a, 0.0)
        object.__setattr__(self, "weights", _frozen(a))
        object.__setattr__(self, "omega", _frozen(w))

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def is_strongly_connected(self) -> bool:
        ncomp, _ = connected_components(
            self.weights != 0, directed=True, connection="strong"
        )
        return ncomp == 1

    def with_weights(self, weights) -> "NetworkSpec":
        return NetworkSpec(weights, self.omega)

    def with_omega(self, omega) -> "NetworkSpec":
        return NetworkSpec(self.weights, omega)


def warn_if_not_strongly_connected(net: NetworkSpec) -> bool:
    """Emit a warning when the coupling graph is not strongly connected.

    None of the checks need strong connectivity, so this never rejects.
    """
    ok = net.is_strongly_connected()
    if not ok:
        warnings.warn("coupling graph is not strongly connected", stacklevel=2)
    return ok


@dataclass(frozen=True)
class Partition:
    """Disjoint cover of ``{0, ..., n-1}`` by ``m >= 2`` non-empty clusters.

    Members of each cluster are stored sorted; cluster order is kept as given.
    """

    clusters: tuple
    n: int
    membership: np.ndarray = field(init=False, repr=False, compare=False)

    def __init__(self, clusters: Sequence[Sequence[int]], n: int | None = None):
        try:
            cl = tuple(tuple(sorted(int(i) for i in c)) for c in clusters)
        except (TypeError, ValueError) as exc:
            raise InvalidPartition(f"clusters must be lists of integers: {exc}")
        total = sum(len(c) for c in cl)
        if n is None:
            n = total
        n = int(n)
        if len(cl) < 2:
            raise InvalidPartition(f"need at least 2 clusters, got {len(cl)}")
        if any(len(c) == 0 for c in cl):
            raise InvalidPartition("empty cluster")
        membership = np.full(n, -1, dtype=int)
        for k, c in enumerate(cl):
            for i in c:
                if not 0 <= i < n:
                    raise InvalidPartition(f"node {i} outside 0..{n - 1}")
                if membership[i] >= 0:
                    raise InvalidPartition(
                        f"node {i} appears in clusters {membership[i]} and {k}"
                    )
                membership[i] = k
        missing = np.flatnonzero(membership < 0)
        if missing.size:
            raise InvalidPartition(f"nodes not covered: {missing.tolist()}")
        membership.setflags(write=False)
        object.__setattr__(self, "clusters", cl)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "membership", membership)

    @classmethod
    def from_membership(cls, membership: Sequence[int]) -> "Partition":
        membership = np.asarray(membership, dtype=int)
        m = int(membership.max()) + 1 if membership.size else 0
        return cls([np.flatnonzero(membership == k) for k in range(m)], len(membership))

    @property
    def m(self) -> int:
        return len(self.clusters)

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.clusters]

    def same_cluster_mask(self) -> np.ndarray:
        """Boolean n x n mask, True where both nodes share a cluster."""
        return self.membership[:, None] == self.membership[None, :]


def build_characteristic_matrix(partition: Partition, n: int | None = None) -> np.ndarray:
    """Binary n x m indicator matrix; column k marks the members of cluster k."""
    n = partition.n if n is None else n
    if n != partition.n:
        raise InvalidPartition(f"partition covers {partition.n} nodes, not {n}")
    v = np.zeros((n, partition.m))
    v[np.arange(n), partition.membership] = 1.0
    return v


def build_orthonormal_complement(partition: Partition, n: int | None = None) -> np.ndarray:
    """Orthonormal basis of the complement of the cluster-constant vectors.

    Each cluster of size ``s`` contributes ``s - 1`` Helmert difference
    vectors: the k-th has ``1/sqrt(k(k+1))`` on the first ``k`` members and
    ``-k/sqrt(k(k+1))`` on member ``k+1``. Columns are ordered by cluster,
    then by ``k``.
    """
    n = partition.n if n is None else n
    if n != partition.n:
        raise InvalidPartition(f"partition covers {partition.n} nodes, not {n}")
    cols = []
    for members in partition.clusters:
        for k in range(1, len(members)):
            col = np.zeros(n)
            c = 1.0 / np.sqrt(k * (k + 1))
            col[list(members[:k])] = c
            col[members[k]] = -k * c
            cols.append(col)
    if not cols:
        return np.zeros((n, 0))
    return np.column_stack(cols)


@dataclass(frozen=True)
class CharacteristicBasis:
    """Binary characteristic matrix plus the orthonormal pair used for algebra.

    ``v_bin`` is the 0/1 indicator matrix, ``v_norm`` its column-normalized
    version and ``v_comp`` an orthonormal basis of the orthogonal complement
    of its image, so ``[v_norm v_comp]`` is an orthogonal matrix.
    """

    v_bin: np.ndarray
    v_norm: np.ndarray
    v_comp: np.ndarray

    @classmethod
    def from_partition(cls, partition: Partition) -> "CharacteristicBasis":
        v_bin = build_characteristic_matrix(partition)
        v_norm = v_bin / np.sqrt(v_bin.sum(axis=0))
        v_comp = build_orthonormal_complement(partition)
        return cls(_frozen(v_bin), _frozen(v_norm), _frozen(v_comp))

    @property
    def n(self) -> int:
        return self.v_bin.shape[0]

    @property
    def m(self) -> int:
        return self.v_bin.shape[1]

    def intra_mask(self) -> np.ndarray:
        """Exact 0/1 mask of intra-cluster entries (``v_bin v_bin^T``)."""
        return self.v_bin @ self.v_bin.T

    def transform(self) -> np.ndarray:
        return np.hstack([self.v_norm, self.v_comp])


@dataclass(frozen=True)
class InterClusterMatrix:
    """Adjacency matrix with every intra-cluster entry set to zero."""

    a_bar: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a_bar", _frozen(self.a_bar))

    @property
    def n(self) -> int:
        return self.a_bar.shape[0]


def build_inter_cluster_matrix(net: NetworkSpec, basis: CharacteristicBasis) -> InterClusterMatrix:
    if net.n != basis.n:
        raise DimensionError(f"network has {net.n} nodes, partition has {basis.n}")
    a = net.weights
    return InterClusterMatrix(a - a * basis.intra_mask())
