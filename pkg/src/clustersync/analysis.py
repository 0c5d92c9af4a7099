"""Synchronizability checks for a partition of a Kuramoto network."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import TYPE_CHECKING

import numpy as np

from .errors import InternalInconsistency
from .model import (
    CharacteristicBasis,
    InterClusterMatrix,
    NetworkSpec,
    Partition,
    build_inter_cluster_matrix,
)

if TYPE_CHECKING:
    from .simulator import Trajectory

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class WeightViolation:
    """Unequal incoming weight from cluster ``cluster_pair[0]`` onto two
    nodes of cluster ``cluster_pair[1]``.

    ``gap`` is (sum over the source cluster of row ``i``) minus (same for
    row ``j``), with ``node_pair = (i, j)``.
    """

    cluster_pair: tuple[int, int]
    node_pair: tuple[int, int]
    gap: float

    def to_dict(self) -> dict:
        return {
            "cluster_pair": list(self.cluster_pair),
            "node_pair": list(self.node_pair),
            "gap": self.gap,
        }


@dataclass(frozen=True)
class FrequencyViolation:
    cluster: int
    node_pair: tuple[int, int]
    gap: float

    def to_dict(self) -> dict:
        return {"cluster": self.cluster, "node_pair": list(self.node_pair), "gap": self.gap}


@dataclass(frozen=True)
class SyncVerdict:
    weight_condition_ok: bool
    frequency_condition_ok: bool
    violations: list = field(default_factory=list)
    frequency_violations: list = field(default_factory=list)
    matrix_residual: float = 0.0

    @property
    def synchronizable(self) -> bool:
        return self.weight_condition_ok and self.frequency_condition_ok

    def to_dict(self) -> dict:
        return {
            "synchronizable": self.synchronizable,
            "weight_condition_ok": self.weight_condition_ok,
            "frequency_condition_ok": self.frequency_condition_ok,
            "matrix_residual": self.matrix_residual,
            "violations": [v.to_dict() for v in self.violations],
            "frequency_violations": [v.to_dict() for v in self.frequency_violations],
        }


def inter_cluster_row_sums(weights, partition: Partition) -> np.ndarray:
    """n x m matrix: entry (i, z) is the total weight node i receives from cluster z.

    Entries with ``z`` equal to the cluster of ``i`` are set to zero.
    """
    a = np.asarray(weights, dtype=float)
    v_bin = np.zeros((partition.n, partition.m))
    v_bin[np.arange(partition.n), partition.membership] = 1.0
    sums = a @ v_bin
    sums[np.arange(partition.n), partition.membership] = 0.0
    return sums


def row_sum_gap(weights, partition: Partition, source: int, i: int, j: int) -> float:
    a = np.asarray(weights, dtype=float)
    cols = list(partition.clusters[source])
    return float(a[i, cols].sum() - a[j, cols].sum())


def _inter_scale(weights, partition: Partition) -> float:
    a = np.asarray(weights, dtype=float)
    inter = ~partition.same_cluster_mask()
    return float(np.max(np.abs(a[inter]), initial=0.0))


def check_weight_condition(net: NetworkSpec, partition: Partition, tol: float = DEFAULT_TOL):
    """Pairwise test of equal inter-cluster row sums.

    Returns ``(ok, violations)``. Each unordered node pair ``i < j`` inside a
    target cluster is reported once per source cluster whose row sums differ
    by more than ``tol * (1 + max |inter-cluster weight|)``.
    """
    sums = inter_cluster_row_sums(net.weights, partition)
    thresh = tol * (1.0 + _inter_scale(net.weights, partition))
    violations = []
    for target, members in enumerate(partition.clusters):
        for source in range(partition.m):
            if source == target:
                continue
            for i, j in combinations(members, 2):
                gap = float(sums[i, source] - sums[j, source])
                if abs(gap) > thresh:
                    violations.append(WeightViolation((source, target), (i, j), gap))
    return not violations, violations


def check_frequency_condition(net: NetworkSpec, partition: Partition, tol: float = DEFAULT_TOL):
    """Natural frequencies must agree within each cluster.

    One violation per cluster, naming the pair attaining the largest gap.
    """
    w = net.omega
    thresh = tol * (1.0 + float(np.max(np.abs(w))))
    violations = []
    for k, members in enumerate(partition.clusters):
        members = np.asarray(members)
        hi = int(members[np.argmax(w[members])])
        lo = int(members[np.argmin(w[members])])
        gap = float(w[hi] - w[lo])
        if gap > thresh:
            violations.append(FrequencyViolation(k, (min(hi, lo), max(hi, lo)), gap))
    return not violations, violations


def invariance_residual(a_bar: InterClusterMatrix, basis: CharacteristicBasis) -> np.ndarray:
    """The block ``v_comp^T a_bar v_norm`` that must vanish."""
    if a_bar.n != basis.n:
        raise ValueError(f"dimension mismatch: {a_bar.n} vs {basis.n}")
    return basis.v_comp.T @ a_bar.a_bar @ basis.v_norm


def check_invariance_matrix(a_bar: InterClusterMatrix, basis: CharacteristicBasis,
                            tol: float = DEFAULT_TOL):
    block = invariance_residual(a_bar, basis)
    residual = float(np.max(np.abs(block), initial=0.0))
    scale = float(np.max(np.abs(a_bar.a_bar), initial=0.0))
    return residual <= tol * (1.0 + scale), residual


def classify(net: NetworkSpec, partition: Partition, tol: float = DEFAULT_TOL) -> SyncVerdict:
    """Run the pairwise and matrix tests and bundle the outcome.

    The two weight tests are equivalent; a disagreement well outside the
    tolerance band raises :class:`InternalInconsistency`.
    """
    basis = CharacteristicBasis.from_partition(partition)
    a_bar = build_inter_cluster_matrix(net, basis)
    w_ok, violations = check_weight_condition(net, partition, tol)
    m_ok, residual = check_invariance_matrix(a_bar, basis, tol)
    if w_ok != m_ok:
        # each residual entry is bounded by the largest pairwise gap, and
        # each gap by sqrt(2 n) times the residual block norm
        thresh = tol * (1.0 + _inter_scale(net.weights, partition))
        max_gap = max((abs(v.gap) for v in violations), default=0.0)
        slack = 2.0 * net.n
        if max_gap > slack * thresh or residual > slack * thresh:
            raise InternalInconsistency(
                f"pairwise test says {w_ok}, matrix test says {m_ok} "
                f"(max gap {max_gap:.3e}, residual {residual:.3e})"
            )
    f_ok, f_violations = check_frequency_condition(net, partition, tol)
    return SyncVerdict(w_ok, f_ok, violations, f_violations, residual)


@dataclass(frozen=True)
class OrderingInterval:
    """Run of samples ``start..stop`` (inclusive) with a fixed strict order
    of per-cluster maximal frequencies. ``order[0]`` is the fastest cluster.
    """

    start: int
    stop: int
    t_start: float
    t_stop: float
    order: tuple


def check_assumption_a1(traj: "Trajectory", partition: Partition, tol: float = DEFAULT_TOL):
    """Find sample runs on which the clusters' maximal frequencies are strictly ordered.

    At each sample the per-cluster maxima of the instantaneous frequencies
    must be pairwise separated by more than ``tol * (1 + max |freq|)``;
    runs of at least two consecutive samples sharing one ordering are
    returned. An empty list means the ordering was never observed.
    Purely diagnostic.
    """
    freqs = np.asarray(traj.freqs)
    if freqs.shape[0] < 2:
        return []
    maxima = np.column_stack([freqs[:, list(c)].max(axis=1) for c in partition.clusters])
    scale = tol * (1.0 + np.max(np.abs(freqs), axis=1))
    order = np.argsort(-maxima, axis=1, kind="stable")
    ranked = np.take_along_axis(maxima, order, axis=1)
    strict = np.all(np.diff(ranked, axis=1) < -scale[:, None], axis=1)

    intervals = []
    start = None
    for k in range(freqs.shape[0] + 1):
        same = (
            k < freqs.shape[0]
            and strict[k]
            and start is not None
            and np.array_equal(order[k], order[start])
        )
        if same:
            continue
        if start is not None and k - 1 > start:
            intervals.append(OrderingInterval(
                start, k - 1, float(traj.times[start]), float(traj.times[k - 1]),
                tuple(int(c) for c in order[start]),
            ))
        start = k if k < freqs.shape[0] and strict[k] else None
    return intervals
