"""Seeded random instances and independent reference solvers for the tests."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from clustersync.analysis import check_weight_condition
from clustersync.model import NetworkSpec, Partition


@dataclass
class Instance:
    weights: np.ndarray
    partition: Partition
    mask: np.ndarray
    seed: int


def random_partition(rng, n, m) -> Partition:
    """Random cover with non-contiguous labels; every cluster non-empty."""
    labels = np.concatenate([np.arange(m), rng.integers(0, m, size=n - m)])
    rng.shuffle(labels)
    return Partition.from_membership(labels)


def random_weights(rng, n, density=0.6, low=-5.0, high=5.0):
    a = rng.uniform(low, high, size=(n, n)) * (rng.random((n, n)) < density)
    np.fill_diagonal(a, 0.0)
    return a


def inter_density(mask, partition):
    inter = ~partition.same_cluster_mask()
    return mask[inter].mean()


def random_instance(seed, n_range=(4, 12), m_range=(2, 4), min_density=0.4) -> Instance:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    m = int(rng.integers(m_range[0], min(m_range[1], n - 1) + 1))
    partition = random_partition(rng, n, m)
    a = random_weights(rng, n)
    while True:
        p = rng.uniform(min_density, 1.0)
        mask = (rng.random((n, n)) < p).astype(float)
        if inter_density(mask, partition) >= min_density:
            break
    return Instance(a, partition, mask, seed)


def equalize_row_sums(rng, a, partition):
    """Adjust one inter-cluster entry per (row, source cluster) block so that
    every node of a cluster receives the same total from each other cluster."""
    a = a.copy()
    for target, members in enumerate(partition.clusters):
        for source, cols in enumerate(partition.clusters):
            if source == target:
                continue
            cols = list(cols)
            goal = rng.uniform(-5, 5)
            for i in members:
                k = cols[rng.integers(len(cols))]
                a[i, k] += goal - a[i, cols].sum()
    return a


def random_network_partition(seed, n_range=(2, 15), m_range=(2, 4)):
    """Half of the seeds satisfy the equal-row-sum condition by construction."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(max(n_range[0], 2), n_range[1] + 1))
    m = int(rng.integers(m_range[0], min(m_range[1], n) + 1))
    partition = random_partition(rng, n, m)
    a = random_weights(rng, n, density=rng.uniform(0.2, 1.0))
    if seed % 2 == 0:
        a = equalize_row_sums(rng, a, partition)
    omega = rng.uniform(-10, 10, size=n)
    return NetworkSpec(a, omega), partition


def brute_force_perturbation(weights, membership, mask, tol=1e-9):
    """Minimum-norm inter-cluster perturbation via an explicit KKT system.

    Unknowns are the free entries (mask = 1, endpoints in different
    clusters). Constraints equate the row sums, over each source cluster,
    of consecutive members of every target cluster. Returns
    ``(feasible, delta)``.
    """
    a = np.asarray(weights, dtype=float)
    membership = np.asarray(membership)
    n = a.shape[0]
    m = membership.max() + 1
    free = [(i, j) for i in range(n) for j in range(n)
            if mask[i, j] and membership[i] != membership[j]]
    col = {e: p for p, e in enumerate(free)}

    rows, rhs = [], []
    for target in range(m):
        members = np.flatnonzero(membership == target)
        for source in range(m):
            if source == target:
                continue
            src = np.flatnonzero(membership == source)
            for r, s in zip(members[:-1], members[1:]):
                row = np.zeros(len(free))
                for k in src:
                    if (r, k) in col:
                        row[col[(r, k)]] += 1.0
                    if (s, k) in col:
                        row[col[(s, k)]] -= 1.0
                rows.append(row)
                rhs.append(-(a[r, src].sum() - a[s, src].sum()))
    c = np.array(rows).reshape(len(rows), len(free))
    d = np.array(rhs)

    f, q = len(free), len(rows)
    kkt = np.block([[2.0 * np.eye(f), c.T], [c, np.zeros((q, q))]])
    sol, *_ = np.linalg.lstsq(kkt, np.concatenate([np.zeros(f), d]), rcond=None)
    x = sol[:f]
    resid = np.linalg.norm(c @ x - d) if q else 0.0
    feasible = resid <= tol * (1.0 + np.linalg.norm(d))
    delta = np.zeros((n, n))
    for (i, j), p in col.items():
        delta[i, j] = x[p]
    return bool(feasible), delta


def violating_network(seed, min_gap=0.5, min_omega_gap=5.0):
    """Random network failing the row-sum test by at least ``min_gap``,
    with equal frequencies inside clusters and cluster frequencies at
    least ``min_omega_gap`` apart."""
    rng = np.random.default_rng(seed)
    while True:
        n = int(rng.integers(4, 11))
        m = int(rng.integers(2, 4))
        partition = random_partition(rng, n, m)
        a = random_weights(rng, n, density=rng.uniform(0.4, 0.9), low=-3.0, high=3.0)
        levels = rng.uniform(-10, 10) + min_omega_gap * np.arange(m) + rng.uniform(0, 3, m).cumsum()
        net = NetworkSpec(a, rng.permutation(levels)[partition.membership])
        ok, violations = check_weight_condition(net, partition)
        if not ok and max(abs(v.gap) for v in violations) >= min_gap:
            return net, partition
