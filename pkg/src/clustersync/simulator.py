"""Fixed-step RK4 integration of the Kuramoto dynamics and cluster metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NonFiniteState
from .model import NetworkSpec, Partition


def kuramoto_rhs(theta, net: NetworkSpec) -> np.ndarray:
    """``omega_i + sum_j a_ij sin(theta_j - theta_i)`` for every oscillator."""
    theta = np.asarray(theta, dtype=float)
    diff = theta[None, :] - theta[:, None]
    return net.omega + np.sum(net.weights * np.sin(diff), axis=1)


def cluster_step_phases(partition: Partition, step: float = 1.0) -> np.ndarray:
    """Initial phases equal to ``step * cluster index``, a point of the sync subspace."""
    return step * partition.membership.astype(float)


@dataclass(frozen=True)
class SimConfig:
    theta0: np.ndarray
    t_final: float = 20.0
    dt: float = 1e-3
    sample_every: int = 1

    def __post_init__(self):
        theta0 = np.array(self.theta0, dtype=float).reshape(-1)
        theta0.setflags(write=False)
        object.__setattr__(self, "theta0", theta0)
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not (math.isfinite(self.t_final) and self.t_final >= self.dt):
            raise ConfigError(f"t_final must be >= dt, got {self.t_final}")
        if int(self.sample_every) != self.sample_every or self.sample_every < 1:
            raise ConfigError(f"sample_every must be a positive integer, got {self.sample_every}")
        if not np.all(np.isfinite(theta0)):
            raise ConfigError("theta0 contains non-finite entries")

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.t_final / self.dt - 1e-9))


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution. Phases are unwrapped; ``freqs`` is the right-hand
    side evaluated at each stored state."""

    times: np.ndarray
    thetas: np.ndarray
    freqs: np.ndarray

    @property
    def n_samples(self) -> int:
        return len(self.times)


def _rk4_step(theta, h, net):
    k1 = kuramoto_rhs(theta, net)
    k2 = kuramoto_rhs(theta + 0.5 * h * k1, net)
    k3 = kuramoto_rhs(theta + 0.5 * h * k2, net)
    k4 = kuramoto_rhs(theta + h * k3, net)
    return theta + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(net: NetworkSpec, cfg: SimConfig) -> Trajectory:
    """Classical fourth-order Runge-Kutta with fixed step ``cfg.dt``.

    The last step is shortened when ``t_final`` is not a multiple of ``dt``.
    Samples are kept every ``sample_every`` steps, always including t = 0
    and the final time.
    """
    if cfg.theta0.shape[0] != net.n:
        raise ConfigError(f"theta0 has length {cfg.theta0.shape[0]}, network has {net.n} nodes")
    n_steps = cfg.n_steps
    keep = list(range(0, n_steps + 1, cfg.sample_every))
    if keep[-1] != n_steps:
        keep.append(n_steps)

    times = np.empty(len(keep))
    thetas = np.empty((len(keep), net.n))
    theta = cfg.theta0.copy()
    t = 0.0
    slot = 0
    for k in range(n_steps + 1):
        if k == keep[slot]:
            times[slot] = t
            thetas[slot] = theta
            slot += 1
        if k == n_steps:
            break
        t_next = cfg.t_final if k + 1 == n_steps else (k + 1) * cfg.dt
        with np.errstate(over="ignore", invalid="ignore"):
            theta = _rk4_step(theta, t_next - t, net)
        if not np.all(np.isfinite(theta)):
            raise NonFiniteState(t)
        t = t_next

    freqs = np.array([kuramoto_rhs(th, net) for th in thetas])
    return Trajectory(times, thetas, freqs)


def wrap_angle(x):
    """Map angles to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2.0 * np.pi)


def _pairwise_spread(values, partition, wrap):
    out = np.zeros((values.shape[0], partition.m))
    for k, members in enumerate(partition.clusters):
        if len(members) < 2:
            continue
        sub = values[:, list(members)]
        d = sub[:, :, None] - sub[:, None, :]
        if wrap:
            d = wrap_angle(d)
        out[:, k] = np.max(np.abs(d), axis=(1, 2))
    return out


def phase_spread(traj: Trajectory, partition: Partition) -> np.ndarray:
    """samples x m: largest wrapped phase difference inside each cluster."""
    return _pairwise_spread(np.asarray(traj.thetas), partition, wrap=True)


def frequency_spread(traj: Trajectory, partition: Partition) -> np.ndarray:
    return _pairwise_spread(np.asarray(traj.freqs), partition, wrap=False)


def cluster_order_parameter(traj: Trajectory, partition: Partition) -> np.ndarray:
    """samples x m: modulus of the mean unit phasor of each cluster."""
    z = np.exp(1j * np.asarray(traj.thetas))
    return np.column_stack([np.abs(z[:, list(c)].mean(axis=1)) for c in partition.clusters])
