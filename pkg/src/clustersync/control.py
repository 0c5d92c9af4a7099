"""Minimum-Frobenius-norm weight perturbations that make a partition synchronizable.

The constraint is ``v_comp^T (a_bar + delta) v_norm = 0`` with ``delta``
confined to a sparsity mask. Stationarity of the Lagrangian forces
``delta = -(v_comp @ lam @ v_norm.T) * mask`` for a multiplier matrix
``lam``; substituting into the constraint gives a square linear system in
``lam`` that is solved in the least-squares sense.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .analysis import DEFAULT_TOL
from .errors import (
    DimensionError,
    Infeasible,
    InfeasibleResult,
    InternalInconsistency,
    VerificationFailed,
)
from .model import (
    CharacteristicBasis,
    InterClusterMatrix,
    NetworkSpec,
    build_inter_cluster_matrix,
)


@dataclass(frozen=True)
class SparsityMask:
    """Binary matrix: 1 where the perturbation may be nonzero."""

    h: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise DimensionError(f"mask must be square, got shape {h.shape}")
        if not np.all((h == 0) | (h == 1)):
            raise ValueError("mask entries must be 0 or 1")
        h = h.copy()
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @classmethod
    def full(cls, n: int) -> "SparsityMask":
        return cls(np.ones((n, n)))

    def effective(self, basis: CharacteristicBasis) -> np.ndarray:
        """Mask with the diagonal and all intra-cluster entries cleared."""
        if self.h.shape[0] != basis.n:
            raise DimensionError(f"mask is {self.h.shape[0]}x{self.h.shape[0]}, network has {basis.n} nodes")
        return self.h * (1.0 - basis.intra_mask())


@dataclass(frozen=True)
class PerturbationResult:
    delta: np.ndarray
    multipliers: np.ndarray
    constraint_residual: float
    kkt_residual: float
    feasible: bool
    mask: np.ndarray = field(repr=False)

    @property
    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.delta))

    def changed_edges(self, weights) -> list:
        a = np.asarray(weights)
        rows, cols = np.nonzero(self.delta)
        return [
            [int(i), int(j), float(a[i, j]), float(a[i, j] + self.delta[i, j])]
            for i, j in zip(rows, cols)
        ]

    def report(self, weights=None) -> dict:
        out = {
            "frobenius_norm": self.frobenius_norm,
            "constraint_residual": self.constraint_residual,
            "kkt_residual": self.kkt_residual,
            "feasible": self.feasible,
        }
        if weights is not None:
            out["changed_edges"] = self.changed_edges(weights)
        return out


def _check_dims(a_bar: InterClusterMatrix, basis: CharacteristicBasis):
    if a_bar.n != basis.n:
        raise DimensionError(f"a_bar is {a_bar.n}x{a_bar.n}, basis has {basis.n} nodes")


def _constraint_residual(a_bar, delta, basis) -> float:
    block = basis.v_comp.T @ (a_bar + delta) @ basis.v_norm
    return float(np.max(np.abs(block), initial=0.0))


def _drop_roundoff(delta, a_bar):
    """Zero entries at rounding level so feasible inputs come back untouched."""
    cutoff = 64 * np.finfo(float).eps * (1.0 + float(np.max(np.abs(a_bar), initial=0.0)))
    return np.where(np.abs(delta) > cutoff, delta, 0.0)


def solve_unconstrained(a_bar: InterClusterMatrix, basis: CharacteristicBasis) -> PerturbationResult:
    """Closed form for the unrestricted mask: minus the projection of ``a_bar``
    onto (complement rows) x (cluster-constant columns)."""
    _check_dims(a_bar, basis)
    vc, vn = basis.v_comp, basis.v_norm
    lam = vc.T @ a_bar.a_bar @ vn
    h_eff = 1.0 - basis.intra_mask()
    # the closed form vanishes on intra-cluster entries; clear rounding there
    delta = _drop_roundoff(np.where(h_eff > 0, -(vc @ lam @ vn.T), 0.0), a_bar.a_bar)
    return PerturbationResult(
        delta=delta,
        multipliers=lam,
        constraint_residual=_constraint_residual(a_bar.a_bar, delta, basis),
        kkt_residual=0.0,
        feasible=True,
        mask=h_eff,
    )


def constraint_operator(basis: CharacteristicBasis, h_eff: np.ndarray) -> np.ndarray:
    """Dense matrix of ``lam -> v_comp^T ((v_comp lam v_norm^T) * h_eff) v_norm``.

    Unknowns and equations are both ``(n - m) x m`` matrices flattened in
    row-major order; column ``p`` is the image of the ``p``-th unit matrix.
    """
    vc, vn = basis.v_comp, basis.v_norm
    r, m = vc.shape[1], vn.shape[1]
    op = np.empty((r * m, r * m))
    for p in range(r * m):
        a, b = divmod(p, m)
        x = np.outer(vc[:, a], vn[:, b]) * h_eff
        op[:, p] = (vc.T @ x @ vn).ravel()
    return op


def _solve_multipliers(op, rhs, r, m):
    sol, *_ = np.linalg.lstsq(op, rhs.ravel(), rcond=None)
    resid = float(np.linalg.norm(op @ sol - rhs.ravel()))
    return sol.reshape(r, m), resid


def solve_constrained(a_bar: InterClusterMatrix, basis: CharacteristicBasis,
                      mask: SparsityMask, tol: float = DEFAULT_TOL) -> PerturbationResult:
    """Smallest perturbation inside ``mask`` that satisfies the invariance constraint.

    Raises :class:`Infeasible` when the least-squares residual of the
    multiplier system exceeds ``tol * (1 + ||target block||_F)``.
    """
    _check_dims(a_bar, basis)
    h_eff = mask.effective(basis)
    vc, vn = basis.v_comp, basis.v_norm
    r, m = vc.shape[1], vn.shape[1]
    a21 = vc.T @ a_bar.a_bar @ vn

    op = constraint_operator(basis, h_eff)
    lam, resid = _solve_multipliers(op, a21, r, m)
    thresh = tol * (1.0 + float(np.linalg.norm(a21)))
    if resid > thresh:
        raise Infeasible(resid, thresh)

    x = (vc @ lam @ vn.T) * h_eff
    delta = _drop_roundoff(np.where(h_eff > 0, -x, 0.0), a_bar.a_bar)
    _check_block_form(delta, x, a21, basis, resid)
    return PerturbationResult(
        delta=delta,
        multipliers=lam,
        constraint_residual=_constraint_residual(a_bar.a_bar, delta, basis),
        kkt_residual=resid,
        feasible=True,
        mask=h_eff,
    )


def _check_block_form(delta, x, a21, basis, resid):
    """Reassemble delta from its four blocks in the orthogonal coordinates."""
    vc, vn = basis.v_comp, basis.v_norm
    t = basis.transform()
    blocks = np.block([
        [-vn.T @ x @ vn, -vn.T @ x @ vc],
        [-a21, -vc.T @ x @ vc],
    ])
    rebuilt = t @ blocks @ t.T
    scale = 1.0 + float(np.max(np.abs(delta), initial=0.0)) + float(np.max(np.abs(a21), initial=0.0))
    err = float(np.max(np.abs(rebuilt - delta), initial=0.0))
    if err > 10.0 * resid + 1e-10 * scale:
        raise InternalInconsistency(f"block reconstruction differs from -X by {err:.3e}")


def nullspace_direction(basis: CharacteristicBasis, h_eff: np.ndarray, raw: np.ndarray,
                        op: np.ndarray | None = None) -> np.ndarray:
    """Project a matrix onto mask-compliant perturbations that leave the
    constraint unchanged (``v_comp^T N v_norm = 0``)."""
    vc, vn = basis.v_comp, basis.v_norm
    r, m = vc.shape[1], vn.shape[1]
    if op is None:
        op = constraint_operator(basis, h_eff)
    raw = raw * h_eff
    lam, _ = _solve_multipliers(op, vc.T @ raw @ vn, r, m)
    return raw - (vc @ lam @ vn.T) * h_eff


@dataclass(frozen=True)
class VerificationReport:
    constraint_residual: float
    mask_violation: float
    worst_descent: float
    directions: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def verify_solution(net: NetworkSpec, result: PerturbationResult, basis: CharacteristicBasis,
                    mask: SparsityMask | None = None, tol: float = DEFAULT_TOL,
                    n_directions: int = 200, seed: int = 0) -> VerificationReport:
    """Re-check a solver result from scratch.

    Checks, in order: ``constraint`` (residual against the original
    network), ``mask`` (no mass outside the effective mask) and
    ``optimality`` (no feasible random direction decreases the norm).
    """
    a_bar = build_inter_cluster_matrix(net, basis).a_bar
    h_eff = mask.effective(basis) if mask is not None else np.asarray(result.mask)
    delta = np.asarray(result.delta)

    resid = _constraint_residual(a_bar, delta, basis)
    if resid > tol * (1.0 + float(np.max(np.abs(a_bar), initial=0.0))):
        raise VerificationFailed("constraint", f"residual {resid:.3e}")

    outside = float(np.max(np.abs(delta * (1.0 - h_eff)), initial=0.0))
    if outside != 0.0:
        raise VerificationFailed("mask", f"max entry outside mask {outside:.3e}")

    rng = np.random.default_rng(seed)
    op = constraint_operator(basis, h_eff)
    base = float(np.linalg.norm(delta))
    step = 1e-3 * max(1.0, base)
    worst = 0.0
    for _ in range(n_directions):
        d = nullspace_direction(basis, h_eff, rng.standard_normal(delta.shape), op)
        norm = np.linalg.norm(d)
        if norm < 1e-12:
            continue
        d /= norm
        for eps in (step, -step):
            drop = base - float(np.linalg.norm(delta + eps * d))
            worst = max(worst, drop)
            if drop > 1e-12:
                raise VerificationFailed("optimality", f"norm decreased by {drop:.3e}")
    return VerificationReport(resid, outside, worst, n_directions)


def apply_perturbation(net: NetworkSpec, result: PerturbationResult,
                       warn_sign_flips: bool = True) -> NetworkSpec:
    """Return the network with weights ``A + delta``; natural frequencies unchanged."""
    if not result.feasible:
        raise InfeasibleResult("cannot apply an infeasible perturbation")
    a = net.weights
    new = a + result.delta
    if warn_sign_flips:
        flipped = np.argwhere((a * new < 0))
        created = np.argwhere((a == 0) & (new != 0))
        for i, j in flipped:
            warnings.warn(f"edge ({i}, {j}) changes sign: {a[i, j]:g} -> {new[i, j]:g}", stacklevel=2)
        if len(created):
            edges = ", ".join(f"({i}, {j})" for i, j in created)
            warnings.warn(f"perturbation creates new edges: {edges}", stacklevel=2)
    return net.with_weights(new)
