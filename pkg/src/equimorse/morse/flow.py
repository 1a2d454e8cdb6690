"""Gradient flow trajectories on implicit manifolds.

Trajectories integrate x' = -P grad f (descending; +P for ascending) with a
projected RK4 step whose size adapts to the local gradient so the flow
marches at roughly constant arc length, and are captured when they come
within capture_tol of a known critical point.  The batch integrator steps
many trajectories in lockstep with vectorized evaluations; aggregation of
results never depends on trajectory order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .critical import CriticalPoint
from .manifolds import EqFunction, ImplicitGManifold

__all__ = [
    "CAPTURE_TOL",
    "Trajectory",
    "flow_trajectory",
    "integrate_batch",
]

CAPTURE_TOL = 1e-6

CAPTURED = 0
ESCAPED = 1
UNRESOLVED = 2


@dataclass(eq=False)
class Trajectory:
    """Outcome of one integrated trajectory."""

    start: np.ndarray
    end: np.ndarray
    status: int
    limit_index: int | None          # index into the critical list
    limit: CriticalPoint | None
    steps: int
    min_dists: np.ndarray            # per critical point, over the whole path
    points: np.ndarray | None = None

    @property
    def resolved(self) -> bool:
        return self.status == CAPTURED

    @property
    def escaped(self) -> bool:
        return self.status == ESCAPED


def _crit_array(crits) -> np.ndarray:
    return np.array([np.asarray(c.coords, dtype=float) for c in crits])


def integrate_batch(f: EqFunction, M: ImplicitGManifold, X0, *,
                    crits, direction: int = -1,
                    capture_tol: float = CAPTURE_TOL,
                    step_length: float = 0.01,
                    max_steps: int = 40000,
                    escape_radius: float = 50.0,
                    dt_cap: float = 0.5,
                    keep_paths: bool = False):
    """Integrate every row of X0; returns a list of Trajectory.

    direction -1 descends, +1 ascends.  A trajectory finishes by capture
    (within capture_tol of a critical point), escape (outside the escape
    radius), or budget exhaustion.  dt_cap bounds the step near critical
    points, where the speed-normalized step would leave RK4's stability
    region; convergence there is linear at rate ~ eigenvalue * dt_cap.
    """
    X = np.array(X0, dtype=float)
    m = len(X)
    C = _crit_array(crits) if crits else np.zeros((0, M.ambient))
    status = np.full(m, UNRESOLVED, dtype=int)
    limit = np.full(m, -1, dtype=int)
    steps_used = np.zeros(m, dtype=int)
    min_dists = np.full((m, len(C)), np.inf)
    active = np.ones(m, dtype=bool)
    paths = [[] for _ in range(m)] if keep_paths else None
    sgn = float(direction)
    # per-trajectory adaptive step bound; monotonicity violations halve it
    dt_state = np.full(m, dt_cap)

    def velocity(pts):
        V = sgn * f.grad_many(pts)
        return M.project_tangent_many(pts, V)

    def rk4(P, dt):
        K1 = velocity(P)
        K2 = velocity(P + 0.5 * dt * K1)
        K3 = velocity(P + 0.5 * dt * K2)
        K4 = velocity(P + dt * K3)
        Pn = P + (dt / 6.0) * (K1 + 2 * K2 + 2 * K3 + K4)
        if M.codim:
            Pn = M.project_points_many(Pn)
        return Pn, np.linalg.norm(K1, axis=1)

    for step in range(max_steps):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        P = X[idx]
        if len(C):
            D = np.linalg.norm(P[:, None, :] - C[None, :, :], axis=2)
            min_dists[idx] = np.minimum(min_dists[idx], D)
            hit = D.min(axis=1) < capture_tol
            if hit.any():
                which = idx[hit]
                status[which] = CAPTURED
                limit[which] = D[hit].argmin(axis=1)
                active[which] = False
                idx = np.flatnonzero(active)
                if not len(idx):
                    break
                P = X[idx]
        far = np.linalg.norm(P, axis=1) > escape_radius
        if far.any():
            which = idx[far]
            status[which] = ESCAPED
            active[which] = False
            idx = np.flatnonzero(active)
            if not len(idx):
                break
            P = X[idx]

        speed = np.linalg.norm(velocity(P), axis=1)
        base_dt = step_length / np.maximum(speed, 1e-4 * step_length)
        dt = np.minimum(base_dt, dt_state[idx])
        f_old = f.value_many(P)
        Pn, _ = rk4(P, dt[:, None])
        f_new = f.value_many(Pn)
        # the flow must be monotone in f; an increase means the step left
        # the stability region, so halve and retry those trajectories
        scale = np.maximum(np.abs(f_old), 1.0)
        for _ in range(50):
            bad = -sgn * (f_new - f_old) > 1e-14 * scale
            if not bad.any():
                break
            dt[bad] *= 0.5
            dt_state[idx[bad]] = dt[bad]
            Pb, _ = rk4(P[bad], dt[bad][:, None])
            Pn[bad] = Pb
            f_new[bad] = f.value_many(Pb)
        # gently relax the cap so transient stiffness does not pin it
        dt_state[idx] = np.minimum(dt_state[idx] * 1.25, dt_cap)
        X[idx] = Pn
        steps_used[idx] = step + 1
        if keep_paths:
            for row, j in enumerate(idx):
                paths[j].append(Pn[row].copy())

    out = []
    for j in range(m):
        li = int(limit[j]) if status[j] == CAPTURED else None
        out.append(
            Trajectory(
                start=np.array(X0[j], dtype=float),
                end=X[j].copy(),
                status=int(status[j]),
                limit_index=li,
                limit=crits[li] if li is not None else None,
                steps=int(steps_used[j]),
                min_dists=min_dists[j].copy(),
                points=np.array(paths[j]) if keep_paths else None,
            )
        )
    return out


def flow_trajectory(f: EqFunction, M: ImplicitGManifold, x0, direction: int,
                    crits, *, capture_tol: float = CAPTURE_TOL,
                    step_length: float = 0.01, max_steps: int = 40000,
                    keep_path: bool = True) -> Trajectory:
    """One trajectory from x0 (descending for -1, ascending for +1).

    x0 must not already sit inside the capture radius of a critical point.
    Budget exhaustion is reported in the returned status, never raised.
    """
    x0 = np.asarray(x0, dtype=float)
    for c in crits:
        if np.linalg.norm(x0 - np.asarray(c.coords)) < capture_tol:
            raise ValueError("start point is already at a critical point")
    (traj,) = integrate_batch(
        f, M, x0[None, :], crits=crits, direction=direction,
        capture_tol=capture_tol, step_length=step_length,
        max_steps=max_steps, keep_paths=keep_path,
    )
    return traj
