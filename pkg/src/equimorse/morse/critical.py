"""Critical points on implicit G-manifolds: Newton continuation on the
Lagrange system, orbit closure, and stability classification.

Tolerances follow the package-wide conventions: gradient norm 1e-9 for
criticality, Hessian eigenvalue floor 1e-6 for nondegeneracy, with an order
of magnitude between detection and nondegeneracy thresholds.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from ..groups import Subgroup
from .manifolds import EqFunction, ImplicitGManifold

__all__ = [
    "CriticalPoint",
    "DegenerateHessian",
    "TOL_CRIT",
    "TOL_NONDEG",
    "STAB_TOL",
    "DEDUP_TOL",
    "classify",
    "find_critical_points",
    "seed_grid",
]

log = logging.getLogger(__name__)

TOL_CRIT = 1e-9
TOL_NONDEG = 1e-6
STAB_TOL = 1e-9
DEDUP_TOL = 1e-6


class DegenerateHessian(ValueError):
    """A Hessian eigenvalue sits inside the nondegeneracy floor."""


@dataclass(eq=False)
class CriticalPoint:
    """A classified critical point.

    hessian is the restricted Hessian in the orthonormal tangent frame
    tangent_basis; fixed_basis and prime_basis split the tangent space into
    the stabilizer-fixed part and its complement (the kernel of the
    averaging operator).  descending_rep records the stabilizer action on
    the negative eigenspace, one matrix per stabilizer element.
    """

    coords: np.ndarray
    value: float
    stabilizer: Subgroup
    tangent_basis: np.ndarray
    hessian: np.ndarray
    index: int
    fixed_basis: np.ndarray
    prime_basis: np.ndarray
    stable: bool
    neg_basis: np.ndarray
    descending_rep: tuple = ()

    def __repr__(self):
        return (f"CriticalPoint(at {np.round(self.coords, 6).tolist()}, "
                f"value={self.value:.6g}, index={self.index}, "
                f"stab order {self.stabilizer.order}, "
                f"{'stable' if self.stable else 'unstable'})")


def seed_grid(bounds, counts) -> np.ndarray:
    """Product grid over [lo, hi] per axis; counts may be one int."""
    if isinstance(counts, int):
        counts = [counts] * len(bounds)
    axes = [np.linspace(lo, hi, c) for (lo, hi), c in zip(bounds, counts)]
    pts = np.array(list(itertools.product(*axes)))
    return pts


def _newton_kkt(f: EqFunction, M: ImplicitGManifold, x0, max_iter=60,
                tol=1e-12, bound=1e6):
    """Newton on grad f = J^T lambda, F = 0.  Returns the point or None."""
    N = M.ambient
    c = M.codim
    x = np.asarray(x0, dtype=float).copy()
    if c:
        J = M.jacobian(x)
        g = f.grad(x)
        lam, *_ = np.linalg.lstsq(J.T, g, rcond=None)
    else:
        lam = np.zeros(0)
    for _ in range(max_iter):
        g = f.grad(x)
        if c:
            J = M.jacobian(x)
            F = M.constraint_values(x)
            res = np.concatenate([g - J.T @ lam, F])
        else:
            res = g
        if np.linalg.norm(res) < tol:
            return x
        H = f.hess(x)
        if c:
            CH = M.constraint_hessians(x)
            Hl = H - np.einsum("k,kij->ij", lam, CH)
            top = np.concatenate([Hl, -J.T], axis=1)
            bot = np.concatenate([J, np.zeros((c, c))], axis=1)
            K = np.concatenate([top, bot], axis=0)
            try:
                step = np.linalg.solve(K, -res)
            except np.linalg.LinAlgError:
                step, *_ = np.linalg.lstsq(K, -res, rcond=None)
            x = x + step[:N]
            lam = lam + step[N:]
        else:
            try:
                step = np.linalg.solve(H, -g)
            except np.linalg.LinAlgError:
                step, *_ = np.linalg.lstsq(H, -g, rcond=None)
            x = x + step
        if not np.all(np.isfinite(x)) or np.linalg.norm(x) > bound:
            return None
    return None


def _tangent_gradient_norm(f: EqFunction, M: ImplicitGManifold, x) -> float:
    return float(np.linalg.norm(M.project_tangent(x, f.grad(x))))


def find_critical_points(f: EqFunction, M: ImplicitGManifold, seeds,
                         *, tol_crit: float = TOL_CRIT,
                         dedup_tol: float = DEDUP_TOL,
                         max_iter: int = 60) -> list[np.ndarray]:
    """Newton from every seed, deduplicated and closed under the action.

    Divergent seeds are logged and skipped, never fatal.  Every returned
    point satisfies the tangent-gradient tolerance.
    """
    found: list[np.ndarray] = []

    def add(x):
        for y in found:
            if np.linalg.norm(x - y) <= dedup_tol:
                return
        found.append(x)

    diverged = 0
    for s in np.asarray(seeds, dtype=float):
        x = _newton_kkt(f, M, s, max_iter=max_iter)
        if x is None:
            diverged += 1
            continue
        if _tangent_gradient_norm(f, M, x) < tol_crit:
            add(x)
    if diverged:
        log.debug("newton divergence on %d of %d seeds", diverged, len(seeds))

    # close under the group action, refining each translate
    G = M.action.group
    i = 0
    while i < len(found):
        x = found[i]
        for s in G.elements():
            y = M.apply(s, x)
            y2 = _newton_kkt(f, M, y, max_iter=10)
            y = y2 if y2 is not None else y
            if _tangent_gradient_norm(f, M, y) < tol_crit:
                add(y)
        i += 1
    found.sort(key=lambda p: (round(float(f.value(p)), 9),) + tuple(np.round(p, 6)))
    return found


def classify(f: EqFunction, M: ImplicitGManifold, p, *,
             tol_crit: float = TOL_CRIT, tol_nondeg: float = TOL_NONDEG,
             stab_tol: float = STAB_TOL) -> CriticalPoint:
    """Stabilizer, restricted Hessian, index, fixed/prime splitting, and the
    stability flag of a critical point.

    stable means the Hessian is positive definite on the prime subspace
    (the kernel of the tangent averaging operator); equivalently no negative
    direction sticks out of the fixed subspace.
    """
    p = np.asarray(p, dtype=float)
    if _tangent_gradient_norm(f, M, p) >= tol_crit:
        raise ValueError("point fails the critical-gradient tolerance")
    H_sub = M.action.stabilizer(tuple(p), tol=stab_tol)
    T = M.tangent_basis(p)
    m = T.shape[1]

    # restricted Hessian: subtract the constraint curvature via multipliers
    Hf = f.hess(p)
    if M.codim:
        J = M.jacobian(p)
        lam, *_ = np.linalg.lstsq(J.T, f.grad(p), rcond=None)
        Hf = Hf - np.einsum("k,kij->ij", lam, M.constraint_hessians(p))
    Ht = T.T @ Hf @ T
    Ht = (Ht + Ht.T) / 2.0

    # stabilizer action on the tangent space and the averaging projector
    reps = []
    for s in H_sub.elements:
        A = np.array([[float(v) for v in row] for row in M.action.matrices[s]])
        reps.append(T.T @ A @ T)
    P = sum(reps) / len(reps)
    P = (P + P.T) / 2.0
    evals, evecs = np.linalg.eigh(P)
    fixed = evecs[:, evals > 0.5]
    prime = evecs[:, evals <= 0.5]

    w, V = np.linalg.eigh(Ht)
    if np.any(np.abs(w) <= tol_nondeg):
        raise DegenerateHessian(
            f"Hessian eigenvalue within {tol_nondeg} of zero: {w.tolist()}"
        )
    neg = V[:, w < 0]
    index = neg.shape[1]

    if prime.shape[1]:
        Hp = prime.T @ Ht @ prime
        wp = np.linalg.eigvalsh((Hp + Hp.T) / 2.0)
        stable = bool(np.all(wp > tol_nondeg))
    else:
        stable = True

    descending = []
    if index:
        for s, R in zip(H_sub.elements, reps):
            descending.append((s, neg.T @ R @ neg))

    return CriticalPoint(
        coords=p,
        value=f.value(p),
        stabilizer=H_sub,
        tangent_basis=T,
        hessian=Ht,
        index=index,
        fixed_basis=fixed,
        prime_basis=prime,
        stable=stable,
        neg_basis=neg,
        descending_rep=tuple(descending),
    )
