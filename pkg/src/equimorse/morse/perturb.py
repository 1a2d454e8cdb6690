"""The stable-perturbation construction and its surgery into fixtures.

The model on V + W + U is

    F(v, w, u) = |v|^2 - |w|^2 - |u|^2 phi(|u| - 2) + eps psi(|u|) h(u/|u|)

whose critical set is exactly the origin (with Hessian positive definite on
V + U) together with one point t0*u on the plateau radius for each critical
point u of h on the unit sphere.  Splicing the model into a Morse chart at
an unstable critical point replaces it by stable critical points without
touching the function outside the chart ball.

Sphere functions h are homogeneous polynomials divided by the matching power
of the radius, so their gradients and Hessians are closed-form.
"""

from __future__ import annotations

import logging
import warnings

import numpy as np

from ..groups import FiniteGroup, Subgroup
from ..polynomials import LinearAction, Polynomial
from .critical import (
    CriticalPoint,
    classify,
    find_critical_points,
    seed_grid,
)
from .cutoffs import CutoffPair
from .manifolds import EqFunction, ImplicitGManifold, _poly_eval_many

__all__ = [
    "AngleChart",
    "ChartMissing",
    "EpsilonTooLarge",
    "HNotEquivariant",
    "LinearChart",
    "PerturbedModel",
    "SphereFunction",
    "localize_surgery",
    "stable_perturb",
    "subgroup_action",
]

log = logging.getLogger(__name__)


class HNotEquivariant(ValueError):
    """The sphere function is not equivariant for the stabilizer action."""


class EpsilonTooLarge(ValueError):
    """Spurious critical points appeared in the transition annuli."""


class ChartMissing(ValueError):
    """Surgery needs an exact Morse chart from the fixture."""


def subgroup_action(act: LinearAction, H: Subgroup) -> LinearAction:
    """The restriction of an action to a subgroup, as an action of the
    abstract group on H's elements (table built from the parent)."""
    G = act.group
    elems = H.elements
    index = {g: i for i, g in enumerate(elems)}
    table = tuple(
        tuple(index[G.mul[a][b]] for b in elems) for a in elems
    )
    sub = FiniteGroup(table, name=f"H{len(elems)}")
    mats = [act.matrices[g] for g in elems]
    return LinearAction(sub, mats, exact=act.exact)


class SphereFunction:
    """h(u) = P(u) / |u|^deg for a homogeneous polynomial P: the degree-zero
    homogeneous extension of a smooth function on the unit sphere."""

    def __init__(self, poly: Polynomial):
        degs = {sum(e) for e in poly.terms} or {0}
        if len(degs) != 1:
            raise ValueError("sphere function needs a homogeneous polynomial")
        self.poly = poly.as_float()
        self.deg = degs.pop()
        self.dim = poly.nvars
        self._grads = [self.poly.derivative(i) for i in range(self.dim)]
        self._hesses = [
            [g.derivative(j) for j in range(self.dim)] for g in self._grads
        ]

    @classmethod
    def constant(cls, dim: int, c: float = 1.0) -> "SphereFunction":
        return cls(Polynomial.constant(dim, float(c)))

    @classmethod
    def cos_multiple_angle(cls, k: int) -> "SphereFunction":
        """cos(k theta) on the unit circle: the real part of (x + i y)^k."""
        terms = {}
        sign = 1
        for j in range(0, k + 1, 2):
            from math import comb

            terms[(k - j, j)] = sign * comb(k, j)
            sign = -sign
        return cls(Polynomial(2, terms))

    def value(self, u) -> float:
        u = np.asarray(u, dtype=float)
        t = np.linalg.norm(u)
        return float(self.poly.evaluate(tuple(u))) / t**self.deg

    def value_many(self, U: np.ndarray) -> np.ndarray:
        t = np.linalg.norm(U, axis=1)
        return _poly_eval_many(self.poly, U) / t**self.deg

    def grad(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        t = np.linalg.norm(u)
        m = self.deg
        P = float(self.poly.evaluate(tuple(u)))
        gP = np.array([float(g.evaluate(tuple(u))) for g in self._grads])
        return gP / t**m - m * P * u / t ** (m + 2)

    def grad_many(self, U: np.ndarray) -> np.ndarray:
        t = np.linalg.norm(U, axis=1)
        m = self.deg
        P = _poly_eval_many(self.poly, U)
        gP = np.stack([_poly_eval_many(g, U) for g in self._grads], axis=1)
        return gP / t[:, None] ** m - m * (P / t ** (m + 2))[:, None] * U

    def hess(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        t = np.linalg.norm(u)
        m = self.deg
        ut = tuple(u)
        P = float(self.poly.evaluate(ut))
        gP = np.array([float(g.evaluate(ut)) for g in self._grads])
        HP = np.array(
            [[float(h.evaluate(ut)) for h in row] for row in self._hesses]
        )
        I = np.eye(self.dim)
        return (
            HP / t**m
            - m / t ** (m + 2) * (np.outer(gP, u) + np.outer(u, gP) + P * I)
            + m * (m + 2) * P / t ** (m + 4) * np.outer(u, u)
        )

    def equivariance_error(self, act: LinearAction, samples: int = 64) -> float:
        """max |h(A_s u) - h(u)| over random sphere samples."""
        rng = np.random.default_rng(7)
        pts = rng.normal(size=(samples, self.dim))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        worst = 0.0
        for s in act.group.elements():
            A = np.array([[float(v) for v in row] for row in act.matrices[s]])
            moved = pts @ A.T
            worst = max(
                worst,
                float(np.max(np.abs(self.value_many(moved) - self.value_many(pts)))),
            )
        return worst

    def sphere_critical_points(self, tol: float = 1e-12):
        """Critical points of h on the unit sphere with their sphere-Hessian
        index; supported for dim <= 2."""
        if self.dim == 1:
            return [
                (np.array([1.0]), 0, True),
                (np.array([-1.0]), 0, True),
            ]
        if self.dim == 2:
            thetas = np.linspace(0.0, 2 * np.pi, 1441, endpoint=False)
            pts = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
            tang = np.stack([-np.sin(thetas), np.cos(thetas)], axis=1)
            dq = np.einsum("mi,mi->m", self.grad_many(pts), tang)
            roots = []
            nt = len(thetas)
            for i in range(nt):
                a, b = thetas[i], thetas[(i + 1) % nt] + (2 * np.pi if i + 1 == nt else 0)
                fa, fb = dq[i], dq[(i + 1) % nt]
                if fa == 0.0:
                    roots.append(a)
                    continue
                if fa * fb < 0:
                    lo, hi, flo = a, b, fa

                    def qprime(th):
                        u = np.array([np.cos(th), np.sin(th)])
                        tv = np.array([-np.sin(th), np.cos(th)])
                        return float(self.grad(u) @ tv)

                    while hi - lo > tol:
                        mid = (lo + hi) / 2
                        fm = qprime(mid)
                        if flo * fm <= 0:
                            hi = mid
                        else:
                            lo, flo = mid, fm
                    roots.append((lo + hi) / 2)
            out = []
            for th in roots:
                u = np.array([np.cos(th), np.sin(th)])
                tv = np.array([-np.sin(th), np.cos(th)])
                q2 = float(tv @ self.hess(u) @ tv - self.grad(u) @ u)
                # on the unit circle q''(theta) = t^T H t - u . grad
                nondeg = abs(q2) > 1e-8
                out.append((u, 1 if q2 < 0 else 0, nondeg))
            return out
        raise ValueError("sphere critical points supported for dim <= 2 only")


class PerturbedModel(EqFunction):
    """The construction as an EqFunction on R^(dv+dw+du), with the block
    action and the predicted critical data attached."""

    def __init__(self, actV: LinearAction, actW: LinearAction,
                 actU: LinearAction, h: SphereFunction | None,
                 cut: CutoffPair, eps: float):
        if not (actV.group.mul == actW.group.mul == actU.group.mul):
            raise ValueError("the three representations must share the group")
        self.dv, self.dw, self.du = actV.dim, actW.dim, actU.dim
        self.cut = cut
        self.eps = float(eps)
        self.h = h
        if self.du and h is not None and h.dim != self.du:
            raise ValueError("sphere function dimension mismatch")
        parts = [a for a in (actV, actW, actU) if a.dim]
        self.action = (
            LinearAction.block_sum(parts) if parts
            else LinearAction.trivial(actV.group, 0)
        )
        n = self.dv + self.dw + self.du
        super().__init__(self._value1, self._grad1, self._hess1,
                         value_many=self._value_n, grad_many=self._grad_n,
                         nvars=n, name="perturbed-model")

    # -- coordinate splitting --

    def _split(self, x):
        dv, dw = self.dv, self.dw
        return x[:dv], x[dv:dv + dw], x[dv + dw:]

    def _split_n(self, X):
        dv, dw = self.dv, self.dw
        return X[:, :dv], X[:, dv:dv + dw], X[:, dv + dw:]

    # -- radial profile, piecewise exact --

    def _R(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(t <= 1.0, t * t, 0.0)
        out = np.where(t >= 3.0, -t * t, out)
        mid = (t > 1.0) & (t < 3.0)
        if np.any(mid):
            tm = t[mid]
            out[mid] = -tm * tm * self.cut.phi(tm - 2.0)
        return out

    def _R1(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(t <= 1.0, 2.0 * t, 0.0)
        out = np.where(t >= 3.0, -2.0 * t, out)
        mid = (t > 1.0) & (t < 3.0)
        if np.any(mid):
            tm = t[mid]
            out[mid] = -2 * tm * self.cut.phi(tm - 2) - tm * tm * self.cut.phi.d1(tm - 2)
        return out

    def _R2(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(t <= 1.0, 2.0, 0.0)
        out = np.where(t >= 3.0, -2.0, out)
        mid = (t > 1.0) & (t < 3.0)
        if np.any(mid):
            tm = t[mid]
            out[mid] = (
                -2 * self.cut.phi(tm - 2)
                - 4 * tm * self.cut.phi.d1(tm - 2)
                - tm * tm * self.cut.phi.d2(tm - 2)
            )
        return out

    # -- evaluation --

    def _value_n(self, X):
        X = np.asarray(X, dtype=float)
        v, w, u = self._split_n(X)
        out = np.einsum("mi,mi->m", v, v) - np.einsum("mi,mi->m", w, w)
        if self.du:
            t = np.linalg.norm(u, axis=1)
            out = out + self._R(t)
            if self.h is not None and self.eps:
                psi = self.cut.psi(t)
                on = psi > 0.0
                if np.any(on):
                    vals = np.zeros_like(t)
                    vals[on] = self.h.value_many(u[on])
                    out = out + self.eps * psi * vals
        return out

    def _value1(self, x):
        return self._value_n(np.asarray(x, dtype=float)[None, :])[0]

    def _grad_n(self, X):
        X = np.asarray(X, dtype=float)
        m = len(X)
        v, w, u = self._split_n(X)
        g = np.concatenate([2.0 * v, -2.0 * w, np.zeros_like(u)], axis=1)
        if self.du:
            t = np.linalg.norm(u, axis=1)
            gu = np.zeros_like(u)
            safe = t > 0
            uhat = np.zeros_like(u)
            uhat[safe] = u[safe] / t[safe, None]
            gu += self._R1(t)[:, None] * uhat
            # at t = 0 the profile is +t^2, gradient 2u = 0: consistent
            if self.h is not None and self.eps:
                psi = self.cut.psi(t)
                dpsi = self.cut.psi.d1(t)
                on = (psi > 0.0) | (dpsi != 0.0)
                if np.any(on):
                    hval = np.zeros_like(t)
                    hgrad = np.zeros_like(u)
                    hval[on] = self.h.value_many(u[on])
                    hgrad[on] = self.h.grad_many(u[on])
                    gu += self.eps * (
                        (dpsi * hval)[:, None] * uhat + psi[:, None] * hgrad
                    )
            g[:, self.dv + self.dw:] = g[:, self.dv + self.dw:] + gu
        return g

    def _grad1(self, x):
        return self._grad_n(np.asarray(x, dtype=float)[None, :])[0]

    def _hess1(self, x):
        x = np.asarray(x, dtype=float)
        n = self.dv + self.dw + self.du
        H = np.zeros((n, n))
        dv, dw, du = self.dv, self.dw, self.du
        H[:dv, :dv] = 2.0 * np.eye(dv)
        H[dv:dv + dw, dv:dv + dw] = -2.0 * np.eye(dw)
        if du:
            u = x[dv + dw:]
            t = float(np.linalg.norm(u))
            if t == 0.0:
                Hu = 2.0 * np.eye(du)
            else:
                uhat = u / t
                Pu = np.outer(uhat, uhat)
                Pt = np.eye(du) - Pu
                Hu = self._R2(t) * Pu + (self._R1(t) / t) * Pt
                if self.h is not None and self.eps:
                    psi = float(self.cut.psi(t))
                    d1 = float(self.cut.psi.d1(t))
                    d2 = float(self.cut.psi.d2(t))
                    if psi or d1 or d2:
                        hv = self.h.value(u)
                        hg = self.h.grad(u)
                        hh = self.h.hess(u)
                        Hu = Hu + self.eps * (
                            d2 * hv * Pu
                            + d1 * (np.outer(uhat, hg) + np.outer(hg, uhat))
                            + d1 * hv * Pt / t
                            + psi * hh
                        )
            H[dv + dw:, dv + dw:] = Hu
        return H

    # -- predictions --

    def predicted_critical_points(self) -> list[np.ndarray]:
        """Origin plus t0*u for each sphere-critical u of h."""
        n = self.dv + self.dw + self.du
        out = [np.zeros(n)]
        if self.du and self.h is not None:
            for u, _, _ in self.h.sphere_critical_points():
                x = np.zeros(n)
                x[self.dv + self.dw:] = self.cut.t0 * u
                out.append(x)
        return out


def stable_perturb(actV: LinearAction, actW: LinearAction, actU: LinearAction,
                   h: SphereFunction | None, cut: CutoffPair, *,
                   verify: bool = True, grid_n: int = 9,
                   ) -> tuple[PerturbedModel, list[CriticalPoint]]:
    """Build the model and verify its predicted critical set.

    h must be equivariant for the U-representation (checked by sampling).
    epsilon is rescaled by the sampled sup of |h|.  Every predicted point is
    re-verified through find_critical_points + classify; unexpected points
    inside the transition annuli raise EpsilonTooLarge.
    """
    du = actU.dim
    if du and h is None:
        h = SphereFunction.constant(du)
    h_sup = 1.0
    if du and h is not None:
        err = h.equivariance_error(actU)
        if err > 1e-9:
            raise HNotEquivariant(f"sphere function moves by {err:.2e}")
        rng = np.random.default_rng(3)
        pts = rng.normal(size=(256, du))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        h_sup = float(np.max(np.abs(h.value_many(pts))))
    eps = cut.epsilon / max(h_sup, 1e-12) if du else 0.0
    model = PerturbedModel(actV, actW, actU, h if du else None, cut, eps)
    n = model.dv + model.dw + model.du
    manifold = ImplicitGManifold(
        ambient=n, constraints=(), action=model.action, name="model-space"
    )

    predicted = model.predicted_critical_points()
    classified = [classify(model, manifold, p) for p in predicted]
    if not verify:
        return model, classified

    seeds = list(predicted)
    if n:
        seeds.extend(seed_grid([(-3.4, 3.4)] * n, grid_n if n <= 2 else 5))
    found = find_critical_points(model, manifold, np.array(seeds))
    for x in found:
        if all(np.linalg.norm(x - q) > 1e-5 for q in predicted):
            u = x[model.dv + model.dw:]
            t = float(np.linalg.norm(u))
            d = cut.delta
            in_annuli = (1.0 < t < cut.t0 - d) or (cut.t0 + d < t < 3.0) or t >= 3.0
            if in_annuli:
                raise EpsilonTooLarge(
                    f"spurious critical point at |u| = {t:.6f}"
                )
            raise AssertionError(
                f"construction property violated: extra critical point {x}"
            )
    return model, classified


# -- Morse charts -------------------------------------------------------------


class LinearChart:
    """Affine isometric chart y = Q^T (x - p) on a flat ambient manifold, with
    f(x) = f(p) + |v|^2 - |w|^2 exactly in these coordinates."""

    def __init__(self, center, frame, dv: int, dw: int):
        self.center = np.asarray(center, dtype=float)
        self.frame = np.asarray(frame, dtype=float)
        self.dv = dv
        self.dw = dw
        if self.frame.shape != (len(self.center), dv + dw):
            raise ValueError("frame must be ambient x (dv + dw)")
        QtQ = self.frame.T @ self.frame
        if not np.allclose(QtQ, np.eye(dv + dw), atol=1e-12):
            raise ValueError("frame columns must be orthonormal")

    @property
    def dim(self) -> int:
        return self.dv + self.dw

    def coords(self, x) -> np.ndarray:
        return self.frame.T @ (np.asarray(x, dtype=float) - self.center)

    def coords_many(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.center) @ self.frame

    def jac(self, x) -> np.ndarray:
        """dy/dx, shape (dim, ambient)."""
        return self.frame.T

    def hess_coords(self, x) -> np.ndarray:
        """d2 y_k / dx^2, shape (dim, ambient, ambient): zero here."""
        N = len(self.center)
        return np.zeros((self.dim, N, N))

    def model_error(self, f: EqFunction, fp: float, samples: int = 64,
                    radius: float = 0.5) -> float:
        rng = np.random.default_rng(11)
        Y = rng.uniform(-radius, radius, size=(samples, self.dim))
        X = self.center + Y @ self.frame.T
        vals = f.value_many(X)
        model = (
            np.sum(Y[:, :self.dv] ** 2, axis=1)
            - np.sum(Y[:, self.dv:] ** 2, axis=1)
        )
        return float(np.max(np.abs(vals - (fp + model))))


class AngleChart:
    """Exact Morse chart at a pole of the unit circle for a height function:
    with u the angle from the pole, the coordinate y = sqrt(2) sin(u/2)
    turns f = cos(u) + const into f(p) - y^2 exactly.  dv = 0, dw = 1."""

    def __init__(self, pole_angle: float):
        self.pole_angle = float(pole_angle)
        self.dv = 0
        self.dw = 1

    @property
    def dim(self) -> int:
        return 1

    def center_point(self) -> np.ndarray:
        return np.array([np.cos(self.pole_angle), np.sin(self.pole_angle)])

    def _angle(self, x):
        x = np.asarray(x, dtype=float)
        th = np.arctan2(x[..., 1], x[..., 0]) - self.pole_angle
        return (th + np.pi) % (2 * np.pi) - np.pi

    def coords(self, x) -> np.ndarray:
        u = self._angle(x)
        return np.array([np.sqrt(2.0) * np.sin(u / 2.0)])

    def coords_many(self, X) -> np.ndarray:
        u = self._angle(X)
        return (np.sqrt(2.0) * np.sin(u / 2.0))[:, None]

    def jac(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        r2 = float(x @ x)
        u = self._angle(x)
        grad_u = np.array([-x[1], x[0]]) / r2
        dy_du = np.sqrt(2.0) * 0.5 * np.cos(u / 2.0)
        return (dy_du * grad_u)[None, :]

    def hess_coords(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        r2 = float(x @ x)
        u = self._angle(x)
        grad_u = np.array([-x[1], x[0]]) / r2
        hess_u = np.array(
            [[2 * x[0] * x[1], x[1] ** 2 - x[0] ** 2],
             [x[1] ** 2 - x[0] ** 2, -2 * x[0] * x[1]]]
        ) / (r2 * r2)
        dy = np.sqrt(2.0) * 0.5 * np.cos(u / 2.0)
        d2y = -np.sqrt(2.0) * 0.25 * np.sin(u / 2.0)
        return (d2y * np.outer(grad_u, grad_u) + dy * hess_u)[None, :, :]


class SurgeredFunction(EqFunction):
    """f with the model spliced into the chart (and its orbit translates)."""

    def __init__(self, f: EqFunction, M: ImplicitGManifold, charts,
                 model: PerturbedModel, scale: float, fp: float,
                 split_frames, name=""):
        # charts: list of (chart, to_ambient matrix or None) per orbit point;
        # split_frames: (dim_chart x model_dim) mapping chart coords to the
        # model's (v, w, u) ordering
        self.f0 = f
        self.M = M
        self.charts = charts
        self.model = model
        self.scale = float(scale)
        self.fp = float(fp)
        self.split = np.asarray(split_frames, dtype=float)
        self.c0_distance = 0.0
        super().__init__(self._value1, self._grad1, self._hess1,
                         value_many=self._value_n,
                         nvars=f.nvars, name=name or "surgered")

    def _model_y(self, chart, x):
        """Model coordinates of x through one chart, or None if outside
        the modified cylinder."""
        y = self.split @ chart.coords(x)
        du = self.model.du
        if du == 0:
            return None
        u = y[self.model.dv + self.model.dw:]
        if np.linalg.norm(u) >= 3.0 * self.scale:
            return None
        return y

    def _value1(self, x):
        x = np.asarray(x, dtype=float)
        for chart in self.charts:
            y = self._model_y(chart, x)
            if y is not None:
                s = self.scale
                return self.fp + s * s * self.model._value1(y / s)
        return self.f0.value(x)

    def _value_n(self, X):
        X = np.asarray(X, dtype=float)
        out = self.f0.value_many(X)
        s = self.scale
        for chart in self.charts:
            Y = chart.coords_many(X) @ self.split.T
            U = Y[:, self.model.dv + self.model.dw:]
            inside = np.linalg.norm(U, axis=1) < 3.0 * s
            if np.any(inside):
                out[inside] = self.fp + s * s * self.model._value_n(Y[inside] / s)
        return out

    def _grad1(self, x):
        x = np.asarray(x, dtype=float)
        for chart in self.charts:
            y = self._model_y(chart, x)
            if y is not None:
                s = self.scale
                gF = self.model._grad1(y / s)  # dF/dy at y/s
                Jy = self.split @ chart.jac(x)  # (model_dim, ambient)
                return s * (gF @ Jy)
        return self.f0.grad(x)

    def _hess1(self, x):
        x = np.asarray(x, dtype=float)
        for chart in self.charts:
            y = self._model_y(chart, x)
            if y is not None:
                s = self.scale
                gF = self.model._grad1(y / s)
                HF = self.model._hess1(y / s)
                Jy = self.split @ chart.jac(x)
                Hy = np.einsum("km,mij->kij", self.split, chart.hess_coords(x))
                H = Jy.T @ HF @ Jy
                H = H + s * np.einsum("k,kij->ij", gF, Hy)
                return H
        return self.f0.hess(x)


def localize_surgery(f: EqFunction, M: ImplicitGManifold, p: CriticalPoint,
                     radius: float, cut: CutoffPair, chart=None,
                     h: SphereFunction | None = None) -> EqFunction:
    """Replace f near the orbit of an unstable critical point by the model.

    The chart must present f exactly as f(p) + |v|^2 - |w|^2; the model is
    spliced with U = the non-fixed directions of W, scaled so the modified
    cylinder sits inside the given radius.  Stable points pass through
    unchanged with a warning.
    """
    if p.stable:
        warnings.warn("localize_surgery called on a stable point: no-op")
        return f
    if chart is None:
        raise ChartMissing("surgery needs the fixture's Morse chart")

    fp = f.value(p.coords)
    err = chart.model_error(f, fp) if hasattr(chart, "model_error") else 0.0
    if err > 1e-9:
        raise ChartMissing(f"chart is not an exact Morse chart: error {err:.2e}")

    # split the chart's W block into fixed and prime parts under stab(p)
    H_sub = p.stabilizer
    act = M.action
    dv, dw = chart.dv, chart.dw
    dim = dv + dw

    mats = []
    for s in H_sub.elements:
        A = np.array([[float(v) for v in row] for row in act.matrices[s]])
        if isinstance(chart, LinearChart):
            B = chart.frame.T @ A @ chart.frame
        else:
            # 1-d angle chart: reflection acts by -1 on the coordinate,
            # identity by +1
            B = np.array([[1.0]]) if s == act.group.identity else np.array([[-1.0]])
        mats.append(B)
    avg = sum(mats) / len(mats)
    Wavg = avg[dv:, dv:]
    evals, evecs = np.linalg.eigh((Wavg + Wavg.T) / 2)
    keep = evecs[:, evals > 0.5]     # fixed: stays W
    prime = evecs[:, evals <= 0.5]   # becomes U
    dw_keep = keep.shape[1]
    du = prime.shape[1]
    if du == 0:
        raise ValueError("no prime directions in W: the point is stable")
    if du >= 2 and h is None:
        raise ValueError("surgery with dim U >= 2 needs an explicit sphere function")

    # model-space ordering (v, w_keep, u); split matrix maps chart coords to it
    split = np.zeros((dim, dim))
    split[:dv, :dv] = np.eye(dv)
    if dw_keep:
        split[dv:dv + dw_keep, dv:] = keep.T
    split[dv + dw_keep:, dv:] = prime.T

    Hgrp = subgroup_action(act, H_sub)
    sub_mats = [split @ B @ split.T for B in mats]

    def block(lo, hi):
        return LinearAction(
            Hgrp.group,
            [tuple(tuple(float(B[i][j]) for j in range(lo, hi))
                   for i in range(lo, hi)) for B in sub_mats],
            exact=False,
        ) if hi > lo else LinearAction.trivial(Hgrp.group, 0)

    actV = block(0, dv)
    actW = block(dv, dv + dw_keep)
    actU = block(dv + dw_keep, dim)

    if du == 1 and h is None:
        h = SphereFunction.constant(1)
    scale = radius / 3.5
    model, _ = stable_perturb(actV, actW, actU, h, cut, verify=False)

    # orbit translates of the chart
    charts = [chart]
    for s, q in act.orbit(tuple(np.asarray(p.coords, float))):
        qa = np.array([float(v) for v in q])
        if np.linalg.norm(qa - p.coords) < 1e-9:
            continue
        A = np.array([[float(v) for v in row] for row in act.matrices[s]])
        if isinstance(chart, LinearChart):
            charts.append(LinearChart(A @ chart.center, A @ chart.frame,
                                      chart.dv, chart.dw))
        else:
            raise ChartMissing("orbit surgery with angle charts is limited "
                               "to fixed poles")

    out = SurgeredFunction(f, M, charts, model, scale, fp, split)

    # reported C0 distance: sup over the modified cylinder of the change
    ts = np.linspace(0.0, 3.0, 601)
    base = -ts * ts
    h_sup = 0.0
    if model.du and model.h is not None:
        rng = np.random.default_rng(5)
        pts = rng.normal(size=(128, model.du))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        h_sup = float(np.max(np.abs(model.h.value_many(pts))))
    changed = model._R(ts) + model.eps * model.cut.psi(ts) * h_sup
    out.c0_distance = float(scale * scale * np.max(np.abs(changed - base)))
    log.info("surgery at %s: C0 distance <= %.3e", np.round(p.coords, 4),
             out.c0_distance)
    return out
