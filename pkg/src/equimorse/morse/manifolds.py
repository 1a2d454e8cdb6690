"""Implicit G-manifolds and equivariant smooth functions.

Manifolds are zero sets of polynomial constraint maps in Euclidean space
with an orthogonal action; the metric is the induced one, so invariance is
automatic.  Functions carry value/gradient/Hessian callables; polynomial
functions get exact derivatives and vectorized numpy evaluation, which the
flow integrator relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..polynomials import LinearAction, Polynomial

__all__ = ["EqFunction", "ImplicitGManifold", "metric_average"]


def _poly_eval_many(poly: Polynomial, X: np.ndarray) -> np.ndarray:
    """Evaluate at the rows of X (m x nvars)."""
    if not poly.terms:
        return np.zeros(len(X))
    expo = np.array(sorted(poly.terms), dtype=np.int64)
    coef = np.array([float(poly.terms[tuple(e)]) for e in expo])
    # powers: (m, nterms, nvars) -> product over vars
    return np.einsum(
        "mt->m", np.prod(X[:, None, :] ** expo[None, :, :], axis=2) * coef[None, :]
    )


class EqFunction:
    """A smooth function with gradient and Hessian, plus optional vectorized
    value/gradient paths used by the batch flow integrator."""

    def __init__(self, value, grad, hess, *, value_many=None, grad_many=None,
                 nvars=None, name=""):
        self._value = value
        self._grad = grad
        self._hess = hess
        self._value_many = value_many
        self._grad_many = grad_many
        self.nvars = nvars
        self.name = name or "f"

    def value(self, x) -> float:
        return float(self._value(np.asarray(x, dtype=float)))

    def grad(self, x) -> np.ndarray:
        return np.asarray(self._grad(np.asarray(x, dtype=float)), dtype=float)

    def hess(self, x) -> np.ndarray:
        return np.asarray(self._hess(np.asarray(x, dtype=float)), dtype=float)

    def value_many(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self._value_many is not None:
            return self._value_many(X)
        return np.array([self._value(x) for x in X])

    def grad_many(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self._grad_many is not None:
            return self._grad_many(X)
        return np.array([self._grad(x) for x in X])

    def invariance_error(self, act: LinearAction, samples) -> float:
        """max |f(A_s x) - f(x)| over the samples and group elements."""
        worst = 0.0
        for x in samples:
            fx = self.value(x)
            for s in act.group.elements():
                M = np.array([[float(v) for v in row] for row in act.matrices[s]])
                worst = max(worst, abs(self.value(M @ np.asarray(x, float)) - fx))
        return worst

    @classmethod
    def from_polynomial(cls, poly: Polynomial, name="") -> "EqFunction":
        n = poly.nvars
        fp = poly.as_float() if not all(
            isinstance(c, float) for c in poly.terms.values()
        ) else poly
        grads = [fp.derivative(i) for i in range(n)]
        hesses = [[grads[i].derivative(j) for j in range(n)] for i in range(n)]

        def value(x):
            return float(fp.evaluate(tuple(x)))

        def grad(x):
            xt = tuple(x)
            return np.array([float(g.evaluate(xt)) for g in grads])

        def hess(x):
            xt = tuple(x)
            return np.array(
                [[float(hesses[i][j].evaluate(xt)) for j in range(n)] for i in range(n)]
            )

        def value_many(X):
            return _poly_eval_many(fp, X)

        def grad_many(X):
            return np.stack([_poly_eval_many(g, X) for g in grads], axis=1)

        f = cls(value, grad, hess, value_many=value_many, grad_many=grad_many,
                nvars=n, name=name or "poly")
        f.polynomial = poly
        return f


@dataclass(eq=False)
class ImplicitGManifold:
    """Zero set of polynomial constraints with an orthogonal group action.

    An empty constraint list means all of R^ambient.  The action must be by
    orthogonal matrices preserving the constraints; validate_action samples
    that on given points of the zero set.
    """

    ambient: int
    constraints: tuple[Polynomial, ...]
    action: LinearAction
    name: str = ""

    def __post_init__(self):
        self.constraints = tuple(self.constraints)
        if self.action.dim != self.ambient:
            raise ValueError("action dimension must match the ambient space")
        if not self.action.is_orthogonal():
            raise ValueError("the action must be orthogonal")
        self._con_f = [c.as_float() for c in self.constraints]
        self._grads = [[c.derivative(i) for i in range(self.ambient)]
                       for c in self._con_f]
        self._hesses = [
            [[g.derivative(j) for j in range(self.ambient)] for g in gs]
            for gs in self._grads
        ]
        self._act_mats = [
            np.array([[float(v) for v in row] for row in self.action.matrices[s]])
            for s in self.action.group.elements()
        ]

    @property
    def codim(self) -> int:
        return len(self.constraints)

    @property
    def dim(self) -> int:
        return self.ambient - self.codim

    def constraint_values(self, x) -> np.ndarray:
        xt = tuple(np.asarray(x, dtype=float))
        return np.array([float(c.evaluate(xt)) for c in self._con_f])

    def constraint_values_many(self, X: np.ndarray) -> np.ndarray:
        if not self.constraints:
            return np.zeros((len(X), 0))
        return np.stack([_poly_eval_many(c, X) for c in self._con_f], axis=1)

    def jacobian(self, x) -> np.ndarray:
        xt = tuple(np.asarray(x, dtype=float))
        return np.array(
            [[float(g.evaluate(xt)) for g in gs] for gs in self._grads]
        ).reshape(self.codim, self.ambient)

    def jacobian_many(self, X: np.ndarray) -> np.ndarray:
        if not self.constraints:
            return np.zeros((len(X), 0, self.ambient))
        rows = []
        for gs in self._grads:
            rows.append(np.stack([_poly_eval_many(g, X) for g in gs], axis=1))
        return np.stack(rows, axis=1)

    def constraint_hessians(self, x) -> np.ndarray:
        xt = tuple(np.asarray(x, dtype=float))
        return np.array(
            [
                [[float(h.evaluate(xt)) for h in row] for row in hs]
                for hs in self._hesses
            ]
        ).reshape(self.codim, self.ambient, self.ambient)

    def tangent_basis(self, x) -> np.ndarray:
        """Columns form an orthonormal basis of the tangent space at x."""
        if not self.constraints:
            return np.eye(self.ambient)
        J = self.jacobian(x)
        _, _, vt = np.linalg.svd(J)
        return vt[self.codim:].T

    def project_tangent(self, x, v) -> np.ndarray:
        if not self.constraints:
            return np.asarray(v, dtype=float)
        T = self.tangent_basis(x)
        return T @ (T.T @ np.asarray(v, dtype=float))

    def project_tangent_many(self, X: np.ndarray, V: np.ndarray) -> np.ndarray:
        if not self.constraints:
            return V
        J = self.jacobian_many(X)  # (m, c, N)
        # v - J^T (J J^T)^{-1} J v, batched
        JV = np.einsum("mcn,mn->mc", J, V)
        G = np.einsum("mcn,mdn->mcd", J, J)
        lam = np.linalg.solve(G, JV[..., None])[..., 0]
        return V - np.einsum("mcn,mc->mn", J, lam)

    def project_point(self, x, tol=1e-12, iters=20) -> np.ndarray:
        """Gauss-Newton projection onto the zero set."""
        x = np.asarray(x, dtype=float).copy()
        for _ in range(iters):
            F = self.constraint_values(x)
            if np.max(np.abs(F), initial=0.0) < tol:
                break
            J = self.jacobian(x)
            step, *_ = np.linalg.lstsq(J, F, rcond=None)
            x -= step
        return x

    def project_points_many(self, X: np.ndarray, tol=1e-12, iters=20) -> np.ndarray:
        if not self.constraints:
            return X
        X = np.array(X, dtype=float)
        for _ in range(iters):
            F = self.constraint_values_many(X)
            if np.max(np.abs(F), initial=0.0) < tol:
                break
            J = self.jacobian_many(X)
            G = np.einsum("mcn,mdn->mcd", J, J)
            lam = np.linalg.solve(G, F[..., None])[..., 0]
            X = X - np.einsum("mcn,mc->mn", J, lam)
        return X

    def apply(self, s: int, x) -> np.ndarray:
        return self._act_mats[s] @ np.asarray(x, dtype=float)

    def validate_action(self, sample_points, tol=1e-9) -> float:
        """max |F(A_s x)| over samples of the zero set; must stay below tol."""
        worst = 0.0
        for x in sample_points:
            x = self.project_point(x)
            for s in self.action.group.elements():
                worst = max(
                    worst,
                    float(np.max(np.abs(self.constraint_values(self.apply(s, x))),
                                 initial=0.0)),
                )
        if worst >= tol:
            raise ValueError(f"action does not preserve the zero set: {worst:.2e}")
        return worst


class MetricField:
    """A matrix-valued field with pointwise symmetric positive definite
    values, closed under the averaging that makes it invariant."""

    def __init__(self, fn, dim: int):
        self.fn = fn
        self.dim = dim

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)


def metric_average(g, act: LinearAction) -> MetricField:
    """(1/|G|) sum_s A_s^T g(A_s x) A_s: an invariant metric from any metric.

    The result satisfies A_s^T result(A_s x) A_s = result(x) and stays
    positive definite as a convex combination of congruent SPD matrices.
    """
    mats = [
        np.array([[float(v) for v in row] for row in act.matrices[s]])
        for s in act.group.elements()
    ]
    base = g.fn if isinstance(g, MetricField) else g

    def averaged(x):
        x = np.asarray(x, dtype=float)
        total = np.zeros((act.dim, act.dim))
        for M in mats:
            total += M.T @ np.asarray(base(M @ x), dtype=float) @ M
        return total / len(mats)

    return MetricField(averaged, act.dim)
