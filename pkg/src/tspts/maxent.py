"""Worst-case demand distributions from the maximum-entropy principle.

Spatially the density on ``[0, a]^2`` matching a mean and covariance is
``exp(nu - 1 + lam.x + x'Qx)``; temporally, matching a mean slot index
gives a binomial law over slots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .approx import beta_lookup


class MaxEntError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpatialMoments:
    mu: tuple
    sigma: tuple   # 2x2 covariance, row-major nested tuples

    def __post_init__(self):
        mu = tuple(float(v) for v in self.mu)
        sigma = np.asarray(self.sigma, dtype=float)
        if len(mu) != 2 or sigma.shape != (2, 2):
            raise ValueError("need a 2-vector mean and a 2x2 covariance")
        if not np.allclose(sigma, sigma.T, rtol=0, atol=1e-12 * max(1.0, abs(sigma).max())):
            raise ValueError("covariance must be symmetric")
        if np.linalg.eigvalsh(sigma).min() <= 0:
            raise ValueError("covariance must be positive definite")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", tuple(map(tuple, sigma.tolist())))

    @classmethod
    def uniform(cls, a: float) -> "SpatialMoments":
        v = a * a / 12.0
        return cls((a / 2, a / 2), ((v, 0.0), (0.0, v)))

    def second_moment(self) -> np.ndarray:
        mu = np.array(self.mu)
        return np.array(self.sigma) + np.outer(mu, mu)


@dataclass(frozen=True)
class MEDensityParams:
    nu: float
    lam: tuple
    q: tuple       # symmetric 2x2
    a: float

    @classmethod
    def uniform(cls, a: float) -> "MEDensityParams":
        return cls(1.0 - math.log(a * a), (0.0, 0.0), ((0.0, 0.0), (0.0, 0.0)), float(a))

    def exponent(self, x, y):
        (q11, q12), (_, q22) = self.q
        return (self.nu - 1.0 + self.lam[0] * x + self.lam[1] * y
                + q11 * x * x + 2.0 * q12 * x * y + q22 * y * y)


def gauss_legendre_grid(a: float, order: int):
    """Tensor Gauss-Legendre nodes ``(x, y)`` and weights on ``[0, a]^2``."""
    t, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * a * (t + 1.0)
    w = 0.5 * a * w
    X, Y = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w)
    return X.ravel(), Y.ravel(), W.ravel()


def density_eval(params: MEDensityParams, x: float, y: float) -> float:
    a = params.a
    if not (0.0 <= x <= a and 0.0 <= y <= a):
        raise ValueError(f"({x}, {y}) outside [0, {a}]^2")
    return math.exp(params.exponent(x, y))


def moment_residuals(params: MEDensityParams, moments: SpatialMoments, quad_order: int = 40) -> np.ndarray:
    """Mass, mean and second-moment mismatches of ``params`` (6 entries)."""
    X, Y, W = gauss_legendre_grid(params.a, quad_order)
    f = np.exp(params.exponent(X, Y)) * W
    m2 = moments.second_moment()
    return np.array([
        f.sum() - 1.0,
        (f * X).sum() - moments.mu[0],
        (f * Y).sum() - moments.mu[1],
        (f * X * X).sum() - m2[0, 0],
        (f * X * Y).sum() - m2[0, 1],
        (f * Y * Y).sum() - m2[1, 1],
    ])


def _check_achievable(moments: SpatialMoments, a: float):
    mx, my = moments.mu
    for mu_i, var in ((mx, moments.sigma[0][0]), (my, moments.sigma[1][1])):
        if not 0.0 < mu_i < a:
            raise ValueError(f"mean {moments.mu} not inside the square (0, {a})^2")
        # a variable on [0, a] with mean mu has variance below mu (a - mu)
        if var >= mu_i * (a - mu_i):
            raise ValueError(f"variance {var} unreachable on [0, {a}] with mean {mu_i}")


def solve_spatial_me(moments: SpatialMoments, a: float, quad_order: int = 40,
                     tol: float = 1e-8, max_iter: int = 200) -> MEDensityParams:
    """Lagrange multipliers of the max-entropy density with given moments.

    Works in unit-square coordinates and runs damped Newton on the convex
    dual (log-partition minus target moments) for the five moment
    multipliers; ``nu`` then follows from normalization. ``tol`` bounds the
    sup-norm of the moment residuals in the original units.
    """
    _check_achievable(moments, a)
    a = float(a)
    t, w = np.polynomial.legendre.leggauss(quad_order)
    u = 0.5 * (t + 1.0)
    w = 0.5 * w
    U, V = np.meshgrid(u, u, indexing="ij")
    U, V, W = U.ravel(), V.ravel(), np.outer(w, w).ravel()
    feats = np.stack([U, V, U * U, U * V, V * V])            # (5, N)
    mu = np.asarray(moments.mu) / a
    s2 = moments.second_moment() / (a * a)
    target = np.array([mu[0], mu[1], s2[0, 0], s2[0, 1], s2[1, 1]])

    def dual(theta):
        z = theta @ feats
        zmax = z.max()
        p = np.exp(z - zmax) * W
        total = p.sum()
        return math.log(total) + zmax - theta @ target, p / total

    theta = np.zeros(5)
    value, p = dual(theta)
    scale = np.array([a, a, a * a, a * a, a * a])
    for _ in range(max_iter):
        mean = feats @ p
        grad = mean - target
        if np.max(np.abs(grad * scale)) < tol:
            break
        centered = feats - mean[:, None]
        hess = (centered * p) @ centered.T
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hess, grad, rcond=None)[0]
        decrement = grad @ step
        if decrement < 1e-10:
            # dual decrease is below float resolution; take the full step
            theta = theta - step
            value, p = dual(theta)
            continue
        # backtracking on the convex dual; fall back to a gradient step
        t_step = 1.0
        accepted = False
        for _ in range(60):
            cand = theta - t_step * step
            cand_value, cand_p = dual(cand)
            if np.isfinite(cand_value) and cand_value <= value - 1e-4 * t_step * decrement:
                accepted = True
                break
            t_step *= 0.5
        if not accepted:
            cand = theta - 1e-2 * grad
            cand_value, cand_p = dual(cand)
            if not (np.isfinite(cand_value) and cand_value < value):
                # no further decrease is representable in double precision
                break
        theta, value, p = cand, cand_value, cand_p
    else:
        raise MaxEntError(f"no convergence within {max_iter} iterations")

    # theta is in unit coordinates: map back to x = a u
    lam = (theta[0] / a, theta[1] / a)
    q11, q12, q22 = theta[2] / a ** 2, 0.5 * theta[3] / a ** 2, theta[4] / a ** 2
    z = theta @ feats
    zmax = z.max()
    log_int = math.log((np.exp(z - zmax) * W).sum()) + zmax + 2.0 * math.log(a)
    params = MEDensityParams(float(1.0 - log_int), (float(lam[0]), float(lam[1])), ((float(q11), float(q12)), (float(q12), float(q22))), a)
    res = moment_residuals(params, moments, quad_order)
    if np.max(np.abs(res)) >= tol:
        raise MaxEntError(f"moment residual {np.max(np.abs(res)):.3e} above tol {tol:.1e}")
    return params


def spatial_factor_F(params: MEDensityParams, quad_order: int = 40) -> float:
    """Integral of the square root of the density over the square."""
    X, Y, W = gauss_legendre_grid(params.a, quad_order)
    vals = np.exp(0.5 * params.exponent(X, Y))
    F = float((vals * W).sum())
    if not (F > 0 and math.isfinite(F)):
        raise MaxEntError(f"quadrature of sqrt density failed: {F}")
    return F


def binomial_pmf(k: int, m: int, p: float) -> float:
    if not (0 <= k <= m) or not (0.0 <= p <= 1.0):
        raise ValueError(f"need 0 <= k <= m and 0 <= p <= 1, got k={k}, m={m}, p={p}")
    # Python's 0.0 ** 0 is 1.0, which is the convention wanted at p in {0, 1}
    return math.comb(m, k) * p ** k * (1.0 - p) ** (m - k)


def _check_mu_g(mu_g, m):
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if float(mu_g) != int(mu_g):
        raise ValueError(f"mean slot index must be an integer, got {mu_g}")
    mu_g = int(mu_g)
    if not 1 <= mu_g <= m:
        raise ValueError(f"mean slot index {mu_g} outside [1, {m}]")
    return mu_g


def f1(mu_g, m: int) -> float:
    """``m^2`` times the binomial mass at its mean slot."""
    mu_g = _check_mu_g(mu_g, m)
    return m * m * binomial_pmf(mu_g, m, mu_g / m)


def f2(mu_g, m: int) -> float:
    """Sum over slots 1..m of the square roots of the binomial masses."""
    mu_g = _check_mu_g(mu_g, m)
    p = mu_g / m
    return math.fsum(math.sqrt(binomial_pmf(k, m, p)) for k in range(1, m + 1))


def _spatial_F(area, spatial, quad_order):
    a = math.sqrt(area)
    if spatial is None:
        return a
    params = solve_spatial_me(spatial, a, quad_order)
    return spatial_factor_F(params, quad_order)


def wc_mits_length(n: int, m: int, area: float, spatial: Optional[SpatialMoments] = None,
                   temporal: Optional[int] = None, quad_order: int = 40) -> float:
    """Worst-case identical-slot tour length under optional moment constraints.

    Without a temporal constraint the slot factor is ``sqrt(m)``; with a mean
    slot index it becomes ``f2``. The spatial factor is ``sqrt(area)`` unless
    moments are given, in which case it is ``F`` of the fitted density.
    """
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    slot_factor = math.sqrt(m) if temporal is None else f2(temporal, m)
    F = _spatial_F(area, spatial, quad_order)
    return beta_lookup(n) * math.sqrt(n) * slot_factor * F


class WorstCaseFeasibility(NamedTuple):
    feasible: bool
    lhs: float
    threshold: float


def wc_satisfiability(n: int, m: int, area: float, h: float,
                      spatial: Optional[SpatialMoments] = None, temporal: Optional[int] = None,
                      quad_order: int = 40) -> WorstCaseFeasibility:
    """Compare ``n*m`` (or ``n*f1``) with ``h^2 / (beta F)^2``."""
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    lhs = n * (m if temporal is None else f1(temporal, m))
    F = _spatial_F(area, spatial, quad_order)
    threshold = h * h / (beta_lookup(n) * F) ** 2
    return WorstCaseFeasibility(lhs <= threshold, lhs, threshold)
