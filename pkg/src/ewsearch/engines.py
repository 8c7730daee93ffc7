"""Cutting-plane engines for convex feasibility with a separation oracle.

An oracle is called with a query point ``y`` and returns ``None`` when
``y`` lies in the target set ``K'``, otherwise a normal ``g`` such that
``K'`` is contained in ``{x : g·x <= g·y}`` (a central cut through ``y``).

Both engines start from a region around the origin of radius ``R`` and stop
with ``empty`` once the region is provably too small to hold a ball of
radius ``delta_prime``.  An optional ``certify_empty(center, shape)`` hook
may stop earlier when the current outer ellipsoid
``{x : (x - center)^T shape^{-1} (x - center) <= 1}`` is known to miss ``K'``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

Oracle = Callable[[np.ndarray], Optional[np.ndarray]]
EmptyCheck = Callable[[np.ndarray, np.ndarray], bool]


def iteration_cap(n: int, R: float, delta_prime: float) -> int:
    """``ceil(2 n (n+1) ln(R / delta')) + 1``."""
    return int(math.ceil(2 * n * (n + 1) * math.log(max(R / delta_prime, 1.0)))) + 1


def shrink_bound(n: int) -> float:
    """Guaranteed per-step volume factor of a central-cut ellipsoid update."""
    return math.exp(-1.0 / (2 * (n + 1)))


@dataclass
class FeasResult:
    status: str  # "point" | "empty" | "unverified"
    point: np.ndarray | None
    iterations: int
    cap: int
    reason: str = ""
    log_det_ratios: list = field(default_factory=list)
    center: np.ndarray | None = None
    shape: np.ndarray | None = None


def feas_cutting_plane(oracle: Oracle, n: int, R: float, delta_prime: float,
                       certify_empty: EmptyCheck | None = None,
                       max_iter: int | None = None) -> FeasResult:
    """Central-cut ellipsoid method starting from the ball of radius ``R``.

    Halts with ``empty`` when the ellipsoid volume drops below that of a
    ``delta_prime`` ball.  The iteration count is hard-capped at
    :func:`iteration_cap`; a smaller ``max_iter`` that runs out first gives
    ``unverified``.

    The ellipsoid is kept as ``{omega + L u : ||u|| <= 1}`` and ``L`` is
    updated by a rank-one factor, so the shape ``P = L L^T`` stays positive
    definite even when it becomes very ill-conditioned.
    """
    if n < 1 or R <= 0 or delta_prime <= 0:
        raise ValueError("need n >= 1, R > 0, delta_prime > 0")
    proven = iteration_cap(n, R, delta_prime)
    cap = proven if max_iter is None else min(proven, max_iter)
    omega = np.zeros(n)
    L = np.eye(n) * R
    log_floor = 2 * n * math.log(delta_prime)  # log det of the delta'-ball shape
    logdet = 2 * n * math.log(R)
    if n > 1:
        scale = n / math.sqrt(n * n - 1.0)
        shrink = 1.0 - math.sqrt((n - 1.0) / (n + 1.0))
    ratios = []
    it = 0
    while it < cap:
        it += 1
        g = oracle(omega)
        if g is None:
            return FeasResult("point", omega.copy(), it, cap, "", ratios, omega, L @ L.T)
        g = np.asarray(g, dtype=float)
        h = L.T @ g
        hn = float(np.linalg.norm(h))
        if not hn > 0 or not np.isfinite(hn):
            return FeasResult("unverified", None, it, cap, "degenerate cut normal",
                              ratios, omega, L @ L.T)
        h /= hn
        Lh = L @ h
        if n == 1:
            omega = omega - Lh / 2
            L = L / 2
        else:
            omega = omega - Lh / (n + 1)
            L = scale * (L - shrink * np.outer(Lh, h))
        sign, new_logdet = np.linalg.slogdet(L)
        new_logdet *= 2
        if sign == 0 or not np.isfinite(new_logdet):
            return FeasResult("unverified", None, it, cap, "shape matrix lost positive definiteness",
                              ratios, omega, L @ L.T)
        ratios.append(new_logdet - logdet)
        logdet = new_logdet
        if logdet < log_floor:
            return FeasResult("empty", None, it, cap, "volume floor", ratios, omega, L @ L.T)
        if certify_empty is not None and certify_empty(omega, L @ L.T):
            return FeasResult("empty", None, it, cap, "certified", ratios, omega, L @ L.T)
    if cap < proven:
        # stopped by the caller's budget before the volume bound applies
        return FeasResult("unverified", None, it, cap, "iteration budget exhausted",
                          ratios, omega, L @ L.T)
    return FeasResult("empty", None, it, cap, "iteration cap", ratios, omega, L @ L.T)


def _analytic_center(A: np.ndarray, b: np.ndarray, x: np.ndarray, iters: int = 100,
                     tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray] | None:
    """Damped Newton for the minimizer of ``-sum log(b - A x)``; needs a strictly feasible start."""
    for _ in range(iters):
        s = b - A @ x
        if np.any(s <= 0):
            return None
        grad = A.T @ (1.0 / s)
        H = (A / s[:, None] ** 2).T @ A
        try:
            dx = -np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            return None
        lam2 = float(-grad @ dx)
        if lam2 < tol:
            return x, H
        step = 1.0 if lam2 < 0.0625 else 1.0 / (1.0 + math.sqrt(lam2))
        # stay strictly inside
        Adx = A @ dx
        neg = Adx > 0
        if np.any(neg):
            step = min(step, 0.99 * float(np.min(s[neg] / Adx[neg])))
        x = x + step * dx
    s = b - A @ x
    return x, (A / s[:, None] ** 2).T @ A


def feas_analytic_center(oracle: Oracle, n: int, R: float, delta_prime: float,
                         certify_empty: EmptyCheck | None = None,
                         max_iter: int | None = None) -> FeasResult:
    """Analytic-centre cutting-plane method over the box ``[-R, R]^n``.

    The polytope of ``m`` constraints lies inside ``{x : ||x - x_ac||_H^2 <= m(m-1)}``
    around its analytic centre, so the stopping test compares that outer
    ellipsoid with the ``delta_prime`` ball.  No iteration bound is proved;
    hitting the cap gives ``unverified``.
    """
    if n < 1 or R <= 0 or delta_prime <= 0:
        raise ValueError("need n >= 1, R > 0, delta_prime > 0")
    cap = iteration_cap(n, R * math.sqrt(n), delta_prime)
    if max_iter is not None:
        cap = min(cap, max_iter)
    A = np.vstack([np.eye(n), -np.eye(n)])
    b = np.full(2 * n, float(R))
    x = np.zeros(n)
    H = (A / b[:, None] ** 2).T @ A
    log_floor = 2 * n * math.log(delta_prime)
    it = 0
    while it < cap:
        it += 1
        g = oracle(x)
        if g is None:
            return FeasResult("point", x.copy(), it, cap, "", [], x, None)
        g = np.asarray(g, dtype=float)
        Hinv_g = np.linalg.solve(H, g)
        gHg = float(g @ Hinv_g)
        if not gHg > 0:
            return FeasResult("unverified", None, it, cap, "degenerate cut normal")
        A = np.vstack([A, g])
        b = np.append(b, g @ x)
        start = x - 0.5 * Hinv_g / math.sqrt(gHg)
        res = _analytic_center(A, b, start)
        if res is None:
            return FeasResult("unverified", None, it, cap, "analytic centre failed")
        x, H = res
        m = len(b)
        shape = m * (m - 1) * np.linalg.inv(H)
        sign, logdet = np.linalg.slogdet(shape)
        if sign <= 0:
            return FeasResult("unverified", None, it, cap, "singular Hessian")
        if logdet < log_floor:
            return FeasResult("empty", None, it, cap, "volume floor", [], x, shape)
        if certify_empty is not None and certify_empty(x, shape):
            return FeasResult("empty", None, it, cap, "certified", [], x, shape)
    return FeasResult("unverified", None, it, cap, "iteration cap")


ENGINES = {"ellipsoid": feas_cutting_plane, "accp": feas_analytic_center}
