"""Weak separation of a measured point from the projected separable set.

Let ``K`` be the projection of the separable states onto ``span{X_i : i in T}``
and ``p`` the measured coefficients.  ``p`` can be separated from ``K`` iff

    Q_p = K* ∩ {c : p·c >= 1},       K* = {c : c·x <= 1 for all x in K}

is nonempty, and any ``c`` in ``Q_p`` is a witness direction.  Membership in
``K*`` is decided by maximizing ``c·x`` over product states; when the
maximum ``b`` exceeds 1 the maximizer ``k`` gives the cut ``k·c <= 1``.
A cutting-plane engine then either finds a point of ``Q_p`` or shrinks its
outer approximation below a ``δ'``-ball, which asserts ``p ∈ S(K, δ)``.

Every cut comes from a genuine product state, so a membership verdict does
not depend on the optimizer finding global maxima.  A witness does, and is
therefore re-verified with an escalated budget and random separable samples
before it is emitted.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import linprog

from .basis import CoeffVector, ObservableBasis, build_basis, devectorize
from .engines import ENGINES, FeasResult, iteration_cap
from .optimizer import OptConfig, weak_opt_oracle
from .states import haar_vectors
from .witness import Witness, classify, Detection, detect

SCHEMA_VERSION = 1
SAMPLE_SLACK = 1e-8


def separable_ball_radius(dim_a: int, dim_b: int) -> float:
    """Radius ``1/sqrt(d(d-1))``, ``d = MN``, of the separable ball around ``I/d``.

    In Bloch coordinates this ball is centred at the origin, and its
    projection onto any coordinate subspace keeps the radius.
    """
    d = dim_a * dim_b
    return 1.0 / math.sqrt(d * (d - 1))


@dataclass(frozen=True)
class TargetPoint:
    """Measured coefficients ``p`` with weak tolerance ``delta`` and error radius ``Δ``."""

    coords: CoeffVector
    delta: float
    error_radius: float = 0.0
    dims: tuple[int, int] | None = None

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.error_radius < 0:
            raise ValueError("error radius must be non-negative")
        if len(self.coords) == 0:
            raise ValueError("index set T must be nonempty")

    @property
    def indices(self) -> np.ndarray:
        return self.coords.indices

    @property
    def values(self) -> np.ndarray:
        return self.coords.values


@dataclass(frozen=True)
class SolverConfig:
    opt: OptConfig = OptConfig()
    engine: str = "ellipsoid"
    samples: int = 1000
    sample_seed: int = 7
    max_iter: int | None = None

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}; choose from {sorted(ENGINES)}")


@dataclass(frozen=True, eq=False)
class OuterApprox:
    """Ellipsoid ``{x : (x - center)^T shape^{-1} (x - center) <= 1}``."""

    center: np.ndarray
    shape: np.ndarray
    kind: str = "ellipsoid"

    def __post_init__(self):
        np.linalg.cholesky(self.shape)

    def max_linear(self, a: np.ndarray) -> float:
        """``max a·x`` over the ellipsoid."""
        return _max_linear(self.center, self.shape, a)


def _max_linear(center: np.ndarray, shape: np.ndarray, a: np.ndarray) -> float:
    return float(a @ center + math.sqrt(max(a @ shape @ a, 0.0)))


@dataclass(eq=False)
class SeparationVerdict:
    outcome: str  # "witness" | "member" | "unverified"
    c: CoeffVector | None = None
    threshold: float | None = None
    tightened: Witness | None = None
    delta_effective: float | None = None
    boundary: bool = False
    robust: bool | None = None
    margin: float | None = None
    gauge: float | None = None  # member: separable-decomposition weight (<= 1 certifies)
    reason: str = ""
    iterations: int = 0
    oracle_calls: int = 0
    wall_time: float = 0.0
    engine: str = "ellipsoid"
    iteration_cap: int = 0
    log_det_ratios: list = field(default_factory=list, repr=False)

    def to_dict(self, basis: ObservableBasis | None = None, timing: bool = True) -> dict:
        out = {
            "schema": SCHEMA_VERSION,
            "outcome": self.outcome,
            "boundary": self.boundary,
            "engine": self.engine,
            "iterations": self.iterations,
            "iteration_cap": self.iteration_cap,
            "oracle_calls": self.oracle_calls,
            "wall_time": round(self.wall_time, 6) if timing else None,
        }
        if self.outcome == "witness":
            w = self.tightened
            labels = [basis.label(int(i)) for i in self.c.indices] if basis else None
            out["witness"] = {
                "indices": self.c.indices.tolist(),
                "labels": labels,
                "coefficients": self.c.values.tolist(),
                "threshold": self.threshold,
                "a_star": w.a_star,
                "b_star": w.b_star,
                "handedness": w.handedness.value,
                "margin": self.margin,
                "robust": self.robust,
                "expression": render_combination(self.c, basis) if basis else None,
                "verification_budget": w.verification_budget.to_dict(),
            }
        elif self.outcome == "member":
            out["delta_effective"] = self.delta_effective
            out["gauge"] = self.gauge
        else:
            out["reason"] = self.reason
        return out


def render_combination(c: CoeffVector, basis: ObservableBasis, digits: int = 6) -> str:
    """``0.5*σ1⊗σ1 - 0.5*σ2⊗σ2`` style rendering of a coefficient vector."""
    terms = []
    for i, v in zip(c.indices, c.values):
        v = round(float(v), digits)
        if v == 0:
            continue
        sign = "-" if v < 0 else "+"
        terms.append(f"{sign} {abs(v):.{digits}g}*{basis.label(int(i))}")
    if not terms:
        return "0"
    s = " ".join(terms)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


# --- oracles ----------------------------------------------------------------

class PolarAnswer(NamedTuple):
    in_polar: bool
    cut: CoeffVector | None  # maximizer k in K when y is not in K*
    value: float  # b = max_K y·x
    converged: bool


def ssep_polar(y: CoeffVector, basis: ObservableBasis, cfg: OptConfig | None = None,
               early_cut: bool = True) -> PolarAnswer:
    """Separation for the polar set via the product-state optimizer.

    Any product state ``k`` with ``y·k > 1`` already separates ``y`` from
    ``K*``, so by default the search stops at the first such state
    (``value`` is then a lower bound on ``b``).
    """
    if not np.any(y.values):
        return PolarAnswer(True, None, 0.0, True)
    ans = weak_opt_oracle(y, basis, cfg, 1.0 if early_cut else None)
    if ans.value <= 1.0:
        return PolarAnswer(True, None, ans.value, ans.converged)
    return PolarAnswer(False, ans.point, ans.value, ans.converged)


class QpAnswer(NamedTuple):
    in_qp: bool
    cut: np.ndarray | None  # normal g with Q_p inside {g·c <= offset}
    offset: float | None
    kind: str  # "plane" (the p·c >= 1 constraint), "polar", or "" when inside


def ssep_qp(y: CoeffVector, p: TargetPoint, basis: ObservableBasis,
            cfg: OptConfig | None = None) -> QpAnswer:
    """Separation for ``Q_p``: cut ``-p`` if ``p·y < 1``, else defer to the polar oracle."""
    pv = p.values
    if float(pv @ y.values) < 1.0:
        return QpAnswer(False, -pv.copy(), -1.0, "plane")
    ans = ssep_polar(y, basis, cfg)
    if ans.in_polar:
        return QpAnswer(True, None, None, "")
    return QpAnswer(False, ans.cut.values.copy(), 1.0, "polar")


# --- sampling ---------------------------------------------------------------

def separable_samples(basis: ObservableBasis, indices, count: int, seed=0) -> np.ndarray:
    """Coordinates on ``indices`` of ``count`` Haar-random pure product states."""
    from .basis import factor_generators
    rng = np.random.default_rng(seed)
    m, n = basis.dims
    al = haar_vectors(rng, count, m)
    be = haar_vectors(rng, count, n)
    fa = np.einsum("si,aij,sj->sa", al.conj(), factor_generators(m), al).real
    fb = np.einsum("si,bij,sj->sb", be.conj(), factor_generators(n), be).real
    a_idx, b_idx = np.divmod(np.asarray(indices), n * n)
    return fa[:, a_idx] * fb[:, b_idx]


def separable_gauge(points: np.ndarray, p: np.ndarray) -> tuple[float, np.ndarray] | None:
    """Smallest ``sum w`` with ``w >= 0`` and ``sum_j w_j points_j = p``.

    The points are projections of product states, so a value ``g <= 1`` writes
    ``p`` as a mixture of them and the maximally mixed state: ``p`` is in
    ``K`` and the ball of radius ``(1 - g) r`` around it stays inside ``K``.
    Returns ``None`` if ``p`` is not in the cone of the points.
    """
    points = np.asarray(points, dtype=float)
    if len(points) == 0:
        return None
    res = linprog(np.ones(len(points)), A_eq=points.T, b_eq=p, bounds=(0, None), method="highs")
    if res.status != 0:
        return None
    return float(res.fun), res.x


def refine_gauge(pv: np.ndarray, idx, basis: ObservableBasis, cfg: OptConfig,
                 points=(), rounds: int = 20, goal: float = 0.0,
                 tol: float = 1e-9) -> float | None:
    """Tighten :func:`separable_gauge` by column generation.

    The LP dual ``max p·y s.t. k_j·y <= 1`` names the direction in which the
    current product-state points are weakest; the product state maximizing
    ``y·x`` (or any with ``y·x > 1``) is added until none improves on it or
    the value drops to ``goal``.  Every point is a real
    product state, so the returned value is always a valid upper bound.
    """
    n = len(idx)
    r = separable_ball_radius(*basis.dims)
    # the inner ball's axis points keep the LP feasible
    pts = list(np.vstack([r * np.eye(n), -r * np.eye(n)]))
    pts += [np.asarray(k, dtype=float) for k in points]
    for i in range(n):
        for s in (1.0, -1.0):
            e = np.zeros(n)
            e[i] = s
            pts.append(weak_opt_oracle(CoeffVector(idx, e), basis, cfg).point.values)
    best = None
    for _ in range(rounds):
        P = np.array(pts)
        res = linprog(np.ones(len(P)), A_eq=P.T, b_eq=pv, bounds=(0, None), method="highs")
        if res.status != 0:
            return best
        best = float(res.fun) if best is None else min(best, float(res.fun))
        if best <= goal:
            break
        y = np.asarray(res.eqlin.marginals)  # dual optimum: max p·y s.t. k_j·y <= 1
        if not np.any(y):
            break
        # any column with y·k > 1 improves the LP; no need for the maximum
        ans = weak_opt_oracle(CoeffVector(idx, y), basis, cfg, stop_above=1.0 + tol)
        if ans.value <= 1.0 + tol:
            break
        pts.append(ans.point.values)
    return best


# --- driver -----------------------------------------------------------------

def wsep(p: TargetPoint, basis: ObservableBasis | None = None,
         cfg: SolverConfig | None = None, dims: tuple[int, int] | None = None) -> SeparationVerdict:
    """Find an entanglement witness in ``span{X_i : i in T}`` or assert weak membership.

    The cutting-plane search runs over ``Q_p`` with initial radius
    ``R = 1/r`` (``r`` the separable-ball radius) and volume floor radius
    ``δ' = δ r / (1 + ||p||)``.  A found point ``c`` is tightened to the
    threshold ``b*(W)`` of ``W = sum c_i X_i`` at escalated budget.
    """
    t0 = time.perf_counter()
    cfg = cfg or SolverConfig()
    if basis is None:
        dims = dims or p.dims
        if dims is None:
            raise ValueError("need a basis or dims")
        basis = build_basis(*dims)
    idx = p.indices
    if idx.max() >= basis.size:
        raise IndexError("target index out of range for basis")
    pv = p.values
    n = len(idx)
    r = separable_ball_radius(*basis.dims)
    R = 1.0 / r
    pnorm = float(np.linalg.norm(pv))
    delta_prime = p.delta * r / (1.0 + pnorm)
    if pnorm <= r - 2 * p.delta:
        # well inside the separable ball around the maximally mixed state
        return SeparationVerdict("member", delta_effective=p.delta + p.error_radius,
                                 engine=cfg.engine,
                                 iteration_cap=iteration_cap(n, R, delta_prime),
                                 wall_time=time.perf_counter() - t0)
    escalated = cfg.opt.escalated()
    stats = {"calls": 0, "next_lp": n + 1, "gauge": None}
    cuts: list[np.ndarray] = []

    def oracle(omega: np.ndarray):
        y = CoeffVector(idx, omega)
        ans = ssep_qp(y, p, basis, cfg.opt)
        if ans.kind == "polar" or ans.in_qp:
            stats["calls"] += 1
        if ans.kind == "polar":
            cuts.append(ans.cut)
        if not ans.in_qp:
            return ans.cut
        # candidate point: confirm membership in K* at the escalated budget
        stats["calls"] += 1
        again = ssep_polar(y, basis, escalated)
        if not again.in_polar:
            return again.cut.values.copy()
        return None

    def certify_empty(center, shape):
        # the outer ellipsoid misses the halfspace p·c >= 1, so Q_p is empty
        if _max_linear(center, shape, pv) < 1.0:
            return True
        # p is a sub-unit conic combination of product states already found
        if len(cuts) >= stats["next_lp"]:
            stats["next_lp"] = max(len(cuts) + 10, int(1.25 * len(cuts)))
            g = separable_gauge(cuts, pv)
            if g is not None and g[0] <= 1.0:
                stats["gauge"] = g[0]
                return True
        return False

    engine = ENGINES[cfg.engine]
    res: FeasResult = engine(oracle, n, R, delta_prime, certify_empty, cfg.max_iter)

    common = dict(iterations=res.iterations, oracle_calls=stats["calls"], engine=cfg.engine,
                  iteration_cap=res.cap, log_det_ratios=res.log_det_ratios)

    if res.status == "empty":
        gauge = stats["gauge"]
        if gauge is None:
            g = separable_gauge(cuts, pv)
            gauge = g[0] if g is not None else None
        # certified depth of p inside K: from the decomposition, or from the inner ball
        depth = max(r - pnorm, (1.0 - gauge) * r if gauge is not None else 0.0)
        if depth < 2 * p.delta:
            refined = refine_gauge(pv, idx, basis, cfg.opt, cuts, goal=1.0 - 2 * p.delta / r)
            if refined is not None and (gauge is None or refined < gauge):
                gauge = refined
                depth = max(depth, (1.0 - gauge) * r)
        boundary = depth < 2 * p.delta
        return SeparationVerdict("member", delta_effective=p.delta + p.error_radius,
                                 boundary=boundary, gauge=gauge,
                                 wall_time=time.perf_counter() - t0, **common)
    if res.status == "unverified":
        return SeparationVerdict("unverified", reason=res.reason,
                                 wall_time=time.perf_counter() - t0, **common)

    c = CoeffVector(idx, res.point)
    W = devectorize(c, basis, 0.0)
    w = classify(W, escalated)
    stats["calls"] += 2
    threshold = w.b_star
    cp = float(c.values @ pv)
    cnorm = c.norm()
    margin = cp - threshold
    reasons = []
    if not margin > 0:
        reasons.append(f"c·p = {cp:.12g} does not exceed threshold {threshold:.12g}")
    if not w.verified:
        reasons.append("escalated optimizer did not converge")
    xs = separable_samples(basis, idx, cfg.samples, cfg.sample_seed)
    worst = float(np.max(xs @ c.values)) if cfg.samples else -np.inf
    if worst > threshold + SAMPLE_SLACK:
        reasons.append(f"separable sample exceeds threshold by {worst - threshold:.3g}")
    if detect(cp, w) is not Detection.ENTANGLED_RIGHT and not reasons:
        reasons.append("tightened witness does not detect the point")
    common["oracle_calls"] = stats["calls"]
    if reasons:
        return SeparationVerdict("unverified", reason="; ".join(reasons),
                                 wall_time=time.perf_counter() - t0, **common)
    return SeparationVerdict(
        "witness", c=c, threshold=threshold, tightened=w,
        boundary=margin / cnorm < 2 * p.delta,
        robust=margin > p.error_radius * cnorm,
        margin=margin,
        wall_time=time.perf_counter() - t0, **common)


def target_from_state(rho, indices=None, delta: float = 0.01, error_radius: float = 0.0,
                      basis: ObservableBasis | None = None) -> TargetPoint:
    """Exact coefficients of a known state on ``indices`` (all nontrivial ones by default)."""
    from .basis import vectorize
    basis = basis or build_basis(*rho.dims)
    return TargetPoint(vectorize(rho, basis, indices), delta, error_radius, dims=rho.dims)
