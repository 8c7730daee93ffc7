"""Multistart seesaw maximization of <αβ|A|αβ> over pure product states.

Each seesaw half-step fixes one factor and replaces the other by the top
eigenvector of the reduced matrix, e.g. ``B_β = (I ⊗ <β|) A (I ⊗ |β>)``.
That step maximizes a Rayleigh quotient exactly, so the objective never
decreases.  The method is local; globality is approached with many random
starts and the gap between the best two distinct optima is reported.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .basis import CoeffVector, HermitianOp, ObservableBasis, coefficients
from .states import ProductState, haar_vectors

# relative slack for the per-half-step ascent assertion
_ASCENT_SLACK = 1e-10
_DEGEN_TOL = 1e-12
_DISTINCT_TOL = 1e-8


@dataclass(frozen=True)
class OptConfig:
    """Budget for the multistart seesaw.

    ``escalation`` multiplies ``starts`` when a result must be re-verified.
    """

    starts: int = 50
    max_iter: int = 500
    tol: float = 1e-10
    seed: int = 0
    escalation: int = 10

    def __post_init__(self):
        if self.starts < 1 or self.max_iter < 1 or self.tol <= 0 or self.escalation < 1:
            raise ValueError(f"invalid optimizer config {self}")

    def escalated(self) -> "OptConfig":
        return dataclasses.replace(self, starts=self.starts * self.escalation, seed=self.seed + 1)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True, eq=False)
class OptResult:
    value: float
    argmax: ProductState
    starts_used: int
    converged: bool
    spread: float
    iterations: int = 0


def _top_vectors(mats: np.ndarray, prev: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Top eigenpair of each matrix in a batch.

    Within a degenerate top eigenspace the vector closest to ``prev`` is
    chosen (its normalized projection); if ``prev`` is orthogonal to the
    eigenspace the lowest-index eigenvector is used.
    """
    w, v = np.linalg.eigh(mats)
    top = w[:, -1]
    scale = 1.0 + np.abs(w).max(axis=1)
    mask = w >= (top - _DEGEN_TOL * scale)[:, None]
    coef = np.einsum("sji,sj->si", v.conj(), prev) * mask
    proj = np.einsum("sij,sj->si", v, coef)
    nrm = np.linalg.norm(proj, axis=1)
    first = np.argmax(mask, axis=1)
    fallback = v[np.arange(len(v)), :, first]
    ok = nrm > 1e-8
    out = np.where(ok[:, None], proj / np.where(ok, nrm, 1.0)[:, None], fallback)
    return top, out


def _expect(T: np.ndarray, al: np.ndarray, be: np.ndarray) -> np.ndarray:
    return np.einsum("ijkl,si,sj,sk,sl->s", T, al.conj(), be.conj(), al, be, optimize=True).real


def seesaw(mat: np.ndarray, dims: tuple[int, int], alphas: np.ndarray, betas: np.ndarray,
           max_iter: int = 500, tol: float = 1e-10, trace: list | None = None,
           stop_above: float | None = None):
    """Run batched seesaw ascent from the given start vectors.

    Returns ``(values, alphas, betas, converged, iterations)``.  When
    ``trace`` is a list, the objective after every half-step is appended as
    an array over starts.  With ``stop_above`` set, the run ends as soon as
    any start exceeds that value (callers that only need such a state).
    """
    m, n = dims
    T = np.ascontiguousarray(mat).reshape(m, n, m, n)
    al = np.array(alphas, dtype=complex)
    be = np.array(betas, dtype=complex)
    s = len(al)
    vals = _expect(T, al, be)
    if trace is not None:
        trace.append(vals.copy())
    slack = _ASCENT_SLACK * (1.0 + np.abs(mat).max())
    active = np.arange(s)
    converged = np.zeros(s, dtype=bool)
    it = 0
    while it < max_iter and active.size:
        it += 1
        a, b = al[active], be[active]
        old = vals[active]
        Bb = np.einsum("ijkl,sj,sl->sik", T, b.conj(), b)
        mid, a = _top_vectors(Bb, a)
        Ca = np.einsum("ijkl,si,sk->sjl", T, a.conj(), a)
        new, b = _top_vectors(Ca, b)
        if np.any(mid < old - slack) or np.any(new < mid - slack):
            raise RuntimeError("seesaw objective decreased; eigen-solver inconsistency")
        al[active], be[active] = a, b
        vals[active] = new
        if trace is not None:
            step = vals.copy()
            step[active] = mid
            trace.append(step)
            trace.append(vals.copy())
        done = np.abs(new - old) < tol
        converged[active[done]] = True
        active = active[~done]
        if stop_above is not None and np.any(new > stop_above):
            break
    return vals, al, be, converged, it


def _distinct_spread(vals: np.ndarray) -> float:
    v = np.sort(vals)[::-1]
    lower = v[v < v[0] - _DISTINCT_TOL]
    return float(v[0] - lower[0]) if lower.size else 0.0


def max_over_products_matrix(mat: np.ndarray, dims: tuple[int, int],
                             cfg: OptConfig | None = None,
                             stop_above: float | None = None) -> OptResult:
    """:func:`max_over_products` on a raw Hermitian matrix (no validation).

    ``stop_above`` returns early with the first product state whose value
    exceeds it; the result is then not a maximum.
    """
    cfg = cfg or OptConfig()
    rng = np.random.default_rng(cfg.seed)
    m, n = dims
    al = haar_vectors(rng, cfg.starts, m)
    be = haar_vectors(rng, cfg.starts, n)
    vals, al, be, conv, it = seesaw(mat, dims, al, be, cfg.max_iter, cfg.tol,
                                    stop_above=stop_above)
    # ties resolved by lowest start index
    best = int(np.argmax(vals))
    state = ProductState(al[best], be[best])
    v = state.vector
    value = float(np.vdot(v, mat @ v).real)
    return OptResult(value, state, cfg.starts, bool(conv[best]), _distinct_spread(vals), it)


def max_over_products(A: HermitianOp, cfg: OptConfig | None = None) -> OptResult:
    """Largest ``<αβ|A|αβ>`` found by multistart seesaw; a lower bound on b*(A)."""
    return max_over_products_matrix(A.matrix, A.dims, cfg)


def min_over_products(A: HermitianOp, cfg: OptConfig | None = None) -> OptResult:
    """Smallest ``<αβ|A|αβ>`` found; an upper bound on a*(A)."""
    r = max_over_products_matrix(-A.matrix, A.dims, cfg)
    return dataclasses.replace(r, value=-r.value)


class OracleAnswer(NamedTuple):
    point: CoeffVector
    value: float
    converged: bool


def product_coefficients(state: ProductState, basis: ObservableBasis, indices) -> np.ndarray:
    v = state.vector
    return coefficients(np.outer(v, v.conj()), basis, indices)


def weak_opt_oracle(c: CoeffVector, basis: ObservableBasis, cfg: OptConfig | None = None,
                    stop_above: float | None = None) -> OracleAnswer:
    """Maximize ``c·x`` over the projection of the separable set onto ``span{X_i : i in T}``.

    Returns the projected maximizer ``y`` and ``c·y``.  The projected set
    always contains a ball around the origin, so it is never reported empty.
    ``stop_above`` is passed to the seesaw (see :func:`max_over_products_matrix`).
    """
    idx = c.indices
    mat = np.tensordot(c.values, basis.elements[idx], axes=1)
    res = max_over_products_matrix(mat, basis.dims, cfg, stop_above)
    y = product_coefficients(res.argmax, basis, idx)
    return OracleAnswer(CoeffVector(idx, y), float(c.values @ y), res.converged)


class Containment(NamedTuple):
    contains: bool
    best_overlap: float
    witness_state: ProductState


def subspace_contains_product(P: HermitianOp, cfg: OptConfig | None = None,
                              tol: float = 1e-9) -> Containment:
    """Does the range of projector ``P`` contain a product vector?

    Maximizes ``<αβ|P|αβ>``; the range contains a product state iff this
    maximum is 1.
    """
    if np.max(np.abs(P.matrix @ P.matrix - P.matrix)) > 1e-9:
        raise ValueError("operator is not an orthogonal projector")
    r = max_over_products(P, cfg)
    return Containment(r.value >= 1.0 - tol, r.value, r.argmax)
