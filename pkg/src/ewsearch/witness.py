"""Left, right and ambidextrous entanglement witnesses.

For a Hermitian ``A`` let ``a*(A)`` and ``b*(A)`` be the minimum and maximum
of ``<ψ|A|ψ>`` over pure product states.  ``A`` is a left witness when some
state has ``<A> < a*`` and a right witness when some state has ``<A> > b*``;
since the extreme values over all states are the extreme eigenvalues, this
is the test ``λ_min < a*`` (resp. ``λ_max > b*``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import NamedTuple, Sequence

import numpy as np

from .basis import (HermitianOp, ObservableBasis, CoeffVector, build_basis, devectorize,
                    projector, spectral_decomp, trace_part, vectorize, DimensionError)
from .optimizer import (OptConfig, max_over_products, min_over_products,
                        subspace_contains_product)
from .states import ProductState

HANDEDNESS_TOL = 1e-9


class Handedness(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    AMBIDEXTROUS = "ambidextrous"
    NONE = "none"

    @classmethod
    def from_flags(cls, left: bool, right: bool) -> "Handedness":
        if left and right:
            return cls.AMBIDEXTROUS
        if left:
            return cls.LEFT
        if right:
            return cls.RIGHT
        return cls.NONE

    @property
    def is_left(self) -> bool:
        return self in (Handedness.LEFT, Handedness.AMBIDEXTROUS)

    @property
    def is_right(self) -> bool:
        return self in (Handedness.RIGHT, Handedness.AMBIDEXTROUS)

    def mirror(self) -> "Handedness":
        return Handedness.from_flags(self.is_right, self.is_left)


class Detection(str, Enum):
    ENTANGLED_LEFT = "entangled_left"
    ENTANGLED_RIGHT = "entangled_right"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Sandwich:
    """The slab ``a* <= tr(Aσ) <= b*`` holding every separable state."""

    a_star: float
    b_star: float

    def __post_init__(self):
        if self.a_star > self.b_star:
            raise ValueError("sandwich requires a_star <= b_star")

    def contains(self, value: float) -> bool:
        return self.a_star <= value <= self.b_star


@dataclass(frozen=True, eq=False)
class Witness:
    op: HermitianOp
    a_star: float | None
    b_star: float | None
    handedness: Handedness
    verification_budget: OptConfig
    verified: bool = True
    boundary: bool = False
    notes: dict = field(default_factory=dict)

    @property
    def sandwich(self) -> Sandwich:
        return Sandwich(self.a_star, self.b_star)

    def to_dict(self, basis: ObservableBasis | None = None) -> dict:
        basis = basis or build_basis(*self.op.dims)
        return {
            "dims": list(self.op.dims),
            "basis_coefficients": vectorize(self.op, basis).values.tolist(),
            "trace_part": trace_part(self.op, basis),
            "a_star": self.a_star,
            "b_star": self.b_star,
            "handedness": self.handedness.value,
            "verification_budget": self.verification_budget.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Witness":
        basis = build_basis(*data["dims"])
        c = CoeffVector(np.arange(1, basis.size), data["basis_coefficients"])
        return cls(devectorize(c, basis, data["trace_part"]), data["a_star"], data["b_star"],
                   Handedness(data["handedness"]), OptConfig(**data["verification_budget"]))


def _check_nonzero(A: HermitianOp) -> None:
    if np.max(np.abs(A.matrix)) < 1e-14:
        raise ValueError("the zero operator cannot be a witness")


def _band(gap: float, tol: float) -> bool:
    # gap of the eigenvalue beyond the product-state extreme falls inside the tolerance band
    return 1e-12 < gap <= tol


def classify(A: HermitianOp, cfg: OptConfig | None = None, tol: float = HANDEDNESS_TOL) -> Witness:
    """Compute a*, b* by seesaw and compare them with the extreme eigenvalues."""
    _check_nonzero(A)
    cfg = cfg or OptConfig()
    w = np.linalg.eigvalsh(A.matrix)
    lo = min_over_products(A, cfg)
    hi = max_over_products(A, cfg)
    left_gap = lo.value - w[0]
    right_gap = w[-1] - hi.value
    return Witness(
        A, lo.value, hi.value,
        Handedness.from_flags(left_gap > tol, right_gap > tol),
        cfg,
        verified=lo.converged and hi.converged,
        boundary=_band(left_gap, tol) or _band(right_gap, tol),
        notes={"argmin": lo.argmax, "argmax": hi.argmax},
    )


def classify_spectral(A: HermitianOp, cfg: OptConfig | None = None,
                      tol: float = HANDEDNESS_TOL) -> Witness:
    """Handedness by scanning eigenvalue gaps for product-free eigenspaces.

    Left: some ``k`` with ``λ_{k+1} > λ_k`` such that the span of the bottom
    ``k+1`` eigenvectors contains no product vector.  Right: the mirror scan
    over top eigenspaces.
    """
    _check_nonzero(A)
    cfg = cfg or OptConfig()
    w, v = spectral_decomp(A)
    d = len(w)
    dims = A.dims

    left_k = None
    for k in range(d - 1):
        if w[k + 1] > w[k] + tol:
            if not subspace_contains_product(projector(v[:, :k + 1], *dims), cfg, tol).contains:
                left_k = k
            # larger spans contain every product vector of smaller ones
            break
    right_l = None
    for l in range(d - 1, 0, -1):
        if w[l] > w[l - 1] + tol:
            if not subspace_contains_product(projector(v[:, l:], *dims), cfg, tol).contains:
                right_l = l
            break

    lo = min_over_products(A, cfg)
    hi = max_over_products(A, cfg)
    return Witness(
        A, lo.value, hi.value,
        Handedness.from_flags(left_k is not None, right_l is not None),
        cfg,
        verified=lo.converged and hi.converged,
        notes={"left_k": left_k, "right_l": right_l},
    )


def detect(value: float, w: Witness, margin: float = 0.0) -> Detection:
    """Decide from a measured ``<A>`` whether the state lies outside the sandwich."""
    if w.handedness.is_left and value < w.a_star - margin:
        return Detection.ENTANGLED_LEFT
    if w.handedness.is_right and value > w.b_star + margin:
        return Detection.ENTANGLED_RIGHT
    return Detection.INCONCLUSIVE


class BellCheck(NamedTuple):
    entangled: bool
    bell: str | None  # implicated Bell state when exactly one inequality holds
    satisfied: tuple[str, ...]


def bell_inequality_check(e11: float, e22: float) -> BellCheck:
    """Four sufficient conditions from the sandwiches of σ1σ1 ∓ σ2σ2.

    ``e11 - e22 > 1/2`` (psi+), ``< -1/2`` (psi-), ``e11 + e22 > 1/2`` (phi+),
    ``< -1/2`` (phi-).
    """
    diff, tot = e11 - e22, e11 + e22
    sat = tuple(name for name, hit in (
        ("psi+", diff > 0.5), ("psi-", diff < -0.5),
        ("phi+", tot > 0.5), ("phi-", tot < -0.5)) if hit)
    return BellCheck(bool(sat), sat[0] if len(sat) == 1 else None, sat)


# --- unextendible product bases -------------------------------------------

def tiles_upb() -> list[ProductState]:
    """The five-state Tiles UPB of C^3 ⊗ C^3, checked on load."""
    raw = json.loads(resources.files("ewsearch.data").joinpath("tiles_upb.json").read_text())
    states = [ProductState(s["alpha"], s["beta"]) for s in raw["states"]]
    _check_orthonormal(np.array([s.vector for s in states]).T)
    return states


def _check_orthonormal(vecs: np.ndarray) -> None:
    gram = vecs.conj().T @ vecs
    if np.max(np.abs(gram - np.eye(gram.shape[0]))) > 1e-9:
        raise ValueError("states are not mutually orthonormal")


def upb_complement(states: Sequence[ProductState]) -> np.ndarray:
    """Orthonormal basis (columns) of the orthogonal complement of ``span(states)``."""
    if not states:
        raise ValueError("need at least one product state")
    dims = states[0].dims
    if any(s.dims != dims for s in states):
        raise DimensionError("product states have inconsistent dimensions")
    vecs = np.array([s.vector for s in states]).T
    _check_orthonormal(vecs)
    u, _, _ = np.linalg.svd(vecs, full_matrices=True)
    return u[:, len(states):]


def bound_entangled_state(states: Sequence[ProductState]) -> HermitianOp:
    """Normalized projector onto the complement of a UPB."""
    from .states import DensityMatrix
    comp = upb_complement(states)
    dims = states[0].dims
    return DensityMatrix(comp @ comp.conj().T / comp.shape[1], *dims)


def witness_from_upb(states: Sequence[ProductState], right: Sequence[int] = (),
                     entangled: Sequence[np.ndarray] = (), cfg: OptConfig | None = None,
                     unextendible: bool = True) -> Witness:
    """Witness built from a (claimed unextendible) product basis ``B``.

    The complement ``B'`` of ``span B`` is put in the -1 eigenspace.  Complement
    vectors listed by index in ``right`` go to the +1 eigenspace instead, as do
    the caller-supplied ``entangled`` vectors, which must lie in ``span B`` and
    span a product-free subspace.
    """
    cfg = cfg or OptConfig()
    if not all(isinstance(s, ProductState) for s in states):
        raise TypeError("basis members must be ProductState instances")
    comp = upb_complement(states)
    dims = states[0].dims
    if comp.shape[1] == 0:
        raise ValueError("product basis is complete; complement B' is empty")
    if unextendible:
        check = subspace_contains_product(projector(comp, *dims), cfg.escalated())
        if check.contains:
            raise ValueError(
                f"basis is extendible: complement contains a product state "
                f"(overlap {check.best_overlap:.12f})")

    right = sorted(set(int(i) for i in right))
    if right and (right[0] < 0 or right[-1] >= comp.shape[1]):
        raise IndexError("complement index out of range")
    left = [i for i in range(comp.shape[1]) if i not in right]
    if not left:
        raise ValueError("at least one complement vector must stay in the -1 eigenspace")
    mat = -comp[:, left] @ comp[:, left].conj().T
    if right:
        mat = mat + comp[:, right] @ comp[:, right].conj().T

    if len(entangled):
        ent = np.array(entangled, dtype=complex).T
        span_b = np.array([s.vector for s in states]).T
        if np.max(np.abs(span_b @ (span_b.conj().T @ ent) - ent)) > 1e-9:
            raise ValueError("entangled vectors must lie in the span of the product basis")
        _check_orthonormal(ent)
        if subspace_contains_product(projector(ent, *dims), cfg.escalated()).contains:
            raise ValueError("span of the entangled vectors contains a product state")
        mat = mat + ent @ ent.conj().T

    return classify(HermitianOp(mat, *dims), cfg)
