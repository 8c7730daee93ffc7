"""Quantum states: Bell states, Pauli operators, product states, PPT test."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .basis import HermitianOp, DimensionError, tensor

PSD_TOL = 1e-10
PPT_TOL = 1e-10

_BELL_ALIASES = {
    "psi+": "psi+", "ψ+": "psi+", "ψ⁺": "psi+",
    "psi-": "psi-", "ψ-": "psi-", "ψ⁻": "psi-",
    "phi+": "phi+", "φ+": "phi+", "φ⁺": "phi+",
    "phi-": "phi-", "φ-": "phi-", "φ⁻": "phi-",
}

# |psi±> = (|00> ± |11>)/sqrt2,  |phi±> = (|01> ± |10>)/sqrt2
_BELL_VECTORS = {
    "psi+": np.array([1, 0, 0, 1]) / np.sqrt(2),
    "psi-": np.array([1, 0, 0, -1]) / np.sqrt(2),
    "phi+": np.array([0, 1, 1, 0]) / np.sqrt(2),
    "phi-": np.array([0, 1, -1, 0]) / np.sqrt(2),
}

BELL_NAMES = ("psi+", "psi-", "phi+", "phi-")


class DensityMatrix(HermitianOp):
    """Positive semidefinite, unit-trace Hermitian operator."""

    def __post_init__(self):
        super().__post_init__()
        tr = np.trace(self.matrix).real
        if abs(tr - 1.0) > PSD_TOL:
            raise ValueError(f"density matrix must have unit trace, got {tr:.12g}")
        lmin = np.linalg.eigvalsh(self.matrix)[0]
        if lmin < -PSD_TOL:
            raise ValueError(f"density matrix is not positive semidefinite (min eig {lmin:.3g})")

    @classmethod
    def from_op(cls, op: HermitianOp) -> "DensityMatrix":
        return cls(op.matrix, op.dim_a, op.dim_b)

    def __repr__(self):
        return f"DensityMatrix(dims={self.dims})"


def _gauge(v: np.ndarray) -> np.ndarray:
    """Normalize and rotate the global phase so the first nonzero entry is real >= 0."""
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if nz.size:
        ph = v[nz[0]]
        v = v * (abs(ph) / ph)
    return v


@dataclass(frozen=True, eq=False)
class ProductState:
    """Pure product state |alpha> (x) |beta>, stored in a fixed phase gauge."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = np.asarray(getattr(self, name), dtype=complex).reshape(-1)
            if v.size < 2:
                raise DimensionError(f"{name} must have dimension >= 2")
            n = np.linalg.norm(v)
            if n == 0 or not np.isfinite(n):
                raise ValueError(f"{name} must be a nonzero finite vector")
            v = _gauge(v)
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @property
    def dims(self) -> tuple[int, int]:
        return (len(self.alpha), len(self.beta))

    @property
    def vector(self) -> np.ndarray:
        return np.kron(self.alpha, self.beta)

    def density(self) -> DensityMatrix:
        return product_state_density(self)


def bell_vector(which: str) -> np.ndarray:
    try:
        return _BELL_VECTORS[_BELL_ALIASES[which]].astype(complex)
    except KeyError:
        raise ValueError(f"unknown Bell state {which!r}; expected one of {BELL_NAMES}") from None


def bell_state(which: str) -> DensityMatrix:
    """Projector onto a Bell vector: psi± = (|00>±|11>)/√2, phi± = (|01>±|10>)/√2."""
    v = bell_vector(which)
    return DensityMatrix(np.outer(v, v.conj()), 2, 2)


_PAULI = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex) / np.sqrt(2)
_PAULI.setflags(write=False)


def pauli(i: int) -> np.ndarray:
    """Single-qubit Pauli matrix scaled by 1/√2, so that ``tr(σ_i σ_j) = δ_ij``."""
    if i not in (0, 1, 2, 3):
        raise IndexError(f"Pauli index must be 0..3, got {i}")
    return _PAULI[i].copy()


def pauli_product(i: int, j: int) -> HermitianOp:
    """``σ_i ⊗ σ_j`` on two qubits."""
    return tensor(pauli(i), pauli(j))


def expectation(A: HermitianOp, rho: HermitianOp) -> float:
    """``tr(A rho)``."""
    if A.dims != rho.dims:
        raise DimensionError(f"dims {A.dims} != {rho.dims}")
    return float(np.einsum("ij,ji->", A.matrix, rho.matrix).real)


def product_state_density(s: ProductState) -> DensityMatrix:
    v = s.vector
    return DensityMatrix(np.outer(v, v.conj()), *s.dims)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_vectors(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """``count`` Haar-random unit vectors in C^dim, shape ``(count, dim)``."""
    z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_product_state(dim_a: int, dim_b: int, seed=None) -> ProductState:
    """Haar-uniform product state; reproducible for an integer seed."""
    if dim_a < 2 or dim_b < 2:
        raise DimensionError("dimensions must be >= 2")
    rng = _rng(seed)
    return ProductState(haar_vectors(rng, 1, dim_a)[0], haar_vectors(rng, 1, dim_b)[0])


def random_density_matrix(dim_a: int, dim_b: int, seed=None, rank: int | None = None) -> DensityMatrix:
    """Normalized Wishart product ``G G^dag / tr``, full rank by default."""
    rng = _rng(seed)
    d = dim_a * dim_b
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real, dim_a, dim_b)


def random_separable_state(dim_a: int, dim_b: int, seed=None, terms: int = 8) -> DensityMatrix:
    """Random convex mixture of ``terms`` Haar product states."""
    rng = _rng(seed)
    al = haar_vectors(rng, terms, dim_a)
    be = haar_vectors(rng, terms, dim_b)
    w = rng.dirichlet(np.ones(terms))
    vecs = np.einsum("si,sj->sij", al, be).reshape(terms, -1)
    rho = np.einsum("s,si,sj->ij", w, vecs, vecs.conj())
    return DensityMatrix(rho, dim_a, dim_b)


def maximally_mixed(dim_a: int, dim_b: int) -> DensityMatrix:
    d = dim_a * dim_b
    return DensityMatrix(np.eye(d) / d, dim_a, dim_b)


def werner(p: float, which: str = "psi+") -> DensityMatrix:
    """``p |B><B| + (1-p) I/4`` for a Bell state ``B``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing weight must lie in [0, 1], got {p}")
    b = bell_state(which).matrix
    return DensityMatrix(p * b + (1 - p) * np.eye(4) / 4, 2, 2)


def partial_transpose(A: HermitianOp) -> np.ndarray:
    """Transpose on the second tensor factor."""
    m, n = A.dims
    t = A.matrix.reshape(m, n, m, n)
    return t.transpose(0, 3, 2, 1).reshape(m * n, m * n)


class PPTResult(NamedTuple):
    is_ppt: bool
    min_eigenvalue: float
    exact: bool  # True when PPT is equivalent to separability (MN <= 6)
    boundary: bool  # min eigenvalue within tolerance of zero


def ppt_check(rho: HermitianOp, tol: float = PPT_TOL) -> PPTResult:
    """Peres-Horodecki test on the partial transpose over the second factor.

    For ``MN <= 6`` a PPT state is separable; in larger dimensions a PPT
    verdict is necessary-only (``exact`` is False).
    """
    lmin = float(np.linalg.eigvalsh(partial_transpose(rho))[0])
    return PPTResult(lmin >= -tol, lmin, rho.dim <= 6, abs(lmin) <= tol)
