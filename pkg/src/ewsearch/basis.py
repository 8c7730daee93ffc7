"""Hermitian operators on C^M (x) C^N, tensor Gell-Mann bases and Bloch vectors.

Every operator in this package lives on a bipartite space and is stored as a
dense complex matrix.  A fixed orthonormal Hermitian basis ``{X_i}`` with
``X_0 = I / sqrt(MN)`` turns such operators into real coefficient vectors
``v(A)_i = tr(X_i A)``.  The basis is built from tensor products of the
normalized generalized Gell-Mann generators of each factor.

Factor generator ordering (for dimension ``d``)::

    0                     identity / sqrt(d)
    1 .. d(d-1)/2         symmetric   (|j><k| + |k><j|) / sqrt(2),        j < k
    ..  d(d-1)            antisymmetric (-i|j><k| + i|k><j|) / sqrt(2),   j < k
    ..  d^2 - 1           diagonal    (sum_{m<l} |m><m| - l|l><l|) / sqrt(l(l+1))

Pairs ``(j, k)`` run lexicographically.  For ``d = 2`` this gives
``I, X, Y, Z`` each scaled by ``1/sqrt(2)``.  The bipartite element with
factor indices ``(a, b)`` has flat index ``a * N**2 + b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

HERMITIAN_REJECT_TOL = 1e-8


class DimensionError(ValueError):
    """Raised for invalid or mismatched subsystem dimensions."""


@dataclass(frozen=True, eq=False)
class HermitianOp:
    """Dense Hermitian operator on C^dim_a (x) C^dim_b.

    The matrix is symmetrized as ``(A + A^dag) / 2`` on construction; inputs
    whose anti-Hermitian part exceeds ``1e-8`` are rejected.
    """

    matrix: np.ndarray
    dim_a: int
    dim_b: int

    def __post_init__(self):
        _check_dims(self.dim_a, self.dim_b)
        mat = np.array(self.matrix, dtype=complex)
        d = self.dim_a * self.dim_b
        if mat.shape != (d, d):
            raise DimensionError(
                f"matrix shape {mat.shape} does not match dims {self.dim_a}x{self.dim_b}")
        asym = np.max(np.abs(mat - mat.conj().T)) if d else 0.0
        if asym > HERMITIAN_REJECT_TOL * max(1.0, np.max(np.abs(mat))):
            raise ValueError(f"matrix is not Hermitian (asymmetry {asym:.3g})")
        mat = 0.5 * (mat + mat.conj().T)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.dim_a, self.dim_b)

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def _like(self, mat) -> "HermitianOp":
        return HermitianOp(mat, self.dim_a, self.dim_b)

    def _other(self, other) -> np.ndarray:
        if isinstance(other, HermitianOp):
            if other.dims != self.dims:
                raise DimensionError(f"dims {other.dims} != {self.dims}")
            return other.matrix
        return NotImplemented

    def __add__(self, other):
        m = self._other(other)
        if m is NotImplemented:
            return m
        return self._like(self.matrix + m)

    def __sub__(self, other):
        m = self._other(other)
        if m is NotImplemented:
            return m
        return self._like(self.matrix - m)

    def __neg__(self):
        return self._like(-self.matrix)

    def __mul__(self, scalar):
        if not np.isscalar(scalar) or np.iscomplexobj(scalar):
            return NotImplemented
        return self._like(float(scalar) * self.matrix)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / float(scalar))

    def __repr__(self):
        return f"HermitianOp(dims={self.dims})"


def _check_dims(dim_a: int, dim_b: int) -> None:
    if int(dim_a) != dim_a or int(dim_b) != dim_b or dim_a < 2 or dim_b < 2:
        raise DimensionError(f"subsystem dimensions must be integers >= 2, got {dim_a}x{dim_b}")


def identity(dim_a: int, dim_b: int) -> HermitianOp:
    return HermitianOp(np.eye(dim_a * dim_b), dim_a, dim_b)


def tensor(a: np.ndarray, b: np.ndarray) -> HermitianOp:
    """Tensor product of two single-factor Hermitian matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    return HermitianOp(np.kron(a, b), a.shape[0], b.shape[0])


def projector(vectors: np.ndarray | Sequence[np.ndarray], dim_a: int, dim_b: int) -> HermitianOp:
    """Orthogonal projector onto the span of orthonormal column vectors."""
    v = np.asarray(vectors, dtype=complex)
    if v.ndim == 1:
        v = v[:, None]
    elif v.shape[0] != dim_a * dim_b:
        v = v.T
    return HermitianOp(v @ v.conj().T, dim_a, dim_b)


@lru_cache(maxsize=None)
def _factor_generators(d: int) -> tuple[np.ndarray, tuple[str, ...]]:
    mats = [np.eye(d, dtype=complex) / np.sqrt(d)]
    labels = ["I"]
    pairs = list(combinations(range(d), 2))
    for j, k in pairs:
        g = np.zeros((d, d), dtype=complex)
        g[j, k] = g[k, j] = 1 / np.sqrt(2)
        mats.append(g)
        labels.append(f"S{j}{k}")
    for j, k in pairs:
        g = np.zeros((d, d), dtype=complex)
        g[j, k] = -1j / np.sqrt(2)
        g[k, j] = 1j / np.sqrt(2)
        mats.append(g)
        labels.append(f"A{j}{k}")
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
        labels.append(f"D{l}")
    out = np.array(mats)
    out.setflags(write=False)
    return out, tuple(labels)


def factor_generators(d: int) -> np.ndarray:
    """Normalized generators of U(d), identity first; shape ``(d*d, d, d)``."""
    if d < 2:
        raise DimensionError(f"factor dimension must be >= 2, got {d}")
    return _factor_generators(d)[0]


@dataclass(frozen=True, eq=False)
class ObservableBasis:
    """Orthonormal Hermitian basis ``{X_i}`` of operators on C^M (x) C^N."""

    dim_a: int
    dim_b: int
    elements: np.ndarray = field(repr=False)
    factor_labels: tuple[tuple[str, ...], tuple[str, ...]] = field(repr=False)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.dim_a, self.dim_b)

    @property
    def size(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, i: int) -> HermitianOp:
        return HermitianOp(self.elements[i], self.dim_a, self.dim_b)

    def flat_index(self, a: int, b: int) -> int:
        na, nb = self.dim_a ** 2, self.dim_b ** 2
        if not (0 <= a < na and 0 <= b < nb):
            raise IndexError(f"factor indices ({a}, {b}) out of range")
        return a * nb + b

    def pair_index(self, i: int) -> tuple[int, int]:
        if not 0 <= i < self.size:
            raise IndexError(f"basis index {i} out of range")
        return divmod(i, self.dim_b ** 2)

    def label(self, i: int) -> str:
        """Human label: ``σ1⊗σ2`` for qubit factors, Gell-Mann style otherwise."""
        a, b = self.pair_index(i)
        return f"{_factor_label(self.dim_a, a, self.factor_labels[0])}⊗" \
               f"{_factor_label(self.dim_b, b, self.factor_labels[1])}"


def _factor_label(d: int, idx: int, labels: tuple[str, ...]) -> str:
    if d == 2:
        return f"σ{idx}"
    return f"λ{idx}" if idx else "I"


@lru_cache(maxsize=16)
def build_basis(dim_a: int, dim_b: int) -> ObservableBasis:
    """Tensor-product Gell-Mann basis with ``M^2 N^2`` elements, ``X_0 = I/sqrt(MN)``."""
    _check_dims(dim_a, dim_b)
    ga, la = _factor_generators(dim_a)
    gb, lb = _factor_generators(dim_b)
    d = dim_a * dim_b
    # elements[a*N^2 + b] = ga[a] (x) gb[b]
    elems = np.einsum("aij,bkl->abikjl", ga, gb).reshape(len(ga) * len(gb), d, d)
    elems.setflags(write=False)
    return ObservableBasis(dim_a, dim_b, elems, (la, lb))


@dataclass(frozen=True, eq=False)
class CoeffVector:
    """Real coefficients of an operator over a subset ``T`` of nontrivial basis indices."""

    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int).reshape(-1)
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if idx.shape != vals.shape:
            raise ValueError("indices and values must have equal length")
        if idx.size and (idx[0] < 1 or np.any(np.diff(idx) <= 0)):
            raise ValueError("indices must be strictly increasing and >= 1")
        idx.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.indices)

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def dot(self, other: "CoeffVector") -> float:
        if not np.array_equal(self.indices, other.indices):
            raise ValueError("coefficient vectors live on different index sets")
        return float(self.values @ other.values)

    def with_values(self, values) -> "CoeffVector":
        return CoeffVector(self.indices, values)

    def restrict(self, indices) -> "CoeffVector":
        """Sub-vector on ``indices`` (each must be present in this vector)."""
        indices = np.asarray(indices, dtype=int)
        pos = np.searchsorted(self.indices, indices)
        if np.any(pos >= len(self.indices)) or np.any(self.indices[np.minimum(pos, len(self.indices) - 1)] != indices):
            raise IndexError("requested indices not present")
        return CoeffVector(indices, self.values[pos])


def full_indices(basis: ObservableBasis) -> np.ndarray:
    return np.arange(1, basis.size)


def _check_same(A: HermitianOp, basis: ObservableBasis) -> None:
    if A.dims != basis.dims:
        raise DimensionError(f"operator dims {A.dims} do not match basis dims {basis.dims}")


def coefficients(mat: np.ndarray, basis: ObservableBasis, indices=None) -> np.ndarray:
    """Raw ``tr(X_i mat)`` for ``i`` in ``indices`` (all indices by default)."""
    elems = basis.elements if indices is None else basis.elements[np.asarray(indices)]
    # tr(X A) = sum_jk X_jk A_kj
    return np.einsum("ijk,kj->i", elems, mat).real


def vectorize(A: HermitianOp, basis: ObservableBasis, indices=None) -> CoeffVector:
    """Bloch vector ``v(A)`` over ``indices`` (default: all of 1..M^2N^2-1)."""
    _check_same(A, basis)
    idx = full_indices(basis) if indices is None else np.asarray(indices, dtype=int)
    if idx.size and (idx.min() < 1 or idx.max() >= basis.size):
        raise IndexError("basis index out of range")
    return CoeffVector(idx, coefficients(A.matrix, basis, idx))


def trace_part(A: HermitianOp, basis: ObservableBasis) -> float:
    """The component ``tr(X_0 A) = tr(A) / sqrt(MN)``."""
    _check_same(A, basis)
    return A.trace() / np.sqrt(A.dim)


def devectorize(c: CoeffVector, basis: ObservableBasis, trace_part: float = 0.0) -> HermitianOp:
    """``trace_part * X_0 + sum_{i in T} c_i X_i``."""
    idx = c.indices
    if idx.size and idx.max() >= basis.size:
        raise IndexError(f"basis index {idx.max()} out of range for {basis.size} elements")
    mat = trace_part * basis.elements[0] + np.tensordot(c.values, basis.elements[idx], axes=1)
    return HermitianOp(mat, basis.dim_a, basis.dim_b)


def hs_inner(A: HermitianOp, B: HermitianOp) -> float:
    """Hilbert-Schmidt inner product ``tr(AB)``."""
    if A.dims != B.dims:
        raise DimensionError(f"dims {A.dims} != {B.dims}")
    return float(np.einsum("ij,ji->", A.matrix, B.matrix).real)


def hs_norm(A: HermitianOp) -> float:
    return float(np.sqrt(max(hs_inner(A, A), 0.0)))


def spectral_decomp(A: HermitianOp) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues ascending and orthonormal eigenvectors as columns.

    Raises ``np.linalg.LinAlgError`` if the eigensolver fails to converge.
    """
    w, v = np.linalg.eigh(A.matrix)
    return w, v
