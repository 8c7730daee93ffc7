import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ewsearch.basis import (CoeffVector, DimensionError, HermitianOp, build_basis, devectorize,
                            hs_inner, hs_norm, identity, spectral_decomp, tensor, trace_part,
                            vectorize)
from ewsearch.states import bell_state, pauli, pauli_product

DIMS = [(2, 2), (2, 3), (3, 3)]


def random_hermitian(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (x + x.conj().T) / 2


@pytest.mark.parametrize("dims", DIMS)
def test_gram_is_identity(dims):
    b = build_basis(*dims)
    E = b.elements.reshape(b.size, -1)
    gram = E.conj() @ E.T
    assert np.allclose(gram, np.eye(b.size), atol=1e-10)
    assert b.size == (dims[0] * dims[1]) ** 2


@pytest.mark.parametrize("dims", DIMS)
def test_first_element_is_scaled_identity(dims):
    b = build_basis(*dims)
    d = dims[0] * dims[1]
    assert np.allclose(b.elements[0], np.eye(d) / np.sqrt(d))
    # every other element is traceless
    assert np.allclose(np.trace(b.elements[1:], axis1=1, axis2=2), 0)


def test_qubit_elements_are_pauli_products():
    b = build_basis(2, 2)
    for i in range(4):
        for j in range(4):
            k = b.flat_index(i, j)
            assert k == 4 * i + j
            assert np.allclose(b.elements[k], np.kron(pauli(i), pauli(j)))
    assert b.label(5) == "σ1⊗σ1"
    assert b.pair_index(10) == (2, 2)


def test_pauli_normalization():
    assert np.allclose(pauli(0), np.eye(2) / np.sqrt(2))
    assert np.trace(pauli(1) @ pauli(1)).real == pytest.approx(1.0)


@pytest.mark.parametrize("dims", DIMS)
def test_parseval_and_roundtrip(dims):
    rng = np.random.default_rng(1)
    b = build_basis(*dims)
    d = dims[0] * dims[1]
    for _ in range(100):
        A = HermitianOp(random_hermitian(rng, d), *dims)
        v = vectorize(A, b)
        t = trace_part(A, b)
        assert hs_norm(A) ** 2 == pytest.approx(v.norm() ** 2 + t ** 2, abs=1e-10)
        back = devectorize(v, b, t)
        assert np.max(np.abs(back.matrix - A.matrix)) < 1e-12


def test_parseval_inner_products():
    rng = np.random.default_rng(2)
    b = build_basis(2, 3)
    for _ in range(20):
        A = HermitianOp(random_hermitian(rng, 6), 2, 3)
        B = HermitianOp(random_hermitian(rng, 6), 2, 3)
        lhs = hs_inner(A, B)
        rhs = vectorize(A, b).dot(vectorize(B, b)) + trace_part(A, b) * trace_part(B, b)
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_vectorize_examples():
    b = build_basis(2, 2)
    assert np.allclose(vectorize(identity(2, 2) / 4, b).values, 0)
    v = vectorize(pauli_product(1, 1), b).values
    assert v[5 - 1] == pytest.approx(1.0) and np.sum(np.abs(v)) == pytest.approx(1.0)
    v = vectorize(bell_state("psi+"), b)
    nz = {int(i): round(float(x), 12) for i, x in zip(v.indices, v.values) if abs(x) > 1e-12}
    assert nz == {5: 0.5, 10: -0.5, 15: 0.5}


def test_devectorize_examples():
    b = build_basis(2, 2)
    mixed = devectorize(CoeffVector([1, 2], [0.0, 0.0]), b, 0.5)  # tr(X_0 I/4) = 1/2
    assert np.allclose(mixed.matrix, np.eye(4) / 4)
    s11 = devectorize(CoeffVector([5], [1.0]), b)
    assert np.allclose(s11.matrix, pauli_product(1, 1).matrix)
    with pytest.raises(IndexError):
        devectorize(CoeffVector([16], [1.0]), b)


def test_hs_inner_examples():
    b = build_basis(2, 2)
    for k in (1, 7, 15):
        assert hs_inner(b[k], b[k]) == pytest.approx(1.0)
    assert hs_inner(identity(2, 2) / 2, pauli_product(1, 1)) == pytest.approx(0.0)


def test_spectral_decomp():
    A_psi = pauli_product(1, 1) - pauli_product(2, 2)
    w, _ = spectral_decomp(A_psi)
    assert np.allclose(w, [-1, 0, 0, 1], atol=1e-12)
    w, _ = spectral_decomp(identity(3, 2))
    assert np.allclose(w, 1)
    rng = np.random.default_rng(3)
    for dims in DIMS:
        A = HermitianOp(random_hermitian(rng, dims[0] * dims[1]), *dims)
        w, v = spectral_decomp(A)
        assert np.all(np.diff(w) >= 0)
        assert np.allclose(v.conj().T @ v, np.eye(len(w)), atol=1e-10)
        assert np.max(np.abs((v * w) @ v.conj().T - A.matrix)) < 1e-10


def test_hermitian_op_validation():
    with pytest.raises(ValueError):
        HermitianOp(np.array([[0, 1], [0, 0]]).repeat(2, 0).repeat(2, 1), 2, 2)
    with pytest.raises(DimensionError):
        HermitianOp(np.eye(4), 2, 3)
    with pytest.raises(DimensionError):
        build_basis(1, 2)
    # tiny asymmetry is symmetrized away
    m = np.eye(4, dtype=complex)
    m[0, 1] = 1e-12
    op = HermitianOp(m, 2, 2)
    assert np.allclose(op.matrix, op.matrix.conj().T)


def test_tensor_matches_kron():
    a, b = pauli(1), pauli(3)
    assert np.allclose(tensor(a, b).matrix, np.kron(a, b))


def test_coeff_vector_rejects_bad_indices():
    with pytest.raises(ValueError):
        CoeffVector([2, 1], [0.0, 0.0])
    with pytest.raises(ValueError):
        CoeffVector([0, 1], [0.0, 0.0])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(DIMS))
def test_roundtrip_traceless_property(seed, dims):
    rng = np.random.default_rng(seed)
    d = dims[0] * dims[1]
    m = random_hermitian(rng, d)
    m -= np.trace(m) / d * np.eye(d)
    b = build_basis(*dims)
    A = HermitianOp(m, *dims)
    assert np.max(np.abs(devectorize(vectorize(A, b), b).matrix - m)) < 1e-12
