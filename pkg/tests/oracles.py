"""Independent reference computations used by the tests."""

import numpy as np
from scipy.optimize import minimize


def qubit_grid(n):
    """Gauge-fixed qubit states cos t|0> + e^{i f} sin t|1>, t in [0, pi/2], f in [0, 2pi)."""
    t = np.linspace(0, np.pi / 2, n)
    f = np.linspace(0, 2 * np.pi, n, endpoint=False)
    T, F = np.meshgrid(t, f, indexing="ij")
    return np.stack([np.cos(T).ravel(), (np.exp(1j * F) * np.sin(T)).ravel()], axis=1)


def _qubit(t, f):
    return np.array([np.cos(t), np.exp(1j * f) * np.sin(t)])


def _value(mat, x):
    v = np.kron(_qubit(x[0], x[1]), _qubit(x[2], x[3]))
    return float(np.vdot(v, mat @ v).real)


def grid_max_2x2(mat, n=60, polish=5):
    """Max of <ab|A|ab> over an n^4 grid, then Nelder-Mead from the best ``polish`` grid points.

    Returns ``(grid_value, polished_value)``.
    """
    qs = qubit_grid(n)
    T = mat.reshape(2, 2, 2, 2)
    # B[a] = (<alpha_a| ⊗ I) A (|alpha_a> ⊗ I)
    B = np.einsum("ai,ijkl,ak->ajl", qs.conj(), T, qs)
    outer = np.einsum("bj,bl->bjl", qs.conj(), qs).reshape(len(qs), 4)
    vals = (B.reshape(len(qs), 4) @ outer.T).real
    grid = float(vals.max())
    t = np.linspace(0, np.pi / 2, n)
    f = np.linspace(0, 2 * np.pi, n, endpoint=False)
    best = grid
    flat_vals = vals.ravel()
    top = np.argpartition(flat_vals, -polish)[-polish:]
    for flat in top[np.argsort(flat_vals[top])[::-1]]:
        a, b = np.unravel_index(flat, vals.shape)
        x0 = [t[a // n], f[a % n], t[b // n], f[b % n]]
        res = minimize(lambda x: -_value(mat, x), x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000})
        best = max(best, -res.fun)
    return grid, best


def random_hermitian(rng, d, scale=1.0):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (x + x.conj().T) / 2


def swap(d):
    S = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            S[j * d + i, i * d + j] = 1
    return S


def product_max_lbfgs(mat, dims, starts=200, seed=0):
    """Max of <ab|A|ab> by multistart L-BFGS over unnormalized real/imag parts."""
    m, n = dims
    rng = np.random.default_rng(seed)

    def neg(x):
        a = x[:m] + 1j * x[m:2 * m]
        b = x[2 * m:2 * m + n] + 1j * x[2 * m + n:]
        v = np.kron(a, b)
        return -float(np.vdot(v, mat @ v).real) / float(np.vdot(v, v).real)

    best = -np.inf
    for _ in range(starts):
        res = minimize(neg, rng.normal(size=2 * (m + n)), method="L-BFGS-B",
                       options={"ftol": 1e-15, "gtol": 1e-10})
        best = max(best, -res.fun)
    return best
