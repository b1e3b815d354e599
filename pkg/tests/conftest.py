"""Shared fixtures and independent oracles used across the test suite.

The oracles here deliberately re-derive quantities from first principles
(explicit loops, closed forms) so they stay independent of the library code
paths they certify.
"""
from __future__ import annotations

import itertools

import numpy as np
import pytest

from tenscale import Tensor


def random_integer_tensor(shape, rng, low=-4, high=5) -> Tensor:
    """Nonzero Gaussian-integer tensor with entries in [low, high)."""
    while True:
        data = rng.integers(low, high, size=shape).astype(complex)
        if np.linalg.norm(data) > 0:
            return Tensor(data)


def random_density(n, rng) -> np.ndarray:
    """Random PSD matrix with unit trace."""
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_hermitian(n, rng) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


def random_upper_triangular(n, rng, *, unit_scale=False) -> np.ndarray:
    """Well-conditioned random complex upper-triangular matrix."""
    m = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)), 1)
    diag = 1.0 + rng.random(n)
    if unit_scale:
        m *= 0.3
    return m + np.diag(diag.astype(complex))


def marginal_bruteforce(x: Tensor, i: int) -> np.ndarray:
    """Direct-summation marginal: rho[a, b] = sum over all other indices of
    X[.. a ..] * conj(X[.. b ..])."""
    n = x.shape[i]
    rho = np.zeros((n, n), dtype=complex)
    for idx in itertools.product(*(range(s) for s in x.shape)):
        for b in range(n):
            jdx = idx[:i] + (b,) + idx[i + 1:]
            rho[idx[i], b] += x.data[idx] * np.conj(x.data[jdx])
    return rho


def hwv_bruteforce(spec, x: Tensor) -> complex:
    """Naive re-implementation of the weight-vector evaluation: loop over
    every tuple of index maps, build each column-block matrix explicitly,
    and take numpy determinants."""
    k = spec.degree
    dims = x.dims

    def det_factor(lam, perm, assign, n):
        from tenscale import conjugate_partition

        heights = conjugate_partition(tuple(v for v in lam if v > 0))
        val = 1.0
        offset = 0
        for h in heights:
            mat = np.zeros((h, h))
            for a in range(h):
                basis = assign[perm[offset + a]]
                for b in range(h):
                    mat[a, b] = 1.0 if basis == n - 1 - b else 0.0
            val *= np.linalg.det(mat)
            offset += h
            if val == 0.0:
                return 0.0
        return val

    total = 0.0 + 0.0j
    per_factor = [list(itertools.product(range(n), repeat=k)) for n in dims]
    for maps in itertools.product(*per_factor):
        amp = 1.0 + 0.0j
        for a in range(k):
            amp *= x.data[(spec.index_seq[a],) + tuple(m[a] for m in maps)]
        if amp == 0:
            continue
        for i, (lam, perm) in enumerate(zip(spec.weight, spec.perms)):
            amp *= det_factor(lam, perm, maps[i], dims[i])
            if amp == 0:
                break
        total += amp
    return total


def ghz_tensor() -> Tensor:
    data = np.zeros((1, 2, 2, 2), dtype=complex)
    data[0, 0, 0, 0] = data[0, 1, 1, 1] = 1
    return Tensor(data)


def w_tensor(flipped: bool = False) -> Tensor:
    """The three-term one-excitation tensor; flipped=True puts the
    excitation in the last coordinate instead of the first."""
    data = np.zeros((1, 2, 2, 2), dtype=complex)
    hot, cold = (0, 1) if flipped else (1, 0)
    data[0, hot, cold, cold] = 1
    data[0, cold, hot, cold] = 1
    data[0, cold, cold, hot] = 1
    return Tensor(data)


def product_tensor() -> Tensor:
    data = np.zeros((1, 2, 2, 2), dtype=complex)
    data[0, 0, 0, 0] = 1
    return Tensor(data)


def pure_state_spectra_gap(point, samples=1_000_000, seed=99) -> float:
    """Smallest max-factor l1 distance between the marginal spectra of
    random pure three-qubit states and a target point, using closed-form
    2x2 eigenvalues.  Serves as a sampling ground truth for far points."""
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal((samples, 8)) + 1j * rng.standard_normal((samples, 8))
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    worst = np.zeros(samples)
    tensors = psi.reshape(samples, 2, 2, 2)
    for axis in (1, 2, 3):
        mat = np.moveaxis(tensors, axis, 1).reshape(samples, 2, 4)
        rho = np.einsum("nij,nkj->nik", mat, mat.conj())
        tr = rho[:, 0, 0].real + rho[:, 1, 1].real
        det = (rho[:, 0, 0] * rho[:, 1, 1] - rho[:, 0, 1] * rho[:, 1, 0]).real
        disc = np.sqrt(np.clip(tr * tr - 4 * det, 0, None))
        hi, lo = (tr + disc) / 2, (tr - disc) / 2
        target = point[axis - 1]
        dist = np.abs(hi - target[0]) + np.abs(lo - target[1])
        worst = np.maximum(worst, dist)
    return float(worst.min())


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
