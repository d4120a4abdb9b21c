import numpy as np
import pytest

from minh2r import _kernels_py as py
from minh2r import kernels

cy = pytest.importorskip("minh2r._kernels")


def random_batch(T=200, seed=3):
    rng = np.random.default_rng(seed)
    G = rng.normal(size=(T, 2, 3))
    A = rng.uniform(1e-4, 1e-2, T)
    lam = rng.uniform(2.0, 50.0, (T, 3))
    ut = rng.normal(scale=5.0, size=(T, 3))
    dt = rng.normal(size=(T, 3))
    return G, A, lam, np.full(3, 1.0 / 3.0), ut, dt


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


def test_tri_terms_agree():
    G, A, lam, w, ut, _ = random_batch()
    for a, b in zip(py.tri_terms(G, A, lam, w, ut), cy.tri_terms(G, A, lam, w, ut)):
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)


def test_tri_weights_and_delta_agree():
    G, A, lam, w, ut, dt = random_batch()
    np.testing.assert_allclose(py.tri_weights(G, A, lam, w, ut), cy.tri_weights(G, A, lam, w, ut), rtol=1e-13)
    for t in (1e-9, 0.3, 1.0):
        a = py.tri_energy_delta(G, A, lam, w, ut, dt, t)
        b = cy.tri_energy_delta(G, A, lam, w, ut, dt, t)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-300)


def test_energy_delta_matches_difference():
    G, A, lam, w, ut, dt = random_batch()
    e0 = py.tri_terms(G, A, lam, w, ut)[0]
    e1 = py.tri_terms(G, A, lam, w, ut + 0.5 * dt)[0]
    np.testing.assert_allclose(py.tri_energy_delta(G, A, lam, w, ut, dt, 0.5), e1 - e0, rtol=1e-9, atol=1e-14)


def test_gradient_and_hessian_by_finite_differences():
    G, A, lam, w, ut, _ = random_batch(T=5)
    e, grad, hess = py.tri_terms(G, A, lam, w, ut)
    h = 1e-6
    for i in range(3):
        step = np.zeros(3)
        step[i] = h
        ep = py.tri_terms(G, A, lam, w, ut + step)
        em = py.tri_terms(G, A, lam, w, ut - step)
        np.testing.assert_allclose((ep[0] - em[0]) / (2 * h), grad[:, i], rtol=1e-6)
        np.testing.assert_allclose((ep[1] - em[1]) / (2 * h), hess[:, :, i], rtol=1e-5, atol=1e-8)


def test_edge_lengths_agree_and_flat_limit():
    rng = np.random.default_rng(5)
    z0 = 0.9 * np.sqrt(rng.random(100)) * np.exp(2j * np.pi * rng.random(100))
    z1 = z0 + 0.01 * (rng.normal(size=100) + 1j * rng.normal(size=100))
    z1 = np.where(np.abs(z1) < 0.99, z1, z0)
    du = rng.normal(size=100)
    np.testing.assert_allclose(py.edge_lengths(z0, z1, du), cy.edge_lengths(z0, z1, du), rtol=1e-13)
    # horizontal segment along a diameter: hyperbolic length 2 artanh(r)
    r = 0.6
    L = py.edge_lengths(np.array([0j]), np.array([r + 0j]), np.zeros(1))[0]
    assert abs(L - 2 * np.arctanh(r)) < 1e-2
