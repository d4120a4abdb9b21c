"""Numpy per-triangle kernels for the discrete area functional.

Each triangle carries its P1 gradient operator ``G`` (2x3), its flat area
``A`` and the conformal factor at three quadrature points ``lam`` with
weights ``w``.  The energy of a triangle with slope ``g = G u`` is
``A * sum_q w_q lam_q sqrt(lam_q^2 + |g|^2)``.
"""
import numpy as np

GL_NODES = np.array([0.5 - np.sqrt(15.0) / 10.0, 0.5, 0.5 + np.sqrt(15.0) / 10.0])
GL_WEIGHTS = np.array([5.0, 8.0, 5.0]) / 18.0


def tri_terms(G, A, lam, w, ut):
    """Energy, gradient and Hessian of every triangle.

    Returns ``e`` (T,), ``grad`` (T,3), ``hess`` (T,3,3).
    """
    g = np.einsum("tij,tj->ti", G, ut)
    g2 = np.einsum("ti,ti->t", g, g)
    s = np.sqrt(lam * lam + g2[:, None])
    e = A * ((w * lam) * s).sum(axis=1)
    mu = A * (w * lam / s).sum(axis=1)
    nu = A * (w * lam / s**3).sum(axis=1)
    Gg = np.einsum("tij,ti->tj", G, g)
    grad = mu[:, None] * Gg
    GtG = np.einsum("tki,tkj->tij", G, G)
    hess = mu[:, None, None] * GtG - nu[:, None, None] * Gg[:, :, None] * Gg[:, None, :]
    return e, grad, hess


def tri_weights(G, A, lam, w, ut):
    """Per-triangle coefficient ``sum_q w_q lam_q / s_q`` of the Euler-Lagrange operator."""
    g = np.einsum("tij,tj->ti", G, ut)
    g2 = np.einsum("ti,ti->t", g, g)
    s = np.sqrt(lam * lam + g2[:, None])
    return (w * lam / s).sum(axis=1)


def tri_energy_delta(G, A, lam, w, ut, dt, t):
    """E(u + t du) - E(u) per triangle without cancellation."""
    g = np.einsum("tij,tj->ti", G, ut)
    dg = np.einsum("tij,tj->ti", G, dt)
    g2 = np.einsum("ti,ti->t", g, g)
    x = t * (2.0 * np.einsum("ti,ti->t", g, dg) + t * np.einsum("ti,ti->t", dg, dg))
    l2 = lam * lam
    s0 = np.sqrt(l2 + g2[:, None])
    s1 = np.sqrt(np.maximum(l2 + (g2 + x)[:, None], 0.0))
    return A * ((w * lam) * x[:, None] / (s0 + s1)).sum(axis=1)


def edge_lengths(z0, z1, du):
    """Lengths in the metric lam^2 |dz|^2 + dt^2 of straight chart edges."""
    dz = z1 - z0
    adz = np.abs(dz)
    out = np.zeros(len(z0))
    for s, wq in zip(GL_NODES, GL_WEIGHTS):
        z = z0 + s * dz
        lam = 2.0 / (1.0 - (z.real**2 + z.imag**2))
        out += wq * np.sqrt((lam * adz) ** 2 + du * du)
    return out
