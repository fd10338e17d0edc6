"""Numpy implementations of the hot kernels.

Each function has the same signature and semantics as its counterpart in
``_ckernels.pyx``; this module is used when the extension is not built.
"""
import numpy as np


def overlap_grid(m0, m1, thetas, phis):
    """``|| conj(c0) m0 + conj(c1) m1 ||^2`` for qubit (c0, c1) on a (theta, phi) grid."""
    c0 = np.cos(np.asarray(thetas) / 2)[:, None, None]
    s0 = np.sin(np.asarray(thetas) / 2)[:, None, None]
    ph = np.exp(-1j * np.asarray(phis))[None, :, None]
    v = c0 * m0[None, None, :] + s0 * ph * m1[None, None, :]
    return np.einsum("ijk,ijk->ij", v.conj(), v).real


def overlap_point(m0, m1, theta, phi):
    v = np.cos(theta / 2) * m0 + np.sin(theta / 2) * np.exp(-1j * phi) * m1
    return float(np.vdot(v, v).real)


def isometry(params, m):
    """First two columns of a product of complex Givens rotations over all pairs."""
    u = np.zeros((m, 2), dtype=complex)
    u[0, 0] = u[1, 1] = 1
    k = len(params) // 2 - 1
    for i in range(m - 2, -1, -1):
        for j in range(m - 1, i, -1):
            th, ph = params[2 * k], params[2 * k + 1]
            k -= 1
            c, s = np.cos(th), np.sin(th)
            ri, rj = u[i].copy(), u[j]
            u[i] = c * ri - np.exp(-1j * ph) * s * rj
            u[j] = np.exp(1j * ph) * s * ri + c * rj
    return u


def roof_objective(params, w, spin_ops, m):
    """Average member entanglement for the decomposition generated by ``params``.

    ``w`` holds the weighted eigenvectors as columns (2x2), ``spin_ops`` the
    three restrictions of the distinguished spin's Pauli operators to the
    subspace (3x2x2). Unnormalised members ``psi_i = sum_k U_ik w[:, k]``
    contribute ``p_i |<sigma>_i| = |(psi_i^+ S psi_i)|``.
    """
    u = isometry(params, m)
    psi = u @ w.T
    spins = np.einsum("ia,kab,ib->ik", psi.conj(), spin_ops, psi).real
    return 0.5 * (1.0 - np.sqrt((spins**2).sum(axis=1)).sum())


def apply_ising_chain(psi, n, c, s):
    """Apply ``prod_i (c - i s X_i X_{i+1})`` over all open-chain bonds."""
    t = np.array(psi, dtype=complex).reshape((2,) * n)
    for i in range(n - 1):
        flipped = np.flip(np.flip(t, axis=i), axis=i + 1)
        t = c * t - 1j * s * flipped
    return t.reshape(-1)
