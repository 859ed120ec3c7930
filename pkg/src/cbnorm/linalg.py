"""Dense complex linear-algebra kernels shared by the other modules."""

import numpy as np

DecompositionError = np.linalg.LinAlgError


def svd(x):
    """SVD with a fixed phase convention.

    Returns (s, u, v) with x = u @ diag(s) @ v.conj().T, singular values
    descending.  Each left singular vector is rotated so that its
    largest-modulus entry is real and positive; the matching right
    vector absorbs the opposite phase.  This keeps reported witnesses
    stable across runs.
    """
    x = np.asarray(x, dtype=complex)
    u, s, vh = np.linalg.svd(x, full_matrices=False)
    u = u.copy()
    vh = vh.copy()
    for i in range(s.size):
        p = int(np.argmax(np.abs(u[:, i])))
        z = u[p, i]
        a = abs(z)
        if a > 0:
            u[:, i] *= np.conj(z) / a
            vh[i, :] *= z / a
    return s, u, vh.conj().T


def op_norm_matrix(x):
    """Largest singular value."""
    x = np.asarray(x, dtype=complex)
    if x.size == 0:
        return 0.0
    return float(np.linalg.norm(x, 2))


def trace_norm(x):
    """Sum of singular values."""
    x = np.asarray(x, dtype=complex)
    if x.size == 0:
        return 0.0
    return float(np.linalg.svd(x, compute_uv=False).sum())


def herm_tolerance(x):
    return 1e-10 * max(1.0, float(np.linalg.norm(x)))


def psd_sqrt(x):
    """Hermitian PSD square root; tiny negative eigenvalues are clamped to 0.

    Raises ValueError when the input is not Hermitian within
    1e-10 * max(1, ||x||_F).
    """
    x = np.asarray(x, dtype=complex)
    gap = float(np.linalg.norm(x - x.conj().T))
    if gap > herm_tolerance(x):
        raise ValueError(f"matrix is not Hermitian: asymmetry {gap:.3e}")
    w, v = np.linalg.eigh((x + x.conj().T) / 2)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def kron(x, y):
    return np.kron(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))


def polar_factor(x):
    """Partial isometry u @ vh from the SVD of x.

    Maximizes Re trace(y† x) over contractions y, attaining trace_norm(x).
    """
    x = np.asarray(x, dtype=complex)
    u, _, vh = np.linalg.svd(x, full_matrices=False)
    return u @ vh


def haar_unitary(m, seed=0):
    """Haar-distributed m x m unitary, deterministic per seed.

    `seed` may also be a numpy Generator, which is advanced in place.
    """
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
