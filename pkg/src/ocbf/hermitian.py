"""Dense complex Hermitian matrix primitives.

All matrices here are small (at most 8x8), so plain dense LAPACK routines
are used throughout.  Eigenvalues are always returned in descending order
and eigenvector phases are normalized so results are reproducible.
"""

import numpy as np

# relative eigenvalue threshold used to decide numerical rank
RANK_TOL = 1e-10


def check_hermitian(H, tol=1e-12):
    """Validate that H is a square Hermitian matrix; return it as complex ndarray."""
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("expected a square matrix, got shape %s" % (H.shape,))
    scale = max(1.0, float(np.max(np.abs(H))) if H.size else 1.0)
    if np.max(np.abs(H - H.conj().T)) > tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    return H


def fix_phase(u, tol=1e-12):
    """Rotate a complex vector so its first significantly nonzero entry is real positive."""
    u = np.asarray(u, dtype=complex)
    mags = np.abs(u)
    if mags.size == 0 or np.max(mags) <= tol:
        return u
    j = int(np.argmax(mags > tol * np.max(mags)))
    phase = u[j] / abs(u[j])
    return u / phase


def eig_hermitian(H):
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues, V) with eigenvalues real and sorted descending and
    V unitary with phase-normalized columns, so H = V @ diag(vals) @ V^H.
    """
    H = check_hermitian(H)
    vals, vecs = np.linalg.eigh(H)
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    for j in range(vecs.shape[1]):
        vecs[:, j] = fix_phase(vecs[:, j])
    return vals, vecs


def sqrt_factor(Q):
    """Factor a PSD matrix as Q = F @ F^H with F of shape (dim, rank).

    The rank is determined at the relative threshold RANK_TOL * lambda_max.
    Raises ValueError if Q has an eigenvalue below -1e-8 * lambda_max.
    """
    vals, vecs = eig_hermitian(Q)
    lmax = vals[0] if vals.size else 0.0
    if lmax <= 0.0:
        if vals.size and vals[-1] < -1e-8:
            raise ValueError("matrix is not PSD (negative eigenvalue %g)" % vals[-1])
        return np.zeros((Q.shape[0], 0), dtype=complex)
    if vals[-1] < -1e-8 * lmax:
        raise ValueError("matrix is not PSD (negative eigenvalue %g)" % vals[-1])
    keep = vals > RANK_TOL * lmax
    return vecs[:, keep] * np.sqrt(vals[keep])


def trace_product(W, Q):
    """Re(tr(W Q)) for Hermitian W, Q of the same dimension."""
    W = check_hermitian(W)
    Q = check_hermitian(Q)
    if W.shape != Q.shape:
        raise ValueError("dimension mismatch: %s vs %s" % (W.shape, Q.shape))
    return float(np.trace(W @ Q).real)


def joint_nullspace(Qs, tol=1e-9):
    """Orthonormal basis of the intersection of null spaces of PSD matrices.

    Computed as the null space of the sum at the relative threshold
    tol * lambda_max(sum).  Returns an array of shape (dim, r); r may be 0.
    """
    Qs = [check_hermitian(Q) for Q in Qs]
    if not Qs:
        raise ValueError("need at least one matrix")
    dim = Qs[0].shape[0]
    S = np.zeros((dim, dim), dtype=complex)
    for Q in Qs:
        if Q.shape != (dim, dim):
            raise ValueError("dimension mismatch in matrix list")
        S += Q
    vals, vecs = eig_hermitian(S)
    lmax = vals[0] if vals.size else 0.0
    if lmax <= 0.0:
        # all matrices are zero: everything is in the null space
        return np.eye(dim, dtype=complex)
    keep = vals < tol * lmax
    return vecs[:, keep]
