"""Dense complex matrix helpers used throughout the package.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``;
column vectors are ``(n, 1)`` arrays or 1-D arrays where noted.
"""
import numpy as np
from scipy.linalg import block_diag as _block_diag

from ._backend import kernels
from .errors import SingularMatrix

_EPS = np.finfo(np.float64).eps


def as_cmatrix(m):
    """Coerce to a 2-D complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {a.shape}")
    return a


def hermitian(m):
    return as_cmatrix(m).conj().T


def matmul(a, b):
    a, b = as_cmatrix(a), as_cmatrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def frobenius_norm(m):
    return float(np.linalg.norm(as_cmatrix(m), "fro"))


def stack_rows(blocks):
    """Vertically concatenate blocks sharing a column count."""
    blocks = [as_cmatrix(b) for b in blocks]
    if not blocks:
        raise ValueError("nothing to stack")
    cols = {b.shape[1] for b in blocks}
    if len(cols) != 1:
        raise ValueError(f"column counts differ: {sorted(cols)}")
    return np.vstack(blocks)


def block_diag(blocks):
    return _block_diag(*[as_cmatrix(b) for b in blocks])


def _fix_phase(basis):
    # rotate so the first significant entry of each column is real positive
    for k in range(basis.shape[1]):
        col = basis[:, k]
        idx = np.flatnonzero(np.abs(col) > 1e-12 * max(np.abs(col).max(), 1e-300))
        if idx.size:
            z = col[idx[0]]
            basis[:, k] = col * (np.conj(z) / abs(z))
    return basis


def numerical_rank(m, tol=0.0):
    m = as_cmatrix(m)
    if 0 in m.shape:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > _threshold(m.shape, s, tol)))


def _threshold(shape, s, tol):
    smax = s[0] if s.size else 0.0
    if tol > 0:
        return tol * smax
    return max(shape) * _EPS * smax


def null_space_basis(m, tol=0.0):
    """Orthonormal basis of the right null space ``{x : m @ x = 0}``.

    Parameters
    ----------
    m : array_like, shape (rows, cols)
    tol : float
        Relative singular-value cutoff. ``0`` selects
        ``max(rows, cols) * eps * s_max``.

    Returns
    -------
    ndarray, shape (cols, k)
        ``k = cols - rank``; may be empty. Each column is phase-normalized
        so its first non-negligible entry is real and positive.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    m = as_cmatrix(m)
    rows, cols = m.shape
    if cols == 0:
        raise ValueError("matrix must have at least one column")
    if rows == 0:
        return np.eye(cols, dtype=np.complex128)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    rank = int(np.sum(s > _threshold(m.shape, s, tol)))
    basis = np.ascontiguousarray(vh[rank:].conj().T)
    return _fix_phase(basis)


def invert(m, return_cond=False):
    """Inverse of a square matrix.

    Raises :class:`SingularMatrix` when the numerical rank is below the
    dimension. With ``return_cond`` the 2-norm condition number is returned
    alongside the inverse.
    """
    m = as_cmatrix(m)
    n, n2 = m.shape
    if n != n2:
        raise ValueError(f"cannot invert non-square matrix of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise SingularMatrix("matrix has non-finite entries")
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] <= _threshold(m.shape, s, 0.0):
        raise SingularMatrix(f"numerical rank below {n}")
    inverse = kernels.inv(m)
    if return_cond:
        return inverse, float(s[0] / s[-1])
    return inverse


def log_det_hermitian_pd(m):
    """Base-2 log determinant of a Hermitian PD matrix from its Cholesky pivots.

    The input is symmetrized as ``(m + m^H) / 2`` first. Raises
    :class:`~gsa_relay.errors.NotPositiveDefinite` on a non-positive pivot.
    """
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got {m.shape}")
    return float(kernels.log2det_hpd(m))
