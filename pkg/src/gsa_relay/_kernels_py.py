"""NumPy implementations of the small-matrix kernels.

Used when the compiled extension is unavailable or explicitly disabled.
"""
import numpy as np

from .errors import NotPositiveDefinite, SingularMatrix

BACKEND = "python"


def _cholesky(a):
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("non-positive Cholesky pivot") from exc


def log2det_hpd(m):
    """log2 det of a Hermitian positive-definite matrix via Cholesky pivots."""
    m = np.asarray(m, dtype=np.complex128)
    lower = _cholesky(0.5 * (m + m.conj().T))
    return float(2.0 * np.sum(np.log2(np.diagonal(lower).real)))


def inv(m):
    try:
        return np.linalg.inv(np.asarray(m, dtype=np.complex128))
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("zero pivot in LU factorization") from exc


def af_rate_grid(signal_gram, noise_gram, per_stream_power, beta2, sigma2):
    """Per-node AF rates for every operating point of one channel draw.

    Batched over (points, nodes) with stacked Cholesky factorizations.
    """
    s = np.asarray(signal_gram, dtype=np.complex128)
    w = np.asarray(noise_gram, dtype=np.complex128)
    ps = np.asarray(per_stream_power, dtype=np.float64)[:, None, None, None]
    b2 = np.asarray(beta2, dtype=np.float64)[:, None, None, None]
    eye = np.eye(s.shape[1])
    noise = sigma2 * (b2 * w[None] + eye)
    total = noise + ps * b2 * s[None]
    ld_noise = 2.0 * np.log2(np.diagonal(_cholesky(noise), axis1=-2, axis2=-1).real).sum(-1)
    ld_total = 2.0 * np.log2(np.diagonal(_cholesky(total), axis1=-2, axis2=-1).real).sum(-1)
    return np.maximum(ld_total - ld_noise, 0.0)
