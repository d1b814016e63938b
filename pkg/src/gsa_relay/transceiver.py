"""Two-phase AF transmission: MAC uplink, relay combining, broadcast, decoding."""
from dataclasses import dataclass

import numpy as np

from . import linalg
from .channel import complex_gaussian
from .core import MEMBER_BLOCKS, PAIR_ORDER
from .errors import SingularEffectiveChannel, SingularMatrix


@dataclass(frozen=True)
class SymbolFrame:
    """Stacked 4M symbol vector in the ``[s13 s14 | s23 s24 | s31 s32 | s41 s42]`` layout."""

    s: np.ndarray
    per_stream_power: float = 1.0

    def source(self, src, m_antennas):
        return self.s[(src - 1) * m_antennas:src * m_antennas]


def random_frame(alloc, per_stream_power, rng):
    """Gaussian symbols with E|s|^2 = per_stream_power."""
    rng = np.random.default_rng(rng)
    s = complex_gaussian(rng, 4 * alloc.m_antennas) * np.sqrt(per_stream_power)
    return SymbolFrame(s, per_stream_power)


def intended_symbols(s, alloc, node):
    """The symbols that partners send to ``node``, ordered by member block."""
    cols = alloc.column_slices
    parts = []
    for k in MEMBER_BLOCKS[node]:
        i, j = PAIR_ORDER[k]
        partner = j if node == i else i
        parts.append(np.asarray(s)[cols[(partner, node)]])
    return np.concatenate(parts)


def source_power_per_stream_unit(scheme):
    """Total source transmit power for unit per-stream power: sum_i ||V_i||_F^2."""
    return float(sum(np.linalg.norm(v) ** 2 for v in scheme.V))


def per_stream_power_for_snr(scheme, snr_db, sigma2=1.0):
    """P_s such that total source power / sigma2 equals the requested SNR."""
    return 10.0 ** (snr_db / 10.0) * sigma2 / source_power_per_stream_unit(scheme)


def relay_gain(scheme, per_stream_power, relay_power, sigma2):
    """Amplitude beta with E||beta U (P s + A n_r)||^2 = relay_power.

    The network-coded vector P s has covariance 2 P_s I; the forwarded relay
    noise has covariance sigma2 A A^H. Array arguments broadcast.
    """
    u_energy, ua_energy = relay_energy_terms(scheme)
    expected = 2.0 * np.asarray(per_stream_power) * u_energy + sigma2 * ua_energy
    beta = np.sqrt(np.asarray(relay_power) / expected)
    return float(beta) if beta.ndim == 0 else beta


def relay_energy_terms(scheme):
    """(||U||_F^2, ||U A||_F^2)."""
    return (
        float(np.linalg.norm(scheme.U) ** 2),
        float(np.linalg.norm(scheme.U @ scheme.A) ** 2),
    )


def _noise(rng, n, sigma2):
    if sigma2 == 0:
        return np.zeros(n, dtype=np.complex128)
    return complex_gaussian(rng, n) * np.sqrt(sigma2)


def _check_scheme(scheme, ch):
    if (scheme.m_antennas, scheme.n_antennas) != (ch.m_antennas, ch.n_antennas):
        raise ValueError(
            f"scheme built for (M, N)=({scheme.m_antennas}, {scheme.n_antennas}), "
            f"channels are ({ch.m_antennas}, {ch.n_antennas})"
        )


def mac_phase(scheme, ch, frame, sigma2, noise_seed=None):
    """Uplink: returns the relay observation y_r and its combined estimate A y_r."""
    _check_scheme(scheme, ch)
    m = scheme.m_antennas
    s = np.asarray(frame.s, dtype=np.complex128)
    if s.shape != (4 * m,):
        raise ValueError(f"symbol vector must have length {4 * m}")
    rng = np.random.default_rng(noise_seed)
    y_r = sum(ch.H(i) @ (scheme.V[i - 1] @ frame.source(i, m)) for i in (1, 2, 3, 4))
    y_r = y_r + _noise(rng, scheme.n_antennas, sigma2)
    return y_r, scheme.A @ y_r


def bc_phase(scheme, ch, relay_estimate, relay_power, sigma2, noise_seed=None,
             per_stream_power=1.0, beta=None):
    """Broadcast ``beta * U @ relay_estimate`` and return the four received vectors.

    ``beta`` defaults to :func:`relay_gain` for the given powers.
    """
    _check_scheme(scheme, ch)
    r = np.asarray(relay_estimate)
    if r.shape != (2 * scheme.m_antennas,):
        raise ValueError(f"relay estimate must have length {2 * scheme.m_antennas}")
    if beta is None:
        beta = relay_gain(scheme, per_stream_power, relay_power, sigma2)
    rng = np.random.default_rng(noise_seed)
    x_r = beta * (scheme.U @ r)
    return [ch.G(i) @ x_r + _noise(rng, scheme.m_antennas, sigma2) for i in (1, 2, 3, 4)]


def decode_destination(node, y, scheme, ch, own_symbols, beta):
    """Zero-force the node's two member blocks, then cancel its own symbols."""
    g_eff = ch.G(node) @ scheme.member_U(node)
    try:
        g_inv = linalg.invert(g_eff)
    except SingularMatrix as exc:
        raise SingularEffectiveChannel(f"destination channel at node {node} is singular") from exc
    return g_inv @ np.asarray(y) / beta - np.asarray(own_symbols)


@dataclass(frozen=True)
class TransmissionResult:
    relay_estimate: np.ndarray
    received: list
    recovered: list
    noise_variance: float
    beta: float


def transmit(scheme, ch, frame, sigma2, relay_power=None, noise_seed=None):
    """One full exchange; ``relay_power`` defaults to the total source power."""
    m = scheme.m_antennas
    if relay_power is None:
        relay_power = frame.per_stream_power * source_power_per_stream_unit(scheme)
    mac_seed, bc_seed = np.random.SeedSequence(noise_seed).spawn(2)
    _, estimate = mac_phase(scheme, ch, frame, sigma2, mac_seed)
    beta = relay_gain(scheme, frame.per_stream_power, relay_power, sigma2)
    received = bc_phase(scheme, ch, estimate, relay_power, sigma2, bc_seed, beta=beta)
    recovered = [
        decode_destination(i, received[i - 1], scheme, ch, frame.source(i, m), beta)
        for i in (1, 2, 3, 4)
    ]
    return TransmissionResult(estimate, received, recovered, sigma2, beta)
