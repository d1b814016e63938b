"""AF sum rates, Monte Carlo SNR sweeps and DoF slope estimation."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .channel import TrialSeed, sample_channel_set
from .core import build_scheme, gsa_feasible
from .errors import Infeasible, InsufficientPoints
from .transceiver import relay_gain, source_power_per_stream_unit

DEFAULT_TRIALS = 500


@dataclass(frozen=True)
class RatePoint:
    snr_db: float
    per_node_rate: tuple
    sum_rate: float


@dataclass(frozen=True)
class SweepPoint:
    snr_db: float
    mean_sum_rate: float
    std_error: float
    trials: int


@dataclass(frozen=True)
class SweepResult:
    points: tuple

    def __post_init__(self):
        snr = [p.snr_db for p in self.points]
        if any(b <= a for a, b in zip(snr, snr[1:])):
            raise ValueError("SNR grid must be strictly increasing")
        if len({p.trials for p in self.points}) > 1:
            raise ValueError("all sweep points must use the same trial count")

    @property
    def snr_db(self):
        return np.array([p.snr_db for p in self.points])

    @property
    def mean_sum_rate(self):
        return np.array([p.mean_sum_rate for p in self.points])


def _grams(scheme, ch):
    """Per-node signal gram B B^H and forwarded-noise gram W W^H."""
    sig, noise = [], []
    ua = scheme.U @ scheme.A
    for node in (1, 2, 3, 4):
        g = ch.G(node)
        b = g @ scheme.member_U(node)
        w = g @ ua
        sig.append(b @ b.conj().T)
        noise.append(w @ w.conj().T)
    return np.stack(sig), np.stack(noise)


def rate_grid(scheme, ch, snr_grid_db, sigma2=1.0):
    """Node rates R_1..R_4 (bits per channel use) at each SNR, shape (points, 4).

    Total source power is ``snr * sigma2``; the relay transmits the same
    total. The rate is counted on the partner symbols left after
    self-interference cancellation.
    """
    snr_grid_db = np.atleast_1d(np.asarray(snr_grid_db, dtype=np.float64))
    unit = source_power_per_stream_unit(scheme)
    total_power = 10.0 ** (snr_grid_db / 10.0) * sigma2
    ps = total_power / unit
    beta2 = relay_gain(scheme, ps, total_power, sigma2) ** 2
    sig, noise = _grams(scheme, ch)
    return np.asarray(kernels.af_rate_grid(sig, noise, ps, beta2, float(sigma2)))


def sum_rate_af(scheme, ch, snr_db, sigma2=1.0):
    rates = rate_grid(scheme, ch, [snr_db], sigma2)[0]
    per_node = tuple(float(r) for r in rates)
    return RatePoint(float(snr_db), per_node, float(sum(per_node)))


def trial_sum_rates(m_antennas, n_antennas, snr_grid_db, master_seed, trial_index, sigma2=1.0):
    ch = sample_channel_set(m_antennas, n_antennas, TrialSeed(master_seed, trial_index))
    scheme = build_scheme(ch)
    return rate_grid(scheme, ch, snr_grid_db, sigma2).sum(axis=1)


def _trial_block(args):
    m, n, grid, seed, start, stop = args
    return np.stack([trial_sum_rates(m, n, grid, seed, t) for t in range(start, stop)])


def trial_rate_matrix(m_antennas, n_antennas, snr_grid_db, trials, master_seed, workers=None):
    """Sum rate of every trial at every SNR, shape (trials, points), in trial order."""
    grid = tuple(float(x) for x in snr_grid_db)
    if not workers or workers <= 1:
        return _trial_block((m_antennas, n_antennas, grid, master_seed, 0, trials))
    chunk = max(1, -(-trials // (4 * workers)))
    jobs = [
        (m_antennas, n_antennas, grid, master_seed, start, min(start + chunk, trials))
        for start in range(0, trials, chunk)
    ]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        blocks = list(pool.map(_trial_block, jobs))
    return np.concatenate(blocks, axis=0)


def monte_carlo_sweep(m_antennas, n_antennas, snr_grid_db, trials=DEFAULT_TRIALS,
                      master_seed=42, workers=None):
    """Mean AF sum rate over ``trials`` seeded channel draws at each SNR.

    Every trial reuses its channel draw across the whole grid. ``workers > 1``
    spreads trials over processes; the reduction always runs in trial order,
    so the result does not depend on ``workers``.
    """
    if not gsa_feasible(m_antennas, n_antennas):
        raise Infeasible(m_antennas, n_antennas)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rates = trial_rate_matrix(m_antennas, n_antennas, snr_grid_db, trials, master_seed, workers)
    mean = rates.mean(axis=0)
    if trials > 1:
        stderr = rates.std(axis=0, ddof=1) / np.sqrt(trials)
    else:
        stderr = np.zeros_like(mean)
    return SweepResult(tuple(
        SweepPoint(float(snr), float(mu), float(se), trials)
        for snr, mu, se in zip(snr_grid_db, mean, stderr)
    ))


def estimate_dof(sweep, window_db):
    """Least-squares slope of mean sum rate over the window, in bits per 3 dB."""
    lo, hi = window_db
    snr, rate = sweep.snr_db, sweep.mean_sum_rate
    mask = (snr >= lo - 1e-9) & (snr <= hi + 1e-9)
    if mask.sum() < 2:
        raise InsufficientPoints(f"need at least 2 points in [{lo}, {hi}] dB, got {int(mask.sum())}")
    slope = np.polyfit(snr[mask], rate[mask], 1)[0]
    return float(3.0 * slope)
