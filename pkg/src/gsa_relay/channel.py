"""Rayleigh-fading channel draws for the two-way X relay network.

Each trial gets its own Philox stream keyed by ``(master_seed, trial_index)``
through :class:`numpy.random.SeedSequence`, so draws do not depend on the
order in which trials are executed.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ChannelDegenerate

MAX_RESAMPLE = 8
SOURCES = (1, 2, 3, 4)


@dataclass(frozen=True)
class TrialSeed:
    master_seed: int
    trial_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.trial_index < 0:
            raise ValueError("trial_index must be nonnegative")

    def generator(self):
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.trial_index,))
        return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class ChannelSet:
    """Uplinks ``H[i]`` (N x M) and downlinks ``G[i]`` (M x N) for i = 1..4.

    ``uplinks`` and ``downlinks`` are tuples indexed from 0; use
    :meth:`H` and :meth:`G` for 1-based node numbers.
    """

    m_antennas: int
    n_antennas: int
    uplinks: tuple
    downlinks: tuple

    def H(self, i):
        return self.uplinks[i - 1]

    def G(self, i):
        return self.downlinks[i - 1]

    def stacked_uplink(self):
        """The N x 4M matrix [H_1 H_2 H_3 H_4]."""
        return np.hstack(self.uplinks)


def complex_gaussian(rng, shape):
    """Circularly-symmetric CN(0, 1) samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _full_rank(mats, rank):
    return all(np.linalg.matrix_rank(h) == rank for h in mats)


def sample_channel_set(m_antennas, n_antennas, seed):
    """Draw the eight i.i.d. CN(0, 1) channel matrices for one trial.

    ``seed`` is a :class:`TrialSeed` or an integer master seed (trial 0).
    Rank-deficient draws are redrawn from the same stream, at most
    :data:`MAX_RESAMPLE` times.
    """
    if m_antennas < 1 or n_antennas < 1:
        raise ValueError("antenna counts must be positive")
    if not isinstance(seed, TrialSeed):
        seed = TrialSeed(int(seed))
    rng = seed.generator()
    rank = min(m_antennas, n_antennas)
    for _ in range(MAX_RESAMPLE):
        ups = tuple(complex_gaussian(rng, (n_antennas, m_antennas)) for _ in SOURCES)
        downs = tuple(complex_gaussian(rng, (m_antennas, n_antennas)) for _ in SOURCES)
        if _full_rank(ups, rank) and _full_rank(downs, rank):
            return ChannelSet(m_antennas, n_antennas, ups, downs)
    raise ChannelDegenerate(
        f"no full-rank draw after {MAX_RESAMPLE} attempts for {seed}"
    )
