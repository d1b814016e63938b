"""Exception types raised by the GSA relay library."""


class GsaError(Exception):
    """Base class for all library errors."""


class SingularMatrix(GsaError):
    """A square matrix is numerically rank deficient."""


class SingularEffectiveChannel(SingularMatrix):
    """An effective channel block (C_i or a destination channel) cannot be inverted.

    Happens with probability zero for Rayleigh draws; callers resample.
    """


class NotPositiveDefinite(GsaError):
    """A Cholesky pivot was non-positive."""


class ChannelDegenerate(GsaError):
    """Channel resampling did not produce full-rank matrices."""


class InsufficientNullSpace(GsaError):
    """A null space is smaller than the block it must host."""


class Infeasible(GsaError):
    """The antenna configuration (M, N) does not admit the GSA construction."""

    def __init__(self, m_antennas, n_antennas, message=None):
        self.m_antennas = m_antennas
        self.n_antennas = n_antennas
        super().__init__(
            message
            or f"GSA infeasible for M={m_antennas}, N={n_antennas}"
        )


class InsufficientPoints(GsaError):
    """Too few sweep points fall inside the slope-estimation window."""
