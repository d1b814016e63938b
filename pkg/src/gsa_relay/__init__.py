"""Generalized signal alignment (GSA) for the MIMO two-way X relay channel.

Builds the relay combiner, source precoders and broadcast precoder for a
channel draw, runs the two-phase amplify-and-forward exchange, and measures
sum rate and its high-SNR slope.
"""
from ._backend import BACKEND
from .channel import ChannelSet, TrialSeed, sample_channel_set
from .core import (
    AlignmentPattern,
    GsaScheme,
    StreamAllocation,
    allocate_streams,
    build_bc_precoder,
    build_relay_combiner,
    build_scheme,
    build_source_precoders,
    dof_upper_bound,
    expected_pattern,
    gsa_feasible,
    sa_feasible,
)
from .errors import (
    ChannelDegenerate,
    GsaError,
    Infeasible,
    InsufficientNullSpace,
    InsufficientPoints,
    NotPositiveDefinite,
    SingularEffectiveChannel,
    SingularMatrix,
)
from .metrics import RatePoint, SweepResult, estimate_dof, monte_carlo_sweep, sum_rate_af
from .transceiver import SymbolFrame, TransmissionResult, bc_phase, decode_destination, mac_phase, transmit

__version__ = "0.1.0"
