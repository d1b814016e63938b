"""Generalized signal alignment: stream split, relay combiner, precoders.

Pairs are indexed 0..3 in the order (1,3), (1,4), (2,3), (2,4). The stacked
symbol vector uses the column layout ``[s13 s14 | s23 s24 | s31 s32 | s41 s42]``
and the relay's network-coded vector follows pair order.
"""
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType

import numpy as np

from . import linalg
from .errors import Infeasible, InsufficientNullSpace, SingularEffectiveChannel, SingularMatrix

PAIR_ORDER = ((1, 3), (1, 4), (2, 3), (2, 4))

# outgoing stream blocks of each source, partner ascending
SOURCE_STREAMS = {
    1: ((1, 3), (1, 4)),
    2: ((2, 3), (2, 4)),
    3: ((3, 1), (3, 2)),
    4: ((4, 1), (4, 2)),
}


def _pair_members(k):
    return set(PAIR_ORDER[k])


# pair blocks each node takes part in, in pair order
MEMBER_BLOCKS = {
    node: tuple(k for k in range(4) if node in _pair_members(k)) for node in (1, 2, 3, 4)
}
# the two sources a pair block must cancel
EXCLUDED_SOURCES = {
    k: tuple(n for n in (1, 2, 3, 4) if n not in _pair_members(k)) for k in range(4)
}


@dataclass(frozen=True)
class StreamAllocation:
    m_antennas: int
    d: MappingProxyType

    @cached_property
    def pair_heights(self):
        """Stream count of each network-coded pair block, in pair order."""
        return tuple(self.d[p] for p in PAIR_ORDER)

    @cached_property
    def pair_offsets(self):
        return tuple(int(x) for x in np.concatenate(([0], np.cumsum(self.pair_heights[:-1]))))

    @property
    def total(self):
        return sum(self.d.values())

    def pair_slice(self, k):
        start = self.pair_offsets[k]
        return slice(start, start + self.pair_heights[k])

    @cached_property
    def column_slices(self):
        """Map each ordered pair (i, j) to its slice of the 4M symbol layout."""
        out, pos = {}, 0
        for src in (1, 2, 3, 4):
            for stream in SOURCE_STREAMS[src]:
                out[stream] = slice(pos, pos + self.d[stream])
                pos += self.d[stream]
        return out

    def source_slice(self, src):
        m = self.m_antennas
        return slice((src - 1) * m, src * m)


def allocate_streams(m_antennas):
    """Even M: M/2 streams everywhere. Odd M: favour the (1,3) and (2,4) pairs."""
    if m_antennas < 1:
        raise ValueError("M must be positive")
    if m_antennas % 2 == 0:
        big = small = m_antennas // 2
    else:
        big, small = (m_antennas + 1) // 2, (m_antennas - 1) // 2
    d = {}
    for i, j in PAIR_ORDER:
        n = big if (i, j) in ((1, 3), (2, 4)) else small
        d[(i, j)] = d[(j, i)] = n
    return StreamAllocation(m_antennas, MappingProxyType(d))


def required_block_height(m_antennas):
    return max(allocate_streams(m_antennas).pair_heights)


def gsa_feasible(m_antennas, n_antennas):
    if m_antennas < 1 or n_antennas < 1:
        raise ValueError("antenna counts must be positive")
    if m_antennas % 2 == 0:
        return m_antennas <= (2 * n_antennas) // 5
    return m_antennas <= (2 * n_antennas - 1) // 5


def sa_feasible(m_antennas, n_antennas):
    """Direct (untransformed) alignment needs N < 2M."""
    return n_antennas < 2 * m_antennas


def dof_upper_bound(m_antennas, n_antennas):
    return 2 * min(2 * m_antennas, n_antennas)


def min_relay_antennas(m_antennas):
    """Smallest N for which GSA is feasible with M source antennas."""
    return 2 * m_antennas + required_block_height(m_antennas)


@dataclass(frozen=True)
class AlignmentPattern:
    """0/1 matrix P with A H V = P, mapping s to the network-coded vector."""

    matrix: np.ndarray

    def apply(self, s):
        return self.matrix @ np.asarray(s)


def expected_pattern(alloc):
    m = alloc.m_antennas
    p = np.zeros((2 * m, 4 * m))
    cols = alloc.column_slices
    for k, (i, j) in enumerate(PAIR_ORDER):
        rows = alloc.pair_slice(k)
        eye = np.eye(alloc.pair_heights[k])
        p[rows, cols[(i, j)]] = eye
        p[rows, cols[(j, i)]] = eye
    p.setflags(write=False)
    return AlignmentPattern(p)


def _block_basis(excluded, height, what):
    basis = linalg.null_space_basis(linalg.stack_rows(excluded))
    if basis.shape[1] < height:
        raise InsufficientNullSpace(
            f"{what}: null space has dimension {basis.shape[1]}, need {height}"
        )
    return basis[:, :height]


def build_relay_combiner(ch, alloc):
    """Relay processing matrix A (2M x N).

    Row block k spans (transposed) null-space vectors of the two uplinks
    that do not belong to pair k.
    """
    _check_dims(ch, alloc)
    blocks = []
    for k in range(4):
        excluded = [ch.H(n).T for n in EXCLUDED_SOURCES[k]]
        basis = _block_basis(excluded, alloc.pair_heights[k], f"relay block {PAIR_ORDER[k]}")
        blocks.append(basis.T)
    return np.vstack(blocks)


def effective_channel(A, ch, alloc, src):
    """C_i: the source's two member row blocks of A applied to its uplink."""
    h = ch.H(src)
    return np.vstack([A[alloc.pair_slice(k)] @ h for k in MEMBER_BLOCKS[src]])


def build_source_precoders(A, ch, alloc):
    """Zero-forcing precoders V_i = C_i^{-1}, one per source."""
    out = []
    for src in (1, 2, 3, 4):
        try:
            out.append(linalg.invert(effective_channel(A, ch, alloc, src)))
        except SingularMatrix as exc:
            raise SingularEffectiveChannel(f"C_{src} is singular") from exc
    return tuple(out)


def build_bc_precoder(ch, alloc):
    """Broadcast precoder U (N x 2M) with column blocks in pair order."""
    _check_dims(ch, alloc)
    blocks = []
    for k in range(4):
        excluded = [ch.G(n) for n in EXCLUDED_SOURCES[k]]
        blocks.append(_block_basis(excluded, alloc.pair_heights[k], f"broadcast block {PAIR_ORDER[k]}"))
    return np.hstack(blocks)


def _check_dims(ch, alloc):
    if ch.m_antennas != alloc.m_antennas:
        raise ValueError(
            f"allocation is for M={alloc.m_antennas}, channels have M={ch.m_antennas}"
        )


@dataclass(frozen=True)
class GsaScheme:
    alloc: StreamAllocation
    A: np.ndarray
    V: tuple
    U: np.ndarray
    P: AlignmentPattern

    @property
    def m_antennas(self):
        return self.alloc.m_antennas

    @property
    def n_antennas(self):
        return self.A.shape[1]

    def A_block(self, k):
        return self.A[self.alloc.pair_slice(k)]

    def U_block(self, k):
        return self.U[:, self.alloc.pair_slice(k)]

    def member_U(self, node):
        return np.hstack([self.U_block(k) for k in MEMBER_BLOCKS[node]])

    def V_stacked(self):
        return linalg.block_diag(self.V)


def build_scheme(ch, alloc=None):
    """Run the four construction steps for one channel realization."""
    m, n = ch.m_antennas, ch.n_antennas
    if not gsa_feasible(m, n):
        raise Infeasible(m, n)
    alloc = alloc or allocate_streams(m)
    A = build_relay_combiner(ch, alloc)
    V = build_source_precoders(A, ch, alloc)
    U = build_bc_precoder(ch, alloc)
    return GsaScheme(alloc, A, V, U, expected_pattern(alloc))


def alignment_residual(scheme, ch):
    """||A H V - P||_F / ||P||_F."""
    ahv = scheme.A @ ch.stacked_uplink() @ scheme.V_stacked()
    p = scheme.P.matrix
    return float(np.linalg.norm(ahv - p) / np.linalg.norm(p))


def exclusion_residuals(scheme, ch):
    """Relative norms of every product that the construction forces to zero.

    Keys are ``("A", k, source)`` for ``||A_k H_source|| / ||H_source||`` and
    ``("U", k, node)`` for ``||G_node U_k|| / ||G_node||``.
    """
    out = {}
    for k in range(4):
        for n in EXCLUDED_SOURCES[k]:
            h, g = ch.H(n), ch.G(n)
            out[("A", k, n)] = float(np.linalg.norm(scheme.A_block(k) @ h) / np.linalg.norm(h))
            out[("U", k, n)] = float(np.linalg.norm(g @ scheme.U_block(k)) / np.linalg.norm(g))
    return out
