import numpy as np
import pytest
from hypothesis import given, strategies as st

from gsa_relay import core
from gsa_relay.channel import TrialSeed, sample_channel_set
from gsa_relay.errors import Infeasible, InsufficientNullSpace

from conftest import draw


def test_allocation_m2():
    alloc = core.allocate_streams(2)
    assert set(alloc.d.values()) == {1}
    assert len(alloc.d) == 8


def test_allocation_m4():
    assert set(core.allocate_streams(4).d.values()) == {2}


def test_allocation_m3():
    d = core.allocate_streams(3).d
    assert [d[p] for p in ((1, 3), (3, 1), (2, 4), (4, 2))] == [2, 2, 2, 2]
    assert [d[p] for p in ((1, 4), (4, 1), (2, 3), (3, 2))] == [1, 1, 1, 1]
    assert core.allocate_streams(3).pair_heights == (2, 1, 1, 2)


@given(st.integers(1, 40))
def test_allocation_invariants(m):
    alloc = core.allocate_streams(m)
    d = alloc.d
    for i, j in core.PAIR_ORDER:
        assert d[(i, j)] == d[(j, i)]
    for src, streams in core.SOURCE_STREAMS.items():
        assert sum(d[s] for s in streams) == m
    assert alloc.total == 4 * m
    assert sum(alloc.pair_heights) == 2 * m


@pytest.mark.parametrize("m, n, want", [(2, 5, True), (3, 7, False), (3, 8, True), (4, 9, False), (4, 10, True)])
def test_gsa_feasible(m, n, want):
    assert core.gsa_feasible(m, n) is want


@pytest.mark.parametrize("m, n, want", [(2, 3, True), (2, 5, False), (4, 8, False)])
def test_sa_feasible(m, n, want):
    assert core.sa_feasible(m, n) is want


@pytest.mark.parametrize("m, n, want", [(2, 5, 8), (4, 10, 16), (3, 5, 10)])
def test_dof_upper_bound(m, n, want):
    assert core.dof_upper_bound(m, n) == want


@given(st.integers(1, 30), st.integers(1, 80))
def test_feasibility_consistency(m, n):
    if core.gsa_feasible(m, n):
        assert n - 2 * m >= core.required_block_height(m)
        assert core.gsa_feasible(m, n + 1)
        assert core.dof_upper_bound(m, n) == 4 * m
    assert core.gsa_feasible(m, n) == (n >= core.min_relay_antennas(m))


def test_pattern_m2():
    p = core.expected_pattern(core.allocate_streams(2)).matrix
    assert p.shape == (4, 8)
    # s = [s13 s14 s23 s24 s31 s32 s41 s42]
    assert np.flatnonzero(p[0]).tolist() == [0, 4]
    assert np.flatnonzero(p[1]).tolist() == [1, 6]
    assert np.flatnonzero(p[2]).tolist() == [2, 5]
    assert np.flatnonzero(p[3]).tolist() == [3, 7]


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
def test_pattern_sums(m):
    p = core.expected_pattern(core.allocate_streams(m)).matrix
    assert (p.sum(axis=0) == 1).all()
    assert (p.sum(axis=1) == 2).all()


def test_pattern_m3_first_block():
    p = core.expected_pattern(core.allocate_streams(3)).matrix
    assert p.shape == (6, 12)
    # 1-based columns {1,2} and {7,8}
    assert np.flatnonzero(p[0]).tolist() == [0, 6]
    assert np.flatnonzero(p[1]).tolist() == [1, 7]


def test_relay_combiner_m2():
    ch, _ = draw(2, 5)
    alloc = core.allocate_streams(2)
    a = core.build_relay_combiner(ch, alloc)
    assert a.shape == (4, 5)
    assert np.linalg.norm(a[0:1] @ ch.H(2)) < 1e-10
    assert np.linalg.norm(a[0:1] @ ch.H(4)) < 1e-10


def test_relay_combiner_m4():
    ch, _ = draw(4, 10)
    alloc = core.allocate_streams(4)
    a = core.build_relay_combiner(ch, alloc)
    assert a.shape == (8, 10)
    for k in range(4):
        block = a[alloc.pair_slice(k)]
        assert block.shape == (2, 10)
        np.testing.assert_allclose(block @ block.conj().T, np.eye(2), atol=1e-12)
        for n in core.EXCLUDED_SOURCES[k]:
            assert np.linalg.norm(block @ ch.H(n)) < 1e-8


@pytest.mark.parametrize("m, n", [(3, 7), (4, 9)])
def test_relay_combiner_insufficient(m, n):
    ch = sample_channel_set(m, n, TrialSeed(1))
    with pytest.raises(InsufficientNullSpace):
        core.build_relay_combiner(ch, core.allocate_streams(m))


@pytest.mark.parametrize("m, n", [(2, 5), (3, 8)])
def test_source_precoders(m, n):
    ch, _ = draw(m, n)
    alloc = core.allocate_streams(m)
    a = core.build_relay_combiner(ch, alloc)
    v = core.build_source_precoders(a, ch, alloc)
    for src in (1, 2, 3, 4):
        c = core.effective_channel(a, ch, alloc, src)
        assert c.shape == (m, m)
        np.testing.assert_allclose(v[src - 1] @ c, np.eye(m), atol=1e-9)
    ahv = a @ ch.stacked_uplink() @ core.linalg.block_diag(v)
    p = core.expected_pattern(alloc).matrix
    assert np.linalg.norm(ahv - p) < 1e-8


def test_effective_channel_matches_paper_layout():
    # for M=2, C_3 collects rows a_1 and a_3 of A H over source 3's columns
    ch, _ = draw(2, 5)
    alloc = core.allocate_streams(2)
    a = core.build_relay_combiner(ch, alloc)
    ah = a @ ch.stacked_uplink()
    np.testing.assert_allclose(core.effective_channel(a, ch, alloc, 3), ah[[0, 2]][:, 4:6])
    np.testing.assert_allclose(core.effective_channel(a, ch, alloc, 4), ah[[1, 3]][:, 6:8])


def test_bc_precoder_m2():
    ch, _ = draw(2, 5)
    u = core.build_bc_precoder(ch, core.allocate_streams(2))
    assert u.shape == (5, 4)
    assert np.linalg.norm(ch.G(2) @ u[:, :1]) < 1e-10
    assert np.linalg.norm(ch.G(4) @ u[:, :1]) < 1e-10


def test_bc_precoder_m4():
    ch, scheme = draw(4, 10)
    for k in range(4):
        blk = scheme.U_block(k)
        np.testing.assert_allclose(blk.conj().T @ blk, np.eye(2), atol=1e-12)
        for n in core.EXCLUDED_SOURCES[k]:
            assert np.linalg.norm(ch.G(n) @ blk) < 1e-8


def test_bc_precoder_insufficient():
    ch = sample_channel_set(2, 4, TrialSeed(1))
    with pytest.raises(InsufficientNullSpace):
        core.build_bc_precoder(ch, core.allocate_streams(2))


def test_build_scheme_infeasible():
    with pytest.raises(Infeasible):
        core.build_scheme(sample_channel_set(3, 7, TrialSeed(1)))


@pytest.mark.parametrize("m, n", [(1, 3), (2, 5), (2, 7), (3, 8), (3, 9), (4, 10), (5, 13), (6, 15)])
def test_alignment_exact_over_draws(m, n):
    for t in range(50):
        ch, scheme = draw(m, n, seed=11, trial=t)
        assert core.alignment_residual(scheme, ch) < 1e-8
        assert max(core.exclusion_residuals(scheme, ch).values()) < 1e-8


def test_exclusion_keys():
    ch, scheme = draw(2, 5)
    res = core.exclusion_residuals(scheme, ch)
    assert len(res) == 16
    assert ("A", 0, 2) in res and ("U", 3, 3) in res


def test_scheme_is_deterministic():
    _, a = draw(3, 8, seed=4)
    _, b = draw(3, 8, seed=4)
    np.testing.assert_array_equal(a.A, b.A)
    np.testing.assert_array_equal(a.U, b.U)
