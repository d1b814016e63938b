import numpy as np
import pytest

from gsa_relay import metrics
from gsa_relay.errors import Infeasible, InsufficientPoints

from conftest import draw


def oracle_rates(scheme, ch, snr_db, sigma2):
    """Explicit-matrix evaluation of the AF rate with a raw determinant."""
    m = scheme.m_antennas
    total = 10 ** (snr_db / 10) * sigma2
    ps = total / sum(np.trace(v @ v.conj().T).real for v in scheme.V)
    u, a = scheme.U, scheme.A
    relay_cov = 2 * ps * np.eye(2 * m) + sigma2 * a @ a.conj().T
    beta = np.sqrt(total / np.trace(u @ relay_cov @ u.conj().T).real)
    member = {1: [0, 1], 2: [2, 3], 3: [0, 2], 4: [1, 3]}
    out = []
    for node in (1, 2, 3, 4):
        g = ch.G(node)
        cols = np.concatenate([np.arange(2 * m)[scheme.alloc.pair_slice(k)] for k in member[node]])
        g_eff = beta * g @ u[:, cols]
        noise_map = beta * g @ u @ a
        cov_n = sigma2 * (noise_map @ noise_map.conj().T + np.eye(m))
        arg = np.eye(m) + np.linalg.inv(cov_n) @ g_eff @ (ps * np.eye(m)) @ g_eff.conj().T
        out.append(np.log2(abs(np.linalg.det(arg))))
    return np.array(out)


@pytest.mark.parametrize("m, n", [(2, 5), (3, 8)])
@pytest.mark.parametrize("snr_db", [0.0, 17.0, 45.0])
def test_sum_rate_matches_oracle(m, n, snr_db):
    ch, scheme = draw(m, n, seed=21)
    point = metrics.sum_rate_af(scheme, ch, snr_db, sigma2=0.8)
    np.testing.assert_allclose(point.per_node_rate, oracle_rates(scheme, ch, snr_db, 0.8), rtol=1e-9)
    assert point.sum_rate == pytest.approx(sum(point.per_node_rate), abs=1e-12)


def test_zero_signal_limit():
    ch, scheme = draw(2, 5)
    point = metrics.sum_rate_af(scheme, ch, -200.0)
    assert max(point.per_node_rate) < 1e-15


def test_rates_monotone_in_snr():
    ch, scheme = draw(2, 5, seed=3)
    grid = np.arange(0, 51, 10)
    rates = metrics.rate_grid(scheme, ch, grid)
    assert (rates >= 0).all()
    assert (np.diff(rates, axis=0) >= -1e-9).all()
    fine = metrics.rate_grid(scheme, ch, np.linspace(-10, 60, 141)).sum(axis=1)
    assert (np.diff(fine) >= -1e-9).all()


def synthetic(rates, snr):
    return metrics.SweepResult(tuple(
        metrics.SweepPoint(float(s), float(r), 0.0, 1) for s, r in zip(snr, rates)
    ))


def test_estimate_dof_linear():
    snr = np.arange(0, 51, 5.0)
    sweep = synthetic(8 * snr / 3 + 1.5, snr)
    assert metrics.estimate_dof(sweep, (0, 50)) == pytest.approx(8.0, abs=1e-9)
    assert metrics.estimate_dof(sweep, (40, 50)) == pytest.approx(8.0, abs=1e-9)


def test_estimate_dof_needs_points():
    snr = np.arange(0, 51, 5.0)
    with pytest.raises(InsufficientPoints):
        metrics.estimate_dof(synthetic(snr, snr), (41, 44))


def test_sweep_result_validation():
    with pytest.raises(ValueError):
        synthetic([1, 2], [10, 10])


def test_sweep_single_trial():
    sweep = metrics.monte_carlo_sweep(2, 5, [10.0, 20.0], trials=1, master_seed=5)
    assert all(p.std_error == 0.0 and p.trials == 1 for p in sweep.points)


def test_sweep_deterministic():
    a = metrics.monte_carlo_sweep(2, 5, [0.0, 30.0], trials=20, master_seed=9)
    b = metrics.monte_carlo_sweep(2, 5, [0.0, 30.0], trials=20, master_seed=9)
    assert a == b


def test_sweep_parallel_matches_serial():
    grid = [10.0, 40.0]
    serial = metrics.monte_carlo_sweep(2, 5, grid, trials=24, master_seed=3, workers=1)
    parallel = metrics.monte_carlo_sweep(2, 5, grid, trials=24, master_seed=3, workers=3)
    assert serial == parallel


def test_prefix_stability():
    short = metrics.trial_rate_matrix(2, 5, [20.0, 40.0], 10, 77)
    long = metrics.trial_rate_matrix(2, 5, [20.0, 40.0], 20, 77)
    np.testing.assert_array_equal(short, long[:10])


def test_sweep_statistics_match_trials():
    grid = [20.0]
    rates = metrics.trial_rate_matrix(2, 5, grid, 30, 1)[:, 0]
    sweep = metrics.monte_carlo_sweep(2, 5, grid, trials=30, master_seed=1)
    assert sweep.points[0].mean_sum_rate == pytest.approx(rates.mean(), rel=1e-14)
    assert sweep.points[0].std_error == pytest.approx(rates.std(ddof=1) / np.sqrt(30), rel=1e-12)


def test_sweep_infeasible():
    with pytest.raises(Infeasible):
        metrics.monte_carlo_sweep(3, 7, [0.0], trials=1)


@pytest.mark.slow
def test_dof_slope_m2_n5():
    sweep = metrics.monte_carlo_sweep(2, 5, [40.0, 43.0, 46.0, 49.0], trials=500, master_seed=42)
    assert metrics.estimate_dof(sweep, (40, 49)) == pytest.approx(8, rel=0.10)
