import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate, special

from scdf.analytic import branch_cdf, branch_distribution, outage_probability
from scdf.channel import BranchParams, LinkParams, SystemConfig, asymmetric_preset, symmetric_preset
from scdf.montecarlo import (
    BLOCK_SIZE,
    block_rng,
    conditional_sep_mpsk,
    draw_branch_snr,
    simulate_capacity,
    simulate_outage,
    simulate_sep,
    simulate_sweep,
)


def rayleigh_single(antennas=2):
    lk = LinkParams(1)
    b = BranchParams(lk, lk if antennas == 2 else None, lk)
    return SystemConfig((b,), antennas=antennas, gamma_th=math.log(2))


def test_rayleigh_branch_outage():
    est = simulate_outage(rayleigh_single(), 10**6, seed=1)
    assert est.within(0.625, 3)


def test_same_seed_same_result_and_different_seed_differs():
    cfg = symmetric_preset()
    a = simulate_outage(cfg, 50_000, seed=5)
    b = simulate_outage(cfg, 50_000, seed=5)
    c = simulate_outage(cfg, 50_000, seed=6)
    assert a == b
    assert a.mean != c.mean


def test_link_mean():
    cfg = symmetric_preset(K=1)
    rng = block_rng(3, 0)
    n = 400_000
    g = np.column_stack([rng.standard_gamma(2.0, n) * 3.0 / 2.0])
    assert g.mean() == pytest.approx(3.0, abs=4 * g.std() / math.sqrt(n))
    draws = draw_branch_snr(cfg, 0, block_rng(3, 1), size=n)
    p = np.mean(draws <= 3.0)
    exact = branch_cdf(branch_distribution(cfg, 0), 3.0)
    assert abs(p - exact) < 4 * math.sqrt(exact * (1 - exact) / n)


@pytest.mark.parametrize("sampler", ["gamma", "expsum"])
def test_samplers_agree_with_closed_form(sampler):
    cfg = symmetric_preset(K=2, m=3).at_snr_db(2.0)
    est = simulate_outage(cfg, 300_000, seed=9, sampler=sampler)
    assert est.within(outage_probability(cfg), 3.5)


def test_scalar_draw():
    assert isinstance(draw_branch_snr(symmetric_preset(), 1, block_rng(0, 0)), float)


def test_zero_threshold_gives_zero_outage():
    est = simulate_outage(symmetric_preset(), 5000, seed=0, gamma_th=0.0)
    assert est.mean == 0.0 and est.std_error == 0.0


@pytest.mark.parametrize("M", [2, 4, 8, 16, 64])
def test_conditional_sep_at_zero_snr(M):
    assert conditional_sep_mpsk(0.0, M) == pytest.approx((M - 1) / M, abs=1e-15)


def test_conditional_sep_bpsk_is_q_function():
    g = np.array([0.01, 0.5, 2.0, 9.0])
    np.testing.assert_allclose(conditional_sep_mpsk(g, 2), 0.5 * special.erfc(np.sqrt(g)), rtol=1e-15)


@pytest.mark.parametrize("M", [4, 8, 16])
@pytest.mark.parametrize("g", [0.3, 3.0, 30.0])
def test_conditional_sep_matches_angular_integral(M, g):
    s = math.sin(math.pi / M) ** 2
    val = integrate.quad(lambda t: math.exp(-g * s / math.sin(t) ** 2), 0, (M - 1) * math.pi / M,
                         epsabs=0, epsrel=1e-13)[0] / math.pi
    assert conditional_sep_mpsk(g, M) == pytest.approx(val, rel=1e-11)


def test_qpsk_closed_form():
    g = 1.7
    q = 0.5 * special.erfc(math.sqrt(g / 2))
    assert conditional_sep_mpsk(g, 4) == pytest.approx(2 * q - q * q, rel=1e-14)


def test_symbol_mode_matches_rao_blackwell_mode():
    cfg = symmetric_preset(K=2).at_snr_db(6.0)
    rb = simulate_sep(cfg, 200_000, seed=2)
    sym = simulate_sep(cfg, 200_000, seed=3, mode="symbol")
    assert abs(rb.mean - sym.mean) < 3 * math.hypot(rb.std_error, sym.std_error)
    assert rb.std_error < sym.std_error


def test_zero_bandwidth_capacity():
    est = simulate_capacity(replace(symmetric_preset(), bandwidth=0.0), 5000, seed=0)
    assert est.mean == 0.0


def test_capacity_of_nearly_deterministic_links():
    lk = LinkParams(400, omega=5.0)
    cfg = SystemConfig((BranchParams(lk, lk, lk),))
    est = simulate_capacity(cfg, 20_000, seed=4)
    assert est.mean == pytest.approx(0.5 * math.log2(6.0), rel=0.01)


def test_worker_count_does_not_change_results():
    cfgs = [asymmetric_preset().at_snr_db(x) for x in (0, 5, 10)]
    n = 3 * BLOCK_SIZE + 123
    one = simulate_sweep(cfgs, "sep", n, seed=8, workers=1)
    four = simulate_sweep(cfgs, "sep", n, seed=8, workers=4)
    assert one == four


def test_standard_error_scaling():
    cfg = symmetric_preset().at_snr_db(2.0)
    a = simulate_outage(cfg, 50_000, seed=1)
    b = simulate_outage(cfg, 200_000, seed=1)
    assert b.std_error / a.std_error == pytest.approx(0.5, rel=0.2)


def test_sweep_points_equal_single_estimates():
    cfgs = [symmetric_preset().at_snr_db(x) for x in (0, 4, 8)]
    sweep = simulate_sweep(cfgs, "capacity", 20_000, seed=12)
    for cfg, est in zip(cfgs, sweep):
        assert simulate_capacity(cfg, 20_000, seed=12) == est


def test_sweep_rejects_mixed_topologies():
    with pytest.raises(ValueError):
        simulate_sweep([symmetric_preset(K=2), symmetric_preset(K=3)], "outage", 5000, 0)


@pytest.mark.parametrize("kw", [dict(n_samples=10), dict(quantity="ber"), dict(sampler="bogus")])
def test_bad_arguments(kw):
    args = dict(cfgs=[symmetric_preset()], quantity="outage", n_samples=5000, seed=0)
    args.update(kw)
    with pytest.raises(ValueError):
        simulate_sweep(**args)
