import math

import numpy as np
import pytest

from emachine import pmm
from emachine.errors import ConfigurationError, StepSizeError

# frozen from a 50-digit evaluation of the GHK current law
# (p=1e-6, z=1, T=300 K, C_in=0.14, C_out=0.005, V=0.05)
GHK_PIN_V005 = 0.0303821107448072926
# frozen analytic transient of the symmetric two-state chain, rate 1
P0_ANALYTIC = {0.5: 0.6839397205857211608,
               1.0: 0.56766764161830634595,
               2.0: 0.50915781944436709015}


def two_state(a10=2.0, a01=3.0):
    def rate(x, frm, to):
        if (frm, to) == (0, 1):
            return a10
        if (frm, to) == (1, 0):
            return a01
        return 0.0
    return pmm.PmmSpec(2, rate, lambda x, s: float(s))


def test_master_step_zero_rates_fixed_point():
    spec = pmm.PmmSpec(3, lambda x, f, t: 0.0, lambda x, s: 0.0)
    P = np.array([0.2, 0.5, 0.3])
    assert np.allclose(pmm.master_step(P, (), spec, 0.01), P)


def test_master_step_two_state_equilibrium():
    spec = two_state(a10=2.0, a01=3.0)
    P = np.array([1.0, 0.0])
    for _ in range(4000):
        P = pmm.master_step(P, (), spec, 0.02)
    assert P[1] == pytest.approx(0.4, abs=1e-9)


def test_master_step_symmetric_transient_matches_analytic():
    spec = two_state(a10=1.0, a01=1.0)
    P = np.array([1.0, 0.0])
    t = 0.0
    for _ in range(200):
        P = pmm.master_step(P, (), spec, 0.01)
        t += 0.01
        for probe, want in P0_ANALYTIC.items():
            if abs(t - probe) < 1e-9:
                assert P[0] == pytest.approx(want, abs=1e-6)


def test_master_step_rejects_coarse_dt():
    spec = two_state(a10=100.0, a01=1.0)
    with pytest.raises(StepSizeError):
        pmm.master_step(np.array([1.0, 0.0]), (), spec, 0.01)


def test_negative_rate_rejected():
    spec = pmm.PmmSpec(2, lambda x, f, t: -1.0, lambda x, s: 0.0)
    with pytest.raises(ConfigurationError):
        spec.rate_matrix(())


def test_conservation_residual():
    assert pmm.conservation_residual([0.25, 0.75]) == 0.0
    assert pmm.conservation_residual([0.25, 0.74]) == pytest.approx(0.01)
    spec = two_state()
    P = np.array([1.0, 0.0])
    for _ in range(5000):
        P = pmm.master_step(P, (), spec, 0.02)
    assert pmm.conservation_residual(P) < 1e-12


def test_sample_path_absorbing_when_rates_vanish():
    spec = pmm.PmmSpec(2, lambda x, f, t: 0.0, lambda x, s: 0.0)
    events = pmm.sample_path(spec, [(0.0, ())], s0=1, t_end=10.0, seed=0)
    assert events == [(0.0, 1)]


def test_sample_path_occupancy_matches_equilibrium():
    spec = two_state(a10=1.0, a01=1.0)
    n_paths = 10000
    hits = sum(pmm.state_at(pmm.sample_path(spec, [(0.0, ())], 0, 5.0, seed=k), 5.0) == 0
               for k in range(n_paths))
    p = 0.5 * (1.0 + math.exp(-10.0))
    sigma = math.sqrt(p * (1 - p) / n_paths)
    assert abs(hits / n_paths - p) <= 3 * sigma


def test_sample_path_tracks_master_equation_at_probe_times():
    # 10^4 paths against the analytic master-equation solution of the
    # symmetric chain, binomial bands at five probe times
    spec = two_state(a10=1.0, a01=1.0)
    probes = (0.25, 0.5, 1.0, 2.0, 4.0)
    n_paths = 10000
    paths = [pmm.sample_path(spec, [(0.0, ())], 0, 4.0, seed=30000 + k)
             for k in range(n_paths)]
    for t in probes:
        p = 0.5 * (1.0 + math.exp(-2.0 * t))
        hits = sum(pmm.state_at(ev, t) == 0 for ev in paths)
        sigma = math.sqrt(p * (1 - p) / n_paths)
        assert abs(hits / n_paths - p) <= 3 * sigma, f"t={t}"


def test_sample_path_first_dwell_is_exponential_mean():
    # exit rate 3 from state 0: dwell mean 1/3; long horizon avoids censoring
    spec = two_state(a10=3.0, a01=0.0)
    dwells = []
    for k in range(10000):
        ev = pmm.sample_path(spec, [(0.0, ())], 0, 1000.0, seed=k)
        assert len(ev) == 2
        dwells.append(ev[1][0])
    mean = float(np.mean(dwells))
    sigma = (1 / 3) / math.sqrt(len(dwells))  # exponential sd equals the mean
    assert abs(mean - 1 / 3) <= 3 * sigma


def test_sample_path_input_switch_restarts_clock():
    # rates zero in the first segment, positive afterwards: the first jump
    # must land after the switch point
    def rate(x, frm, to):
        return x[0] if (frm, to) == (0, 1) else 0.0
    spec = pmm.PmmSpec(2, rate, lambda x, s: 0.0)
    for seed in range(50):
        ev = pmm.sample_path(spec, [(0.0, (0.0,)), (2.0, (5.0,))], 0, 10.0, seed=seed)
        if len(ev) > 1:
            assert ev[1][0] > 2.0


def test_sample_path_reproducible():
    spec = two_state()
    a = pmm.sample_path(spec, [(0.0, ())], 0, 20.0, seed=7)
    b = pmm.sample_path(spec, [(0.0, ())], 0, 20.0, seed=7)
    assert a == b


def channel_params():
    return pmm.ChannelParams(permeabilities=(1e-6,), z=1, T=300.0,
                             C_in=0.14, C_out=0.005)


def test_ghk_v_to_zero_limit():
    par = channel_params()
    want = 1e-6 * 1 * pmm.FARADAY * (0.14 - 0.005)
    assert pmm.ghk_current(0.0, 0, par) == pytest.approx(want, rel=1e-9)


def test_ghk_zero_at_nernst_potential():
    par = channel_params()
    v_rev = pmm.nernst_potential(par)
    assert abs(pmm.ghk_current(v_rev, 0, par)) < 1e-15


def test_ghk_sign_flips_across_reversal():
    par = channel_params()
    v_rev = pmm.nernst_potential(par)
    assert pmm.ghk_current(v_rev + 0.01, 0, par) > 0
    assert pmm.ghk_current(v_rev - 0.01, 0, par) < 0


def test_ghk_regression_pin():
    par = channel_params()
    assert pmm.ghk_current(0.05, 0, par) == pytest.approx(GHK_PIN_V005, rel=1e-12)


def test_ghk_series_branch_agrees_with_exact_formula():
    # just below the |zV'| = 1e-6 cutover the implementation switches to its
    # series; compare against a direct float evaluation of the current law
    par = channel_params()
    v_cut = 1e-6 * pmm.GAS_CONSTANT * 300.0 / pmm.FARADAY
    for v in (v_cut * 0.999, -v_cut * 0.999, v_cut * 0.1):
        w = par.z * v * pmm.FARADAY / (pmm.GAS_CONSTANT * par.T)
        exact = (1e-6 * par.z * pmm.FARADAY * w
                 * (par.C_in - par.C_out * math.exp(-w)) / (-math.expm1(-w)))
        assert pmm.ghk_current(v, 0, par) == pytest.approx(exact, rel=1e-10)


def test_ghk_continuity_at_zero():
    par = channel_params()
    i0 = pmm.ghk_current(0.0, 0, par)
    for v in (1e-9, -1e-9):
        assert abs(pmm.ghk_current(v, 0, par) - i0) < 1e-6 * abs(i0 + 1.0)


def test_ghk_divalent_ion():
    par = pmm.ChannelParams(permeabilities=(1e-6,), z=2, T=300.0,
                            C_in=0.1, C_out=0.001)
    v_rev = pmm.nernst_potential(par)
    assert abs(pmm.ghk_current(v_rev, 0, par)) < 1e-12
    assert pmm.ghk_current(0.0, 0, par) == pytest.approx(
        1e-6 * 2 * pmm.FARADAY * (0.1 - 0.001), rel=1e-9)


def ring_spec():
    return pmm.channel5_spec(
        pmm.SigmoidRate(1000.0, -0.030, 0.005),
        pmm.SigmoidRate(1000.0, -0.050, 0.006),
        pmm.SigmoidRate(1000.0, -0.050, 0.006),
        200.0, 50.0)


def test_channel5_sigmoid_limits():
    spec = ring_spec()
    lo = spec.rate_matrix((-10.0,))
    hi = spec.rate_matrix((10.0,))
    for (frm, to) in ((0, 1), (1, 2), (2, 3)):
        assert lo[to, frm] < 1e-6
        assert hi[to, frm] == pytest.approx(1000.0, rel=1e-9)
    # constant links unaffected by voltage
    assert lo[4, 3] == hi[4, 3] == 200.0
    assert lo[0, 4] == hi[0, 4] == 50.0


def test_channel5_forward_ring_only():
    spec = ring_spec()
    A = spec.rate_matrix((0.0,))
    allowed = {(1, 0), (2, 1), (3, 2), (4, 3), (0, 4)}
    nz = {(i, j) for i in range(5) for j in range(5) if A[i, j] != 0.0}
    assert nz == allowed


def test_channel5_a10_monotone_in_v():
    spec = ring_spec()
    grid = np.linspace(-0.1, 0.06, 33)
    rates = [spec.rate_matrix((float(v),))[1, 0] for v in grid]
    assert all(b >= a for a, b in zip(rates, rates[1:]))


def test_channel5_rejects_nonpositive_amplitude():
    with pytest.raises(ConfigurationError):
        pmm.SigmoidRate(0.0, -0.03, 0.005)
    with pytest.raises(ConfigurationError):
        pmm.channel5_spec(pmm.SigmoidRate(1.0, 0, 1), pmm.SigmoidRate(1.0, 0, 1),
                          pmm.SigmoidRate(1.0, 0, 1), -1.0, 50.0)


def test_channel5_permeability_variants():
    assert pmm.channel5_permeabilities("na", 2e-6) == (0, 0, 0, 2e-6, 0)
    assert pmm.channel5_permeabilities("k", 1e-6) == (0, 0, 0, 1e-6, 1e-6)
    with pytest.raises(ConfigurationError):
        pmm.channel5_permeabilities("ca", 1e-6)


def test_channel5_extra_rates_extend_the_ring():
    spec = pmm.channel5_spec(
        pmm.SigmoidRate(100.0, -0.03, 0.005), pmm.SigmoidRate(100.0, -0.05, 0.006),
        pmm.SigmoidRate(100.0, -0.05, 0.006), 20.0, 5.0,
        extra_rates={(1, 0): lambda V: 7.0})
    assert spec.rate_matrix((0.0,))[0, 1] == 7.0


def test_spec_from_json_matches_manual_build():
    doc = {"states": 2,
           "rates": [{"from": 0, "to": 1, "kind": "const", "params": {"rate": 2.0}},
                     {"from": 1, "to": 0, "kind": "const", "params": {"rate": 3.0}}],
           "omega": {"kind": "table", "values": [0.0, 1.0]}}
    spec = pmm.pmm_spec_from_json(doc)
    P = np.array([1.0, 0.0])
    for _ in range(3000):
        P = pmm.master_step(P, (0.0,), spec, 0.02)
    assert P[1] == pytest.approx(0.4, abs=1e-9)
    assert spec.output_fn((0.0,), 1) == 1.0


def test_spec_from_json_ghk_binding():
    doc = {"states": 1, "rates": [],
           "omega": {"kind": "ghk",
                     "channel": {"permeabilities": [1e-6], "z": 1, "T": 300.0,
                                 "C_in": 0.14, "C_out": 0.005}}}
    spec = pmm.pmm_spec_from_json(doc)
    assert spec.output_fn((0.05,), 0) == pytest.approx(GHK_PIN_V005, rel=1e-12)
