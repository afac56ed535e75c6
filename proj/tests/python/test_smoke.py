import math

import pytest

import mmra


def test_moments_and_heuristic():
    mo = mmra.analytic_moments(mmra.BetaDistribution(10.0, 0.25))
    assert mo.mean == pytest.approx(10.0)
    assert mo.inv_sq_mean == pytest.approx(1.0 / 93.75)
    assert abs(mmra.solve_s0() - 3.92) <= 0.01
    h = mmra.heuristic_params(300, 100, 800, mo)
    assert h.tau_p_h == 100.0
    assert not h.clamped


def test_bounds_ordering():
    dist = mmra.BetaDistribution(10.0, 0.25)
    mo = mmra.analytic_moments(dist)
    p = mmra.SystemParams(M=32, K=50, tau_u=60, tau_p=10, p_a=0.2)
    r1 = mmra.rate1_mc(p, dist, 10000, 1)
    r2 = mmra.rate2(p, mo)
    r3 = mmra.rate3(p, mo)
    assert r3.value <= r2.value <= r1.value + 3 * r1.std_error
    assert r1.bound_id == mmra.BoundId.R1
    assert r2.std_error == 0.0


def test_sinr_identity():
    s = mmra.CollisionScenario(4, 10.0, [8.0], [9.0, 11.0])
    p = mmra.SystemParams(M=64, K=4, tau_u=30, tau_p=5, p_a=1.0)
    assert mmra.sinr1(s, p) == pytest.approx(mmra.sinr1_via_estimation(s, p), rel=1e-12)


def test_optimizer_and_simulator():
    mo = mmra.analytic_moments(mmra.BetaDistribution(10.0, 0.25))
    opt = mmra.grid_optimize_r3(300, 100, 800, mo)
    assert (opt.tau_p_opt, opt.pa_k_opt) == (100, 62)
    p = mmra.SystemParams(M=16, K=10, tau_u=30, tau_p=5, p_a=0.3)
    emp = mmra.empirical_rate(p, mmra.BetaDistribution(10.0, 0.25), 2000, 3)
    assert emp.value > 0 and emp.n_slots == 2000
    pts = mmra.scaling_probe(mmra.ScalingRegime.Balanced, [(256, 256), (1024, 1024)], 800, mo)
    assert pts[1].rate_h / pts[0].rate_h == pytest.approx(4.0)


def test_experiment_runners():
    cfg = mmra.parse_config("experiment_id = fig2\nM = 16\ntau_u = 60\nmc_samples = 2000\n")
    records, csv_text = mmra.run_fig2(cfg)
    assert [r["point"] for r in records] == ["heur", "opt"]
    assert csv_text.splitlines()[0] == "tau_u,M,point,tau_p,paK,R1,R1_stderr,R2,R3"
    assert all(math.isfinite(r["R1"]) for r in records)
    rows, _ = mmra.run_scaling(mmra.default_config(mmra.ExperimentId.Scaling))
    assert len(rows) == 9


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        mmra.parse_config("experiment_id = nope\n")
    with pytest.raises(ValueError):
        mmra.SystemParams(M=1, K=1, tau_u=2, tau_p=1, p_a=1.0)
    with pytest.raises(ValueError):
        mmra.analytic_moments(mmra.BetaDistribution(1.0, 1.0))
