import math

import pytest

import fbd


def test_kernel_row_paths_agree():
    a = fbd.kernel_row(3.0, 20, "bessel")
    b = fbd.kernel_row(3.0, 20, "fourier")
    assert len(a) == 21
    assert max(abs(x - y) for x, y in zip(a, b)) < 1e-10
    assert abs(a[0] + 2 * sum(a[1:]) - 1.0) < 1e-6


def test_smooth_demo_critical_values():
    pot = fbd.Potential.smooth_demo()
    assert pot.u_star_lo == pytest.approx(-pot.u_star_hi)
    assert pot.p_star_hi == pytest.approx(pot.dphi(pot.u_star_lo))
    assert pot.dphi(pot.u_hash_hi) == pytest.approx(pot.p_star_hi)


def test_single_interface_log():
    r = fbd.run_single_interface(eps=0.1, tau_end=0.2)
    assert r["log_ok"]
    assert len(r["k"]) >= 1
    assert all(abs(j - 4.0) < 1e-8 for j in r["jump"])
    assert all(u > 2.0 for u in r["u_left"])


def test_limit_solve_moves_right():
    s = fbd.solve_limit(tau_end=0.05)
    assert s["xi_star"][-1] > s["xi_star"][0]
    assert s["max_conservation_error"] < 1e-10


def test_preset_runs_and_unknown_preset_rejected():
    r = fbd.run_preset("transient-spinodal")
    assert r["passed"]
    assert len(r["u"]) == len(r["tau"])
    with pytest.raises(fbd.ConfigError):
        fbd.run_preset("nope")


def test_config_hash_is_stable():
    h = fbd.config_hash('{"a": 1}')
    assert len(h) == 16
    assert h == fbd.config_hash('{"a":1}')
    assert not math.isnan(int(h, 16))
