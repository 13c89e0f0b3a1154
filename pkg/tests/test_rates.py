import numpy as np
import pytest

from etpasens.config import evolve
from etpasens.rates import (
    coefficients,
    pair_flux,
    per_pulse_rates,
    quantum_advantage,
    single_photon_flux,
)

from conftest import random_config

# frozen by direct arithmetic on the published Geneva inputs
GENEVA_SIGNAL_FLUX = 4.2421383647798743e18
GENEVA_PAIR_FLUX = 1.3530630004464107e38
GENEVA_ADVANTAGE = 1428571.4285714284
BOULDER_FS_ADVANTAGE = 50.1925925925926


def test_single_photon_flux_trivial(geneva):
    assert single_photon_flux(evolve(geneva, N_P=0.0)) == 0.0
    unit = evolve(
        geneva, pump_mode="pulsed", eta_s=1.0, N_P=1.0, A=1.0, T=1.0, f_rep=123.0
    )
    assert single_photon_flux(unit, "signal") == 1.0


def test_single_photon_flux_geneva(geneva):
    assert single_photon_flux(geneva, "signal") == pytest.approx(
        GENEVA_SIGNAL_FLUX, rel=1e-12
    )
    assert single_photon_flux(geneva, "idler") == pytest.approx(
        GENEVA_SIGNAL_FLUX, rel=1e-12
    )
    with pytest.raises(ValueError, match="arm"):
        single_photon_flux(geneva, "pump")


def test_pair_flux_geneva(geneva):
    assert pair_flux(evolve(geneva, N_P=0.0)) == 0.0
    assert pair_flux(geneva) == pytest.approx(GENEVA_PAIR_FLUX, rel=1e-12)


def test_pair_flux_symmetry_case(geneva):
    # with A_e = A and T_e = T the pair flux is the signal flux times eta_i/(A T)
    cfg = evolve(geneva, A_e=geneva.A, T_e=geneva.T)
    expected = single_photon_flux(cfg, "signal") * cfg.eta_i / (cfg.A * cfg.T)
    assert pair_flux(cfg) == pytest.approx(expected, rel=1e-12)


def test_quantum_advantage_values(geneva, boulder_fs):
    assert quantum_advantage(geneva) == pytest.approx(GENEVA_ADVANTAGE, rel=1e-12)
    assert quantum_advantage(boulder_fs) == pytest.approx(
        BOULDER_FS_ADVANTAGE, rel=1e-12
    )
    same = evolve(geneva, A_e=geneva.A, T_e=geneva.T)
    assert quantum_advantage(same) == pytest.approx(1.0, rel=1e-15)
    doubled = evolve(geneva, extra_enhancement=2.0)
    assert quantum_advantage(doubled) == pytest.approx(2 * GENEVA_ADVANTAGE, rel=1e-12)


def test_coefficients_zero_cross_section(geneva):
    co = coefficients(geneva, 0.0)
    assert co.epsilon_c == 0.0
    assert co.epsilon_e == 0.0
    assert co.epsilon_h > 0.0
    with pytest.raises(ValueError):
        coefficients(geneva, -1e-50)


def test_coefficient_ratio_matches_advantage(geneva, boulder_fs):
    for cfg in (geneva, boulder_fs):
        co = coefficients(cfg, 1e-48)
        assert co.epsilon_e / co.epsilon_c == pytest.approx(
            quantum_advantage(cfg), rel=1e-12
        )


def test_coefficient_ratio_property_randomized():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        cfg = random_config(rng)
        co = coefficients(cfg, 3.7e-49)
        assert co.epsilon_e / co.epsilon_c == pytest.approx(
            quantum_advantage(cfg), rel=1e-12
        )


def test_per_pulse_rates_zero_pairs(geneva):
    r = per_pulse_rates(evolve(geneva, N_P=0.0), 1e-48)
    assert (r.f_c, r.f_ent, r.f_h) == (0.0, 0.0, 0.0)


def test_per_pulse_scaling_laws():
    rng = np.random.default_rng(7)
    sigma = 2.5e-49
    for _ in range(20):
        cfg = random_config(rng)
        base = per_pulse_rates(cfg, sigma)
        for factor in (2.0, 8.0, 1024.0):
            scaled = per_pulse_rates(evolve(cfg, N_P=cfg.N_P * factor), sigma)
            assert scaled.f_c == pytest.approx(base.f_c * factor**2, rel=1e-12)
            assert scaled.f_ent == pytest.approx(base.f_ent * factor, rel=1e-12)
            assert scaled.f_h == pytest.approx(base.f_h * factor, rel=1e-12)


def test_rate_ratio_identity(geneva):
    # pair-driven over uncorrelated rate equals advantage per pair
    r = per_pulse_rates(geneva, 1e-47)
    assert r.f_ent / r.f_c == pytest.approx(
        quantum_advantage(geneva) / geneva.N_P, rel=1e-12
    )


def test_loss_symmetry():
    rng = np.random.default_rng(99)
    sigma = 1e-48
    for _ in range(20):
        cfg = random_config(rng)
        swapped = evolve(cfg, eta_s=cfg.eta_i, eta_i=cfg.eta_s)
        a, b = per_pulse_rates(cfg, sigma), per_pulse_rates(swapped, sigma)
        assert a.f_c == pytest.approx(b.f_c, rel=1e-12)
        assert a.f_ent == pytest.approx(b.f_ent, rel=1e-12)
        assert a.f_h == pytest.approx(b.f_h, rel=1e-12)
