import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cascade_sim.exceptions import InvalidParameterError
from cascade_sim.params import (
    PhysicalParams,
    build_couplings,
    config_params,
    derive_rates,
    load_config,
    params_from_mapping,
    validate_regime,
)


def test_defaults():
    p = PhysicalParams()
    assert (p.gamma_X, p.epsilon, p.S, p.Gamma) == (1.0, 0.0, 4.0, 0.0)
    assert p.phi == p.phi_prime == pytest.approx(math.pi / 2)


@pytest.mark.parametrize(
    "kwargs",
    [{"gamma_X": 0}, {"gamma_X": -1}, {"epsilon": 1.0}, {"epsilon": -1.2}, {"S": -0.1},
     {"Gamma": -1}, {"phi": float("nan")}, {"S": float("inf")}, {"phi": "1"}],
)
def test_invalid_params_rejected(kwargs):
    with pytest.raises(InvalidParameterError):
        PhysicalParams(**kwargs)


def test_replace_drags_phi_prime_only_when_tied():
    p = PhysicalParams(phi=1.0)
    assert p.replace(phi=0.5).phi_prime == 0.5
    q = PhysicalParams(phi=1.0, phi_prime=0.2)
    assert q.replace(phi=0.5).phi_prime == 0.2


def test_rates_for_symmetric_decay():
    r = derive_rates(PhysicalParams())
    assert (r.gamma_x, r.gamma_y, r.gamma_px, r.gamma_py, r.gamma_XX) == (1, 1, 1, 1, 2)


@given(st.floats(-0.95, 0.95), st.floats(0.1, 10))
def test_rates_recover_epsilon(eps, gX):
    r = derive_rates(PhysicalParams(gamma_X=gX, epsilon=eps))
    assert r.epsilon == pytest.approx(eps, abs=1e-12)
    assert r.gamma_x + r.gamma_y == pytest.approx(r.gamma_XX)
    assert r.gamma_px + r.gamma_py == pytest.approx(2 * gX)


@given(st.floats(-0.9, 0.9), st.floats(0, math.pi), st.floats(0, math.pi))
def test_couplings_reproduce_rates_and_phases(eps, phi, phi_p):
    p = PhysicalParams(epsilon=eps, phi=phi, phi_prime=phi_p)
    c = build_couplings(p)
    r = derive_rates(p)
    np.testing.assert_allclose(c.biexciton_rates, r.biexciton, rtol=1e-12)
    np.testing.assert_allclose(c.exciton_rates, r.exciton, rtol=1e-12)
    # equal split between directions
    np.testing.assert_allclose(c.partial_rates[0], c.partial_rates[1], rtol=1e-12)
    dphi = c.phases[:, 0] - c.phases[:, 1]
    np.testing.assert_allclose(np.exp(1j * dphi), np.exp(1j * np.array([phi, -phi])), atol=1e-12)
    dphi_p = c.phases_prime[:, 0] - c.phases_prime[:, 1]
    np.testing.assert_allclose(np.exp(1j * dphi_p), np.exp(1j * np.array([phi_p, -phi_p])), atol=1e-12)


def test_shifted_gauge_keeps_rates():
    c = build_couplings(PhysicalParams(phi=0.7))
    s = c.shifted_gauge(0.3, -1.1)
    np.testing.assert_allclose(s.partial_rates, c.partial_rates)
    np.testing.assert_allclose(np.exp(1j * (s.phases[:, 0] - s.phases[:, 1])),
                               np.exp(1j * (c.phases[:, 0] - c.phases[:, 1])))


def test_regime_warnings():
    assert validate_regime(PhysicalParams(S=4)).warnings == ()
    assert len(validate_regime(PhysicalParams(S=1)).warnings) == 1
    assert len(validate_regime(PhysicalParams(S=0, phi=1.0)).warnings) == 2
    rep = validate_regime(PhysicalParams(S=4, phi=0))
    assert rep.norm_deviation == pytest.approx(1 / 17)


def test_config_roundtrip(tmp_path):
    p = PhysicalParams(gamma_X=2, epsilon=0.3, S=3, phi=0.4, phi_prime=0.6, Gamma=0.1)
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"params": p.to_config()}))
    assert params_from_mapping(config_params(load_config(path))) == p


def test_toml_config(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text("fss = 2.5\nphi = 1.0\nsigma = 0.3\n[sweep]\nobservable = 'C'\n")
    cfg = load_config(path)
    table = config_params(cfg)
    assert table == {"fss": 2.5, "phi": 1.0, "sigma": 0.3}
    p = params_from_mapping(table)
    assert p.S == 2.5 and p.phi_prime == 1.0


def test_unknown_config_key_rejected():
    with pytest.raises(InvalidParameterError):
        params_from_mapping({"fsss": 1.0})
