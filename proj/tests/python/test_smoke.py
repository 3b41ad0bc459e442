import cmath
import math

import pytest

import chainlab


def test_constants():
    assert chainlab.const_c1(3.0) == pytest.approx(1.0, abs=1e-10)
    assert chainlab.const_c2(3.0) == pytest.approx(1.5, abs=1e-8)
    assert chainlab.const_c2(5.0) == pytest.approx(-1.0 / 12.0, abs=1e-8)
    assert chainlab.const_c1(4.0) == pytest.approx(math.pi**2 / 6.0, rel=1e-12)


def test_dispersion_closed_form_at_theta_4():
    ks = [0.01, 0.1, 0.3, -0.45]
    for k, a in zip(ks, chainlab.alpha_hat(ks, 4.0)):
        x = 2 * math.pi * abs(k)
        assert a == pytest.approx(math.pi**2 * x**2 / 6 - math.pi * x**3 / 6 + x**4 / 24, rel=1e-12)
    w = chainlab.omega([0.2], 4.0)[0]
    assert w * w == pytest.approx(chainlab.alpha_hat([0.2], 4.0)[0], rel=1e-14)


def test_schedule_identity():
    for theta in (2.5, 3.0, 4.5):
        s = chainlab.Schedule(theta)
        for e in range(4, 30, 5):
            eps = 2.0**-e
            assert s.n(eps) / s.m(eps) == pytest.approx(s.j(eps), rel=1e-15)


def test_transform_round_trip_and_parseval():
    v = [math.sin(0.7 * i) + 0.1 * i for i in range(64)]
    spec = chainlab.forward_transform(v)
    back = chainlab.inverse_transform(spec)
    assert max(abs(b - x) for b, x in zip(back, v)) < 1e-12
    assert sum(abs(c) ** 2 for c in spec) / 64 == pytest.approx(sum(x * x for x in v), rel=1e-12)


def test_semigroup_unit_modulus():
    z = chainlab.semigroup_multiplier(3.0, 0.4, 1, 2.5)
    assert abs(z) == pytest.approx(1.0, abs=1e-15)
    assert isinstance(z, complex)
    assert cmath.isclose(z * chainlab.semigroup_multiplier(3.0, 0.4, -1, 2.5), 1.0, abs_tol=1e-15)


def test_domain_error():
    with pytest.raises(ValueError):
        chainlab.Schedule(2.0).m(0.1)


def test_run_mean_experiment():
    rep = chainlab.run(experiment="mean", theta=2.5, sites=[256, 512])
    assert rep["experiment"] == "mean"
    assert rep["metrics"]
    with pytest.raises(ValueError):
        chainlab.run(bogus=1)


def test_default_config_keys():
    cfg = chainlab.default_config()
    assert cfg["theta"] == 2.5
    assert "profile.kind" in cfg
