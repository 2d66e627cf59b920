import numpy as np
import pytest

from bhrvt.dist import (PRESETS, IndependentUniformJoint, ParamPoint, SamplingError, SupportBox,
                        TruncatedGaussianJoint, eval_joint, from_config, load_config,
                        normalization_constant, normalization_constant_mc, preset, sample)
from bhrvt.quad import integrate_3d


def test_example1_density():
    d = preset("example1")
    assert eval_joint(d, (0.5, 1.5, 0.5)) == pytest.approx(1 / 0.81)
    assert eval_joint(d, (0.5, 1.05, 0.5)) == 0.0
    with pytest.raises(ValueError):
        eval_joint(d, (0.5, 1.05, 0.5), allow_outside=False)


def test_example2_normalisation():
    d = preset("example2")
    assert abs(d.z - 1) < 1e-6
    p, se = normalization_constant_mc(d.mu, d.sigma, d.box, 10**5, seed=3)
    assert abs(p - d.z) <= 4 * se + 1e-5


def test_example2_peak_value():
    d = preset("example2")
    peak = 1 / ((2 * np.pi) ** 1.5 * np.sqrt(np.linalg.det(d.sigma)))
    assert eval_joint(d, d.mu) == pytest.approx(peak / d.z, rel=1e-12)


def test_truncation_halves_mass():
    d = preset("example2")
    half = SupportBox((0.0, 0.5), (1.1, 2.0), (0.0, 1.0))
    z = normalization_constant(d.mu, d.sigma, half)
    assert z == pytest.approx(0.5, abs=1e-6)
    g = TruncatedGaussianJoint(d.mu, d.sigma, half)
    mass = integrate_3d(g.pdf, g.integration_box.intervals).value
    assert mass == pytest.approx(1.0, abs=1e-6)


def test_uniform_integrates_to_one():
    d = preset("example1")
    assert integrate_3d(d.pdf, d.integration_box.intervals).value == pytest.approx(1.0, abs=1e-12)


def test_sampling_inside_support_and_moments():
    rng = np.random.default_rng(0)
    for name in PRESETS:
        d = preset(name)
        s = d.sample(200_000, rng)
        assert s.shape == (200_000, 3)
        assert d.support.contains(*s.T).all()
    s = preset("example2").sample(200_000, rng)
    np.testing.assert_allclose(s.mean(axis=0), preset("example2").mu, atol=5e-4)
    np.testing.assert_allclose(np.cov(s.T), preset("example2").sigma, atol=5e-5)


def test_rejection_acceptance_rate():
    d = preset("example2")
    rng = np.random.default_rng(5)
    draws = d.mu + rng.standard_normal((10**6, 3)) @ np.linalg.cholesky(d.sigma).T
    assert d.box.contains(*draws.T).mean() > 0.999


def test_rejection_gives_up():
    # box 40 standard deviations from the mean: nothing is ever accepted
    d = TruncatedGaussianJoint([0.5, 1.5, 0.5], np.eye(3) * 1e-4,
                               SupportBox((0.9, 1.0), (1.1, 2.0), (0.0, 1.0)),
                               z=1e-300, max_rejection_rounds=3)
    with pytest.raises(SamplingError):
        d.sample(10, np.random.default_rng(0))


def test_single_sample_is_param_point():
    p = sample(preset("example1"), np.random.default_rng(2))
    assert isinstance(p, ParamPoint)


def test_validation_errors():
    with pytest.raises(ValueError):
        SupportBox((1, 0), (1.1, 2), (0, 1))
    with pytest.raises(ValueError):
        SupportBox((0, 1), (0.5, 2), (0, 1))
    with pytest.raises(ValueError):
        ParamPoint(0.5, 1.0, 0.5)
    with pytest.raises(ValueError):
        TruncatedGaussianJoint([0, 0, 0], [[1, 2, 0], [2, 1, 0], [0, 0, 1]],
                               SupportBox((0, 1), (1.1, 2), (0, 1)))
    with pytest.raises(ValueError):
        from_config({"kind": "beta"})
    with pytest.raises(KeyError):
        preset("example3")


def test_config_round_trip(tmp_path):
    import json

    for name in PRESETS:
        d = preset(name)
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(d.to_config()))
        e = from_config(load_config(path))
        assert e.kind == d.kind
        for p in [(0.5, 1.5, 0.5), (0.3, 1.4, 0.55), (0.9, 1.2, 0.2)]:
            assert eval_joint(e, p) == pytest.approx(eval_joint(d, p), rel=1e-12)


def test_gaussian_integration_box_is_inside_support():
    d = preset("example2")
    ib = d.integration_box
    assert np.all(ib.lows >= d.support.lows) and np.all(ib.highs <= d.support.highs)
    assert isinstance(preset("example1"), IndependentUniformJoint)
    assert preset("example1").integration_box == preset("example1").support
