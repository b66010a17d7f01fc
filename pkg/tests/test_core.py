import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mscf.core import (
    BoundingBox,
    ConfigError,
    GridShape,
    InvalidArgument,
    MscfConfig,
    circular_shift,
    crop_mask_apply,
)


def test_box_center_and_validation():
    assert BoundingBox(1.5, 2.0, 3.0, 4.0).center() == (3.0, 4.0)
    with pytest.raises(InvalidArgument):
        BoundingBox(0, 0, 0, 1)
    with pytest.raises(InvalidArgument):
        BoundingBox(0, 0, 1, -2)


def test_grid_shape_size():
    assert GridShape(6, 7, 3).size == 42


def test_crop_ones_2x2():
    out = crop_mask_apply(np.ones((4, 4, 1)), 2, 2)
    expected = np.zeros((4, 4, 1))
    expected[1:3, 1:3] = 1
    np.testing.assert_array_equal(out, expected)


def test_crop_full_window_is_identity(rng):
    t = rng.standard_normal((5, 6, 2))
    np.testing.assert_array_equal(crop_mask_apply(t, 5, 6), t)


def test_crop_sum_matches_direct_block_sum(rng):
    t = rng.standard_normal((8, 8, 1))
    direct = sum(t[i, j, 0] for i in range(2, 6) for j in range(2, 6))
    assert crop_mask_apply(t, 4, 4).sum() == pytest.approx(direct, abs=1e-12)


def test_crop_odd_slack_biases_top_left():
    out = crop_mask_apply(np.ones((5, 5)), 2, 2)
    assert np.argwhere(out).tolist() == [[1, 1], [1, 2], [2, 1], [2, 2]]


def test_crop_overflow():
    with pytest.raises(InvalidArgument):
        crop_mask_apply(np.ones((4, 4)), 5, 2)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (6, 7, 2), elements=st.floats(-1e3, 1e3)),
       st.integers(1, 6), st.integers(1, 7))
def test_crop_idempotent(t, r, c):
    once = crop_mask_apply(t, r, c)
    np.testing.assert_array_equal(crop_mask_apply(once, r, c), once)


def test_circular_shift_examples(rng):
    m = rng.standard_normal((3, 4))
    np.testing.assert_array_equal(circular_shift(m, 0, 0), m)
    np.testing.assert_array_equal(circular_shift(m, 3, 4), m)
    impulse = np.zeros((3, 3))
    impulse[0, 0] = 1
    assert np.argwhere(circular_shift(impulse, 1, 1)).tolist() == [[1, 1]]
    np.testing.assert_array_equal(circular_shift(circular_shift(m, 2, -5), -2, 5), m)


def test_circular_shift_definition(rng):
    m = rng.standard_normal((4, 5))
    out = circular_shift(m, 3, -2)
    for i in range(4):
        for j in range(5):
            assert out[i, j] == m[(i - 3) % 4, (j + 2) % 5]


def test_config_defaults_match_published_values():
    cfg = MscfConfig()
    assert (cfg.lambda1, cfg.lambda2, cfg.phi) == (20, 840, 1)
    assert (cfg.mu0, cfg.mu_max, cfg.beta, cfg.admm_iters) == (0.1, 10000, 10, 3)
    assert (cfg.theta, cfg.nu, cfg.delta, cfg.pedestal_ratio) == (0.044, 1, 0.01, 2.5)
    assert (cfg.learning_rate, cfg.train_interval) == (0.0158, 2)


def test_config_round_trip(tmp_path):
    cfg = MscfConfig(lambda2=123.5, output_sigma_factor=1 / 3, mtf_enabled=False, cn_table="w2c.bin")
    assert MscfConfig.loads(cfg.dumps()) == cfg
    path = tmp_path / "cfg.txt"
    MscfConfig().save(path)
    assert MscfConfig.load(path, env={}) == MscfConfig()


def test_config_comments_unknown_and_unhoused(caplog):
    cfg = MscfConfig.loads("# header\nlambda1 = 5  # inline\n\ngamma = 27\ngamma_max=10000\n")
    assert cfg.lambda1 == 5
    assert "gamma" in caplog.text
    with pytest.raises(ConfigError, match="unknown"):
        MscfConfig.loads("lambda3 = 1\n")
    with pytest.raises(ConfigError):
        MscfConfig.loads("lambda1 20\n")
    with pytest.raises(ConfigError):
        MscfConfig.loads("admm_iters = three\n")


@pytest.mark.parametrize("changes", [
    {"mu0": 2e4}, {"beta": 1.0}, {"admm_iters": 0}, {"learning_rate": 0.0},
    {"learning_rate": 1.5}, {"lambda1": -1.0}, {"d_min_mode": "ring"},
])
def test_config_invariants(changes):
    with pytest.raises(ConfigError):
        MscfConfig(**changes)


def test_env_overrides():
    cfg = MscfConfig().with_env({"MSCF_LAMBDA2": "100", "MSCF_MTF_ENABLED": "false", "OTHER": "1"})
    assert cfg.lambda2 == 100.0 and cfg.mtf_enabled is False
