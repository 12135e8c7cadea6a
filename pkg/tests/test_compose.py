import math

import numpy as np
import pytest

from headsplat.compose import (ActivationConfig, LinearDeformationProvider,
                               ResidualAttributes, ZeroDeformationProvider,
                               activate_opacity, activate_position,
                               activate_rotation, activate_scale, build_cloud,
                               compose, eval_linear_deformation, inv_softplus,
                               lift, make_identity_cache, quat_multiply,
                               softplus)
from headsplat.errors import ConfigError, ParameterError
from headsplat.headmodel import ExpressionState
from headsplat.uvatlas import surface_interpolate
from headsplat import articulate


def softplus_scalar(x):
    return math.log1p(math.exp(-abs(x))) + max(x, 0.0)


class TestActivations:
    def test_position_scalar_oracle(self):
        cfg = ActivationConfig(gamma_pos=0.05)
        out = activate_position(np.array([[1.0, 0.0, -1.0]]), cfg)
        expected = 0.05 * np.tanh([1.0, 0.0, -1.0])
        np.testing.assert_allclose(out[0], expected, atol=1e-12)
        assert abs(out[0, 0] - 0.0380797) < 1e-6

    def test_position_bounded_and_monotone(self):
        cfg = ActivationConfig(gamma_pos=0.05)
        xs = np.linspace(-50.0, 50.0, 101)[:, None]
        ys = activate_position(xs, cfg)[:, 0]
        assert np.all(np.abs(ys) < 0.05)
        assert np.all(np.diff(ys) >= 0.0)
        assert activate_position(np.array([[1e6]]), cfg)[0, 0] == pytest.approx(
            0.05, abs=1e-12)

    def test_scale_at_zero_is_exp_minus_s_init(self):
        cfg = ActivationConfig(s_max=1.0, s_init=5.0)
        out = activate_scale(np.zeros((1, 3)), cfg)
        np.testing.assert_allclose(out, math.exp(-5.0), atol=1e-12)

    def test_scale_supremum_is_exp_minus_s_max(self):
        cfg = ActivationConfig(s_max=1.0, s_init=5.0)
        out = activate_scale(np.full((1, 1), -1e6), cfg)
        np.testing.assert_allclose(out, math.exp(-1.0), atol=1e-12)
        assert np.all(activate_scale(np.linspace(-30, 30, 100)[:, None], cfg)
                      <= math.exp(-1.0))

    def test_scale_scalar_oracle_and_monotone(self):
        cfg = ActivationConfig(s_max=2.0, s_init=5.0)
        c0 = inv_softplus(3.0)
        expected = math.exp(-2.0 - softplus_scalar(1.0 + c0))
        out = activate_scale(np.array([[1.0]]), cfg)
        np.testing.assert_allclose(out[0, 0], expected, atol=1e-12)
        ys = activate_scale(np.linspace(-10, 10, 201)[:, None], cfg)[:, 0]
        assert np.all(np.diff(ys) < 0.0)

    def test_scale_config_ordering_enforced(self):
        with pytest.raises(ConfigError):
            ActivationConfig(s_max=5.0, s_init=5.0)
        with pytest.raises(ConfigError):
            ActivationConfig(gamma_pos=0.0)

    def test_opacity(self):
        assert activate_opacity(np.array([0.0]))[0] == 0.5
        assert activate_opacity(np.array([1e9]))[0] == 1.0 - 1e-4
        assert activate_opacity(np.array([-1e9]))[0] == 1e-4
        assert abs(activate_opacity(np.array([2.0]))[0] - 0.880797) < 1e-6

    def test_rotation(self):
        out = activate_rotation(np.array([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [2.0, 0.0, 0.0, 2.0],
        ]))
        np.testing.assert_array_equal(out[0], [1.0, 0.0, 0.0, 0.0])
        np.testing.assert_array_equal(out[1], [1.0, 0.0, 0.0, 0.0])
        h = math.sqrt(0.5)
        np.testing.assert_allclose(out[2], [h, 0.0, 0.0, h], atol=1e-12)

    def test_softplus_inverse_round_trip(self):
        ys = np.array([1e-3, 0.1, 1.0, 3.0, 20.0])
        np.testing.assert_allclose(softplus(inv_softplus(ys)), ys, rtol=1e-9)

    def test_bounds_on_random_raws(self):
        rng = np.random.default_rng(30)
        cfg = ActivationConfig(gamma_pos=0.02, s_max=4.0, s_init=6.5)
        raws = rng.standard_cauchy(size=(100000, 3)) * 10.0
        off = activate_position(raws, cfg)
        assert np.max(np.abs(off)) < cfg.gamma_pos
        scl = activate_scale(raws, cfg)
        assert np.all(scl > 0.0)
        assert np.all(scl <= math.exp(-cfg.s_max))


class TestCompose:
    def rows(self, rng, n):
        return {
            "position_offset": rng.normal(size=(n, 3)),
            "log_scale": rng.normal(size=(n, 3)),
            "rotation": rng.normal(size=(n, 4)),
            "color": rng.normal(size=(n, 3)),
            "opacity_logit": rng.normal(size=(n, 1)),
        }

    def test_zero_residuals_identity(self):
        rng = np.random.default_rng(31)
        cfg = ActivationConfig()
        canonical = self.rows(rng, 50)
        out = compose(canonical, ResidualAttributes.zeros(50), cfg)
        np.testing.assert_array_equal(
            out.offset, activate_position(canonical["position_offset"], cfg))
        np.testing.assert_array_equal(
            out.scale, activate_scale(canonical["log_scale"], cfg))
        q_can = activate_rotation(canonical["rotation"])
        np.testing.assert_allclose(out.rotation, q_can, atol=1e-12)
        np.testing.assert_array_equal(out.color_raw, canonical["color"])

    def test_rotation_residual_group_action(self):
        cfg = ActivationConfig()
        canonical = {
            "position_offset": np.zeros((1, 3)),
            "log_scale": np.zeros((1, 3)),
            "rotation": np.array([[1.0, 0.0, 0.0, 0.0]]),
            "color": np.zeros((1, 3)),
            "opacity_logit": np.zeros((1, 1)),
        }
        h = math.sqrt(0.5)
        # d_rot is biased by +(1,0,0,0): subtract it so the residual
        # quaternion is a quarter turn about z
        d_rot = np.array([[h - 1.0, 0.0, 0.0, h]])
        out = compose(canonical, ResidualAttributes(
            d_mu=np.zeros((1, 3)), d_log_scale=np.zeros((1, 3)),
            d_rot=d_rot), cfg)
        np.testing.assert_allclose(out.rotation[0], [h, 0.0, 0.0, h],
                                   atol=1e-12)

    def test_random_residuals_norms_and_scale_oracle(self):
        rng = np.random.default_rng(32)
        cfg = ActivationConfig()
        n = 40
        canonical = self.rows(rng, n)
        res = ResidualAttributes(d_mu=rng.normal(size=(n, 3)),
                                 d_log_scale=rng.normal(size=(n, 3)),
                                 d_rot=rng.normal(size=(n, 4)) * 0.3)
        out = compose(canonical, res, cfg)
        norms = np.linalg.norm(out.rotation, axis=1)
        assert np.max(np.abs(norms - 1.0)) < 1e-6
        for i in range(n):
            for a in range(3):
                raw = canonical["log_scale"][i, a] + res.d_log_scale[i, a]
                oracle = math.exp(-(cfg.s_max
                                    + softplus_scalar(raw + inv_softplus(
                                        cfg.s_init - cfg.s_max))))
                assert abs(out.scale[i, a] - oracle) < 1e-12
        np.testing.assert_allclose(
            out.offset,
            activate_position(canonical["position_offset"], cfg) + res.d_mu,
            atol=1e-12)

    def test_count_mismatch(self):
        rng = np.random.default_rng(33)
        with pytest.raises(ParameterError):
            compose(self.rows(rng, 10), ResidualAttributes.zeros(11),
                    ActivationConfig())

    def test_quat_multiply_identity_and_composition(self):
        rng = np.random.default_rng(34)
        q = activate_rotation(rng.normal(size=(5, 4)))
        ident = np.tile([1.0, 0.0, 0.0, 0.0], (5, 1))
        np.testing.assert_array_equal(quat_multiply(ident, q), q)
        # composition matches rotation-matrix product
        from headsplat.rasterizer.project import quat_to_rotmats
        a = activate_rotation(rng.normal(size=(5, 4)))
        ab = quat_multiply(a, q)
        np.testing.assert_allclose(quat_to_rotmats(ab),
                                   quat_to_rotmats(a) @ quat_to_rotmats(q),
                                   atol=1e-12)


class TestLinearDeformation:
    def test_zero_driver_zero_residuals(self, asset64):
        res = eval_linear_deformation(asset64.basis, asset64.grid,
                                      np.zeros(10), np.zeros(3))
        assert np.all(res.d_mu == 0.0)
        assert np.all(res.d_log_scale == 0.0)
        assert np.all(res.d_rot == 0.0)

    def test_one_hot_driver_samples_basis_plane(self, asset64):
        from headsplat.uvatlas import grid_sample
        psi = np.zeros(10)
        psi[3] = 1.0
        res = eval_linear_deformation(asset64.basis, asset64.grid, psi,
                                      np.zeros(3))
        expected = grid_sample(asset64.basis.position[3], asset64.grid.uv)
        np.testing.assert_allclose(res.d_mu, expected, atol=1e-9)

    def test_random_driver_matches_dense_oracle(self, asset64):
        from headsplat.uvatlas import grid_sample
        rng = np.random.default_rng(35)
        psi, jaw = rng.normal(size=10), rng.normal(size=3)
        res = eval_linear_deformation(asset64.basis, asset64.grid, psi, jaw)
        driver = np.concatenate([psi, jaw])
        oracle = np.zeros_like(res.d_rot)
        for k in range(driver.shape[0]):
            oracle += driver[k] * grid_sample(asset64.basis.rotation[k],
                                              asset64.grid.uv)
        np.testing.assert_allclose(res.d_rot, oracle, atol=1e-6)

    def test_linearity(self, asset64):
        rng = np.random.default_rng(36)
        x, y = rng.normal(size=13), rng.normal(size=13)
        a, b = 0.7, -1.3
        def ev(d):
            return eval_linear_deformation(asset64.basis, asset64.grid,
                                           d[:10], d[10:])
        lhs = ev(a * x + b * y)
        rx, ry = ev(x), ev(y)
        np.testing.assert_allclose(lhs.d_mu, a * rx.d_mu + b * ry.d_mu,
                                   atol=1e-5)
        np.testing.assert_allclose(lhs.d_log_scale,
                                   a * rx.d_log_scale + b * ry.d_log_scale,
                                   atol=1e-5)

    def test_provider_matches_plane_evaluation(self, asset64):
        rng = np.random.default_rng(37)
        provider = LinearDeformationProvider(asset64.basis, asset64.grid)
        psi, jaw = rng.normal(size=10), rng.normal(size=3)
        a = provider.residuals(psi, jaw)
        b = eval_linear_deformation(asset64.basis, asset64.grid, psi, jaw)
        np.testing.assert_allclose(a.d_mu, b.d_mu, atol=1e-9)
        np.testing.assert_allclose(a.d_log_scale, b.d_log_scale, atol=1e-9)
        np.testing.assert_allclose(a.d_rot, b.d_rot, atol=1e-9)

    def test_driver_dimension_mismatch(self, asset64):
        with pytest.raises(ParameterError):
            eval_linear_deformation(asset64.basis, asset64.grid,
                                    np.zeros(4), np.zeros(3))
        with pytest.raises(ParameterError):
            LinearDeformationProvider(asset64.basis, asset64.grid).residuals(
                np.zeros(4), np.zeros(3))


class TestLift:
    def test_zero_offsets(self):
        rng = np.random.default_rng(38)
        base = rng.normal(size=(9, 3))
        np.testing.assert_array_equal(lift(base, np.zeros((9, 3))), base)

    def test_elementwise_sum(self):
        rng = np.random.default_rng(39)
        base, off = rng.normal(size=(9, 3)), rng.normal(size=(9, 3))
        np.testing.assert_array_equal(lift(base, off), base + off)

    def test_shape_mismatch(self):
        with pytest.raises(ParameterError):
            lift(np.zeros((3, 3)), np.zeros((4, 3)))


class TestBuildCloud:
    def test_neutral_zero_provider_anchors_on_template(self, asset64):
        state = ExpressionState.neutral(asset64.model)
        cache = make_identity_cache(asset64)
        cloud = build_cloud(asset64, state,
                            provider=ZeroDeformationProvider(
                                asset64.num_gaussians), cache=cache)
        mesh = articulate(asset64.model, state)
        base = surface_interpolate(mesh, asset64.grid)
        assert np.max(np.abs(cloud.mu - base)) < asset64.config.gamma_pos
        np.testing.assert_array_equal(cloud.sh, cache.color)
        np.testing.assert_array_equal(cloud.opacity, cache.opacity)

    def test_determinism_bitwise(self, asset64):
        rng = np.random.default_rng(40)
        pose = np.zeros((asset64.model.num_joints, 3))
        pose[asset64.model.jaw_joint] = [0.2, 0.0, 0.0]
        state = ExpressionState(shape=np.zeros(asset64.model.shape_dim),
                                expression=rng.normal(size=10), pose=pose)
        a = build_cloud(asset64, state)
        b = build_cloud(asset64, state)
        for name in ("mu", "scale", "rotation", "sh", "opacity"):
            np.testing.assert_array_equal(getattr(a, name), getattr(b, name))

    def test_jaw_motion_moves_with_mesh(self, asset64):
        """With residuals pinned to zero, positions track the articulated
        surface point exactly."""
        model = asset64.model
        cache = make_identity_cache(asset64)
        provider = ZeroDeformationProvider(asset64.num_gaussians)
        neutral = ExpressionState.neutral(model)
        pose = np.zeros((model.num_joints, 3))
        pose[model.jaw_joint] = [0.3, 0.0, 0.0]
        jaw_open = ExpressionState(shape=neutral.shape,
                                   expression=neutral.expression, pose=pose)
        c0 = build_cloud(asset64, neutral, provider=provider, cache=cache)
        c1 = build_cloud(asset64, jaw_open, provider=provider, cache=cache)
        b0 = surface_interpolate(articulate(model, neutral), asset64.grid)
        b1 = surface_interpolate(articulate(model, jaw_open), asset64.grid)
        np.testing.assert_allclose(c1.mu - c0.mu, b1 - b0, atol=1e-12)
        assert np.max(np.abs(c1.mu - c0.mu)) > 1e-4  # the jaw did move

    def test_cloud_invariants(self, asset64):
        rng = np.random.default_rng(41)
        pose = np.zeros((asset64.model.num_joints, 3))
        state = ExpressionState(shape=np.zeros(asset64.model.shape_dim),
                                expression=rng.normal(size=10), pose=pose)
        cloud = build_cloud(asset64, state)
        assert np.all(cloud.opacity > 0.0) and np.all(cloud.opacity < 1.0)
        assert np.all(cloud.scale > 0.0)
        assert np.all(cloud.scale <= math.exp(-asset64.config.s_max))
        norms = np.linalg.norm(cloud.rotation, axis=1)
        assert np.max(np.abs(norms - 1.0)) < 1e-6

    def test_cache_composed_matches_compose_bitwise(self, asset64):
        rng = np.random.default_rng(42)
        cache = make_identity_cache(asset64)
        res = ResidualAttributes(d_mu=rng.normal(size=(asset64.num_gaussians, 3)),
                                 d_log_scale=rng.normal(size=(asset64.num_gaussians, 3)),
                                 d_rot=rng.normal(size=(asset64.num_gaussians, 4)))
        a = compose(cache.canonical, res, asset64.config)
        b = cache.composed(res, asset64.config)
        np.testing.assert_array_equal(a.offset, b.offset)
        np.testing.assert_array_equal(a.scale, b.scale)
        np.testing.assert_array_equal(a.rotation, b.rotation)
