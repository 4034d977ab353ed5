import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aligntex.compose import blend, compose, render_virtual, warp
from aligntex.errors import DimensionMismatchError, MissingAssetError
from aligntex.image import new_image
from aligntex.scene import (
    BlendMode,
    Pose2D,
    VisMode,
    build_scene,
    checker_scene,
    checker_texture,
    fresnel_field,
)

from conftest import random_image


class TestPose2D:
    def test_theta_normalized(self):
        assert Pose2D(theta=3 * math.pi).theta == pytest.approx(math.pi)
        assert Pose2D(theta=-math.pi).theta == pytest.approx(math.pi)  # (-pi, pi]
        assert Pose2D(theta=0.3).theta == 0.3

    def test_scale_bounds(self):
        with pytest.raises(ValueError):
            Pose2D(scale=0.05)
        with pytest.raises(ValueError):
            Pose2D(scale=11.0)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            Pose2D(tx=float("nan"))


class TestWarp:
    def test_identity_equal_frame_is_bitwise_copy(self, rng):
        img = random_image(rng, 32, 32)
        out = warp(img, Pose2D(), (32, 32))
        assert np.array_equal(out, img)

    def test_identity_centered_placement(self, rng):
        img = random_image(rng, 16, 16)
        out = warp(img, Pose2D(), (32, 32))
        assert np.array_equal(out[8:24, 8:24], img)
        assert np.all(out[:8, :, 3] == 0.0)
        assert np.all(out[:, :8, 3] == 0.0)

    def test_pure_translation(self, rng):
        img = random_image(rng, 16, 16)
        base = warp(img, Pose2D(), (40, 40))
        moved = warp(img, Pose2D(tx=5), (40, 40))
        assert np.array_equal(moved[:, 5:], base[:, :-5])
        assert np.all(moved[:, :5, 3] == 0.0)

    def test_half_turn_on_symmetric_texture(self):
        # a 180-degree-symmetric texture warps onto itself at theta = pi
        iy, ix = np.mgrid[0:16, 0:16]
        v = ((ix // 2 + iy // 2) % 2).astype(np.float64)
        sym = np.minimum(v, v[::-1, ::-1])
        img = np.stack([sym, sym, sym, np.ones_like(sym)], axis=-1)
        assert np.array_equal(img, img[::-1, ::-1])  # fixture really is symmetric
        out = warp(img, Pose2D(theta=math.pi), (16, 16))
        ref = warp(img, Pose2D(), (16, 16))
        assert np.abs(out - ref).max() < 1e-6

    def test_outside_source_transparent(self, rng):
        img = random_image(rng, 8, 8, opaque=True)
        out = warp(img, Pose2D(tx=100), (16, 16))
        assert np.all(out == 0.0)


class TestBlend:
    def test_additive_half_plus_half_clips_to_white(self):
        base = new_image(4, 4, (0.5, 0.5, 0.5, 1.0))
        over = new_image(4, 4, (0.5, 0.5, 0.5, 1.0))
        out = blend(base, over, BlendMode.ADDITIVE_OST)
        assert np.all(out[..., :3] == 1.0)
        assert np.all(out[..., 3] == 1.0)

    def test_transparent_overlay_is_identity_both_modes(self, rng):
        base = random_image(rng, 6, 5)
        over = np.zeros((5, 6, 4))
        over[..., :3] = rng.random((5, 6, 3))
        for mode in BlendMode:
            assert np.array_equal(blend(base, over, mode), base)

    def test_over_white_on_black(self):
        base = new_image(3, 3, (0, 0, 0, 1))
        over = new_image(3, 3, (1, 1, 1, 1))
        out = blend(base, over, BlendMode.OVER_VST)
        assert np.all(out == 1.0)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatchError):
            blend(random_image(rng, 4, 4), random_image(rng, 5, 4), BlendMode.ADDITIVE_OST)

    @given(seed=st.integers(0, 2**32 - 1), bump=st.floats(0.0, 1.0))
    @settings(max_examples=25)
    def test_additive_monotone_in_overlay_alpha(self, seed, bump):
        gen = np.random.default_rng(seed)
        base = gen.random((4, 4, 4))
        over = gen.random((4, 4, 4))
        brighter = over.copy()
        brighter[..., 3] = np.clip(over[..., 3] + bump, 0, 1)
        lo = blend(base, over, BlendMode.ADDITIVE_OST)
        hi = blend(base, brighter, BlendMode.ADDITIVE_OST)
        assert np.all(hi[..., :3] >= lo[..., :3])


class TestFresnelField:
    def test_intensity_profile(self):
        rect = [(0.0, 0.0), (31.0, 0.0), (31.0, 31.0), (0.0, 31.0)]
        img = fresnel_field(rect, (32, 32), band_w=8.0, power=2.0, tint=(1, 1, 1))
        assert img[0, 10, 3] == 1.0  # on the boundary: d=0 -> intensity 1
        assert img[8, 10, 3] == pytest.approx(0.0)  # d = band_w -> 0
        assert img[4, 10, 3] == pytest.approx(0.25)  # d = band_w/2, power 2 -> (1-0.5)^2
        assert img[16, 16, 3] == 0.0  # deep interior beyond the band

    def test_outside_transparent(self):
        rect = [(8.0, 8.0), (23.0, 8.0), (23.0, 23.0), (8.0, 23.0)]
        img = fresnel_field(rect, (32, 32), band_w=4.0, power=1.0, tint=(0.5, 0.5, 1.0))
        assert np.all(img[0:7, :, 3] == 0.0)


class TestCompose:
    def test_alignment_homogeneity_additive_white(self):
        scene = checker_scene()
        img = compose(scene, VisMode.COMPLEMENTARY_PHOTOMETRIC, Pose2D(),
                      BlendMode.ADDITIVE_OST, 1.0)
        interior = img[32:96, 32:96, :3]
        assert np.abs(interior - 1.0).max() <= 1 / 255

    def test_alpha_zero_equals_real_only(self):
        scene = checker_scene()
        a = compose(scene, VisMode.COMPLEMENTARY_PHOTOMETRIC, Pose2D(tx=5), alpha=0.0)
        b = compose(scene, VisMode.SILHOUETTE, Pose2D(theta=0.4), alpha=0.0)
        assert np.array_equal(a, b)

    def test_silhouette_offset_centroid(self):
        scene = checker_scene()
        at0 = render_virtual(scene, VisMode.SILHOUETTE, Pose2D(), 1.0)
        at10 = render_virtual(scene, VisMode.SILHOUETTE, Pose2D(tx=10), 1.0)

        def centroid(img):
            ys, xs = np.nonzero(img[..., 3] > 0)
            return xs.mean(), ys.mean()

        cx0, cy0 = centroid(at0)
        cx1, cy1 = centroid(at10)
        assert abs((cx1 - cx0) - 10) <= 0.5
        assert abs(cy1 - cy0) <= 0.5

    def test_mixing_edge_growth_with_offset(self):
        # deviation-from-white pixel count grows strictly with |tx| up to half period
        scene = checker_scene()
        counts = []
        for tx in (2, 4, 8):
            img = compose(scene, VisMode.COMPLEMENTARY_PHOTOMETRIC, Pose2D(tx=tx),
                          BlendMode.ADDITIVE_OST, 1.0)
            interior = img[32:96, 32:96, :3]
            counts.append(int(np.sum(np.any(np.abs(interior - 1.0) > 0.1, axis=-1))))
        assert counts[0] < counts[1] < counts[2]

    def test_translation_equivariance_of_virtual_layer(self):
        # the replica render is exactly equivariant under integer pose shifts
        scene = checker_scene()
        a = render_virtual(scene, VisMode.COMPLEMENTARY_PHOTOMETRIC, Pose2D(tx=2, ty=1), 1.0)
        b = render_virtual(scene, VisMode.COMPLEMENTARY_PHOTOMETRIC, Pose2D(tx=5, ty=4), 1.0)
        assert np.abs(a[20:100, 20:100] - b[23:103, 23:103]).max() < 1e-6

    def test_translation_equivariance_of_composite_over_uniform_base(self):
        # with a uniform base (constant texture on matching background) the
        # full composite translates with the pose inside the frame interior
        tex = new_image(64, 64, (0.5, 0.5, 0.5, 1.0))
        scene = build_scene("flat", tex, frame=(128, 128), background=(0.5, 0.5, 0.5))
        a = compose(scene, VisMode.COMPLEMENTARY_PHOTOMETRIC, Pose2D(tx=2, ty=1),
                    BlendMode.ADDITIVE_OST, 1.0)
        b = compose(scene, VisMode.COMPLEMENTARY_PHOTOMETRIC, Pose2D(tx=5, ty=4),
                    BlendMode.ADDITIVE_OST, 1.0)
        assert np.abs(a[20:100, 20:100] - b[23:103, 23:103]).max() < 1e-6

    def test_missing_asset(self):
        scene = checker_scene()
        del scene.assets[VisMode.WIREFRAME]
        with pytest.raises(MissingAssetError):
            compose(scene, VisMode.WIREFRAME, Pose2D())

    def test_render_virtual_alpha_scaling(self):
        scene = checker_scene()
        full = render_virtual(scene, VisMode.FRESNEL, Pose2D(), 1.0)
        half = render_virtual(scene, VisMode.FRESNEL, Pose2D(), 0.5)
        assert np.allclose(half[..., 3], full[..., 3] * 0.5)
        assert np.array_equal(half[..., :3], full[..., :3])

    def test_deterministic(self):
        scene = checker_scene()
        pose = Pose2D(tx=3.2, ty=-1.7, theta=0.21, scale=1.1)
        a = compose(scene, VisMode.COMPLEMENTARY_GEOMETRIC, pose, BlendMode.OVER_VST, 0.6)
        b = compose(scene, VisMode.COMPLEMENTARY_GEOMETRIC, pose, BlendMode.OVER_VST, 0.6)
        assert np.array_equal(a, b)

    def test_scene_rejects_oversized_object(self):
        with pytest.raises(ValueError):
            build_scene("big", checker_texture(), frame=(32, 32))
