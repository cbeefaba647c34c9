import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vmaflab.errors import ShapeError
from vmaflab.media import Frame, VideoMeta
from vmaflab.metrics import psnr_clip, psnr_frame, si_ti, ssim_clip, ssim_frame, ssim_plane

import oracles
from conftest import luma_clip

META8 = VideoMeta(16, 16, chroma_format="luma_only")


def frame(v, meta=META8):
    return Frame(np.broadcast_to(np.asarray(v), (meta.height, meta.width)).copy(), meta)


def test_psnr_identical_is_capped():
    assert psnr_frame(frame(17), frame(17)) == 100.0


def test_psnr_black_vs_white_is_zero():
    assert psnr_frame(frame(0), frame(255)) == pytest.approx(0.0, abs=1e-12)


def test_psnr_unit_error():
    # 10 log10(255^2 / 1)
    assert psnr_frame(frame(10), frame(11)) == pytest.approx(48.1308036086791, abs=1e-9)


def test_psnr_ten_bit_peak():
    meta = VideoMeta(16, 16, bit_depth=10, chroma_format="luma_only")
    assert psnr_frame(frame(0, meta), frame(1023, meta)) == pytest.approx(0.0, abs=1e-12)


def test_mismatched_shapes_raise():
    other = VideoMeta(8, 16, chroma_format="luma_only")
    with pytest.raises(ShapeError):
        psnr_frame(frame(0), frame(0, other))
    with pytest.raises(ShapeError):
        ssim_frame(frame(0), frame(0, other))


def test_ssim_identical_is_one(textured):
    f = Frame(textured, VideoMeta(64, 64, chroma_format="luma_only"))
    assert ssim_frame(f, f) == 1.0


def test_ssim_constant_planes_closed_form():
    # flat planes: contrast term is 1, luminance term is (2ab + C1) / (a^2 + b^2 + C1)
    c1 = (0.01 * 255) ** 2
    assert ssim_frame(frame(0), frame(255)) == pytest.approx(c1 / (255 ** 2 + c1), rel=1e-12)
    assert ssim_frame(frame(100), frame(110)) == pytest.approx(
        (2 * 100 * 110 + c1) / (100 ** 2 + 110 ** 2 + c1), rel=1e-12)


def test_ssim_matches_oracle(rng):
    a = rng.integers(0, 256, (20, 23)).astype(float)
    b = np.clip(a + rng.normal(0, 12, a.shape), 0, 255).round()
    assert ssim_plane(a, b, 255.0) == pytest.approx(oracles.ssim(a, b), rel=1e-10)


def test_ssim_symmetric(rng, textured):
    a = textured.astype(float)
    b = np.clip(a + rng.normal(0, 8, a.shape), 0, 255)
    assert ssim_plane(a, b, 255.0) == pytest.approx(ssim_plane(b, a, 255.0), rel=1e-14)


def test_ssim_decreases_with_noise(rng, textured):
    a = textured.astype(float)
    noise = rng.normal(0, 1, a.shape)
    scores = [ssim_plane(a, a + s * noise, 255.0) for s in (1, 4, 16, 64)]
    assert all(x > y for x, y in zip(scores, scores[1:]))


def test_ssim_window_needs_eleven_pixels():
    with pytest.raises(ShapeError):
        ssim_plane(np.zeros((10, 40)), np.zeros((10, 40)), 255.0)


def test_clip_pooling_is_mean():
    ref = luma_clip([np.full((16, 16), 10), np.full((16, 16), 10)])
    dist = luma_clip([np.full((16, 16), 10), np.full((16, 16), 11)])
    s = psnr_clip(ref, dist)
    assert s.per_frame == (100.0, pytest.approx(48.1308036086791))
    assert s.pooled == pytest.approx((100.0 + 48.1308036086791) / 2)
    assert s.metric_id == "psnr"
    assert ssim_clip(ref, ref).pooled == 1.0


def test_clip_length_mismatch():
    a = luma_clip([np.zeros((16, 16))])
    b = luma_clip([np.zeros((16, 16))] * 2)
    with pytest.raises(ShapeError):
        psnr_clip(a, b)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), shift=st.integers(-20, 20))
def test_psnr_ssim_bounds_property(seed, shift):
    rng = np.random.default_rng(seed)
    a = rng.integers(20, 236, (16, 16))
    b = np.clip(a + shift + rng.integers(-3, 4, a.shape), 0, 255)
    fa, fb = Frame(a, META8), Frame(b, META8)
    p = psnr_frame(fa, fb)
    s = ssim_frame(fa, fb)
    assert 0.0 <= p <= 100.0
    assert -1.0 <= s <= 1.0
    assert psnr_frame(fb, fa) == p


def test_si_of_step_edge_matches_oracle():
    p = np.zeros((12, 12), dtype=np.uint8)
    p[:, 6:] = 200
    r = si_ti(luma_clip([p]))
    assert r.si == pytest.approx(oracles.sobel_std(p), rel=1e-12)
    assert r.si > 0
    assert not r.ti_valid and r.ti == 0.0


def test_si_flat_is_zero_and_ti_constant_step():
    a = np.full((8, 8), 50)
    r = si_ti(luma_clip([a, a + 10, a + 10]))
    assert r.si == 0.0
    # differences are uniform planes: zero spread
    assert r.ti == 0.0 and r.ti_valid


def test_ti_of_half_plane_change():
    a = np.zeros((8, 8), dtype=np.uint8)
    b = a.copy()
    b[:4] = 100
    # difference is 100 on half the pixels, 0 on the rest: std = 50
    assert si_ti(luma_clip([a, b])).ti == pytest.approx(50.0)
    assert math.isfinite(si_ti(luma_clip([b])).si)
