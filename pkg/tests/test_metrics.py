import numpy as np
import pytest
from skimage.metrics import structural_similarity

from halm.metrics import evaluate, psnr, ssim, ssim_map
from halm.noise import NoiseKind, NoiseSpec, add_noise
from halm.synth import synth_image

# frozen from the first run of this implementation (half-dark/half-bright
# image against its inversion); guards against silent SSIM drift
SSIM_INVERSION_REGRESSION = -0.043999590355


def test_psnr_identical_images_is_infinite():
    u = np.random.default_rng(0).uniform(0, 1, (16, 16))
    assert psnr(u, u) == float("inf")


def test_psnr_constant_offset_is_twenty_db():
    u = np.random.default_rng(1).uniform(0.2, 0.8, (32, 32))
    assert psnr(u + 0.1, u) == pytest.approx(20.0, abs=1e-10)


def test_psnr_shape_mismatch_raises():
    with pytest.raises(ValueError):
        psnr(np.zeros((4, 4)), np.zeros((4, 5)))


def test_psnr_of_gaussian_noise_matches_variance_in_expectation():
    clean = synth_image("disk", 64, 64)
    vals = [
        psnr(add_noise(clean, NoiseSpec(NoiseKind.GAUSSIAN, 0.0015, seed)), clean)
        for seed in range(10)
    ]
    expected = 10.0 * np.log10(1.0 / 0.0015)
    assert abs(float(np.mean(vals)) - expected) <= 0.3


def test_psnr_strictly_decreases_with_noise_variance():
    clean = synth_image("shading", 64, 64)
    vals = []
    for var in (0.0005, 0.0015, 0.005):
        noisy = add_noise(clean, NoiseSpec(NoiseKind.GAUSSIAN, var, 99))
        vals.append(psnr(noisy, clean))
    assert vals[0] > vals[1] > vals[2]


def test_ssim_identical_images_is_one():
    u = np.random.default_rng(2).uniform(0, 1, (24, 24))
    assert ssim(u, u) == pytest.approx(1.0, abs=1e-12)


def test_ssim_is_symmetric():
    rng = np.random.default_rng(3)
    u = rng.uniform(0, 1, (20, 20))
    v = rng.uniform(0, 1, (20, 20))
    assert abs(ssim(u, v) - ssim(v, u)) <= 1e-12


def test_ssim_inversion_of_split_image():
    u = np.zeros((60, 60))
    u[:, 30:] = 1.0
    val = ssim(u, 1.0 - u)
    assert val < 0.5
    assert val == pytest.approx(SSIM_INVERSION_REGRESSION, abs=1e-9)


def test_ssim_bounded_and_shape_checked():
    rng = np.random.default_rng(4)
    for _ in range(5):
        u = rng.uniform(0, 1, (16, 16))
        v = rng.uniform(0, 1, (16, 16))
        assert -1.0 <= ssim(u, v) <= 1.0
    with pytest.raises(ValueError):
        ssim(np.zeros((4, 4)), np.zeros((5, 4)))


def test_ssim_map_matches_skimage_reference():
    # independent implementation of the same windowed statistics
    rng = np.random.default_rng(5)
    u = rng.uniform(0, 1, (40, 36))
    v = np.clip(u + rng.normal(0, 0.05, u.shape), 0, 1)
    _, sk_map = structural_similarity(
        u, v, gaussian_weights=True, sigma=1.5, use_sample_covariance=False,
        data_range=1.0, full=True,
    )
    mine = ssim_map(u, v)
    assert np.max(np.abs(mine[5:-5, 5:-5] - sk_map[5:-5, 5:-5])) <= 1e-10


def test_evaluate_color_averages_channels():
    rng = np.random.default_rng(6)
    ref = rng.uniform(0, 1, (16, 16, 3))
    test = ref.copy()
    test[..., 0] += 0.1  # degrade one channel only
    report = evaluate(test, ref)
    per_channel = [psnr(test[..., c], ref[..., c]) for c in range(3)]
    assert report.psnr_db == pytest.approx(float(np.mean(per_channel)))
    assert report.ssim <= 1.0


def test_ssim_window_is_11x11_gaussian_sigma_1_5():
    # recompute the local mean at an interior pixel with an explicitly
    # built 11x11 sigma-1.5 kernel; agreement pins the window geometry
    from halm.metrics import _window_mean

    rng = np.random.default_rng(7)
    u = rng.uniform(0, 1, (31, 31))
    offsets = np.arange(-5, 6, dtype=np.float64)
    g = np.exp(-(offsets**2) / (2 * 1.5**2))
    kernel = np.outer(g, g)
    kernel /= kernel.sum()
    i, j = 15, 15
    manual = float(np.sum(kernel * u[i - 5 : i + 6, j - 5 : j + 6]))
    assert abs(_window_mean(u)[i, j] - manual) <= 1e-12


def test_evaluate_rejects_mixed_dimensionality():
    with pytest.raises(ValueError):
        evaluate(np.zeros((8, 8)), np.zeros((8, 8, 3)))
