import numpy as np
import pytest

from degraforge import (
    NoiseSpec,
    PipelineConfig,
    PlanarImage,
    StreamKey,
    add_gaussian_noise,
    add_poisson_noise,
    apply_gate,
    convolve,
    derive_stream,
    downsample_bicubic,
    jpeg_compress,
    make_isotropic_gaussian,
    psnr,
    run_gated,
    run_recipe,
    sample_recipe,
)
from degraforge.core import STAGE_NOISE
from degraforge.degrade import Blur, GateSpec, Noise

from .conftest import random_image, toy_photo
from .reference import reference_convolve


def noise_rng(seed=0, key="img"):
    return derive_stream(StreamKey(seed, key, STAGE_NOISE))


class TestConvolve:
    def test_constant_image_unchanged(self):
        img = PlanarImage.full(16, 16, 0.42)
        out = convolve(img, make_isotropic_gaussian(2.0, 9))
        assert np.abs(out.samples - 0.42).max() < 1e-12

    def test_delta_kernel_is_identity(self, rng):
        img = random_image(rng, 14, 18)
        out = convolve(img, make_isotropic_gaussian(0.1, 21))
        assert np.abs(out.samples - img.samples).max() < 1e-9

    def test_matches_brute_force_exactly(self):
        rng = np.random.default_rng(21)
        img = random_image(rng, 5, 5)
        kernel = make_isotropic_gaussian(1.1, 3)
        out = convolve(img, kernel)
        expected = reference_convolve(img.samples, kernel.weights)
        assert np.array_equal(out.samples, expected)

    def test_rejects_oversized_kernel(self, rng):
        img = random_image(rng, 4, 30)
        with pytest.raises(ValueError):
            convolve(img, make_isotropic_gaussian(2.0, 11))
        convolve(img, make_isotropic_gaussian(2.0, 9))  # 9 == 2*4+1 is allowed


class TestGaussianNoise:
    def test_std_matches_sigma(self):
        img = PlanarImage.full(1024, 1024, 0.5, channels=1)
        spec = NoiseSpec("gaussian_grey", sigma_255=20.0)
        out = add_gaussian_noise(img, spec, noise_rng())
        std = float(np.std(out.samples - 0.5))
        assert abs(std - 20.0 / 255.0) < 0.02 * (20.0 / 255.0)

    def test_vanishing_sigma_is_identity_limit(self, rng):
        img = random_image(rng, 32, 32)
        spec = NoiseSpec("gaussian_grey", sigma_255=1e-9)
        out = add_gaussian_noise(img, spec, noise_rng())
        assert np.abs(out.samples - img.samples).max() < 1e-9

    def test_grey_mode_shares_field_across_channels(self, rng):
        img = PlanarImage.full(16, 16, 0.5)
        out = add_gaussian_noise(img, NoiseSpec("gaussian_grey", sigma_255=10.0), noise_rng())
        assert np.array_equal(out.samples[0], out.samples[1])
        assert np.array_equal(out.samples[0], out.samples[2])

    def test_color_mode_differs_across_channels(self, rng):
        img = PlanarImage.full(16, 16, 0.5)
        out = add_gaussian_noise(img, NoiseSpec("gaussian_color", sigma_255=10.0), noise_rng())
        assert not np.array_equal(out.samples[0], out.samples[1])

    def test_rejects_wrong_spec(self, rng):
        img = random_image(rng, 8, 8)
        with pytest.raises(ValueError):
            add_gaussian_noise(img, NoiseSpec("poisson_grey", poisson_lambda=100.0), noise_rng())
        with pytest.raises(ValueError):
            NoiseSpec("gaussian_grey", sigma_255=0.0)


class TestPoissonNoise:
    def test_zero_stays_zero(self):
        img = PlanarImage.full(32, 32, 0.0)
        out = add_poisson_noise(img, NoiseSpec("poisson_color", poisson_lambda=100.0), noise_rng())
        assert np.array_equal(out.samples, img.samples)

    def test_variance_matches_shot_model(self):
        # Var(Poisson(x*lam)/lam) = x / lam
        img = PlanarImage.full(1024, 1024, 0.5, channels=1)
        out = add_poisson_noise(img, NoiseSpec("poisson_color", poisson_lambda=1000.0), noise_rng())
        var = float(np.var(out.samples - 0.5))
        assert abs(var - 5e-4) < 0.05 * 5e-4

    def test_large_lambda_converges_to_input(self, rng):
        img = random_image(rng, 32, 32)
        out = add_poisson_noise(img, NoiseSpec("poisson_color", poisson_lambda=1e6), noise_rng())
        assert np.abs(out.samples - img.samples).max() < 1e-2

    def test_grey_mode_shares_deviation(self, rng):
        img = random_image(rng, 16, 16)
        out = add_poisson_noise(img, NoiseSpec("poisson_grey", poisson_lambda=200.0), noise_rng())
        deviation = out.samples - np.clip(img.samples, 0, 1)
        # same field added to every channel wherever no clamping occurred
        interior = (out.samples > 0.0) & (out.samples < 1.0)
        mask = interior.all(axis=0)
        assert np.allclose(deviation[0][mask], deviation[1][mask])

    def test_rejects_bad_lambda(self):
        with pytest.raises(ValueError):
            NoiseSpec("poisson_grey", poisson_lambda=0.0)


class TestJpeg:
    def test_quality_100_near_lossless(self, photo):
        out = jpeg_compress(photo, 100)
        assert psnr(out, photo) > 40.0

    def test_constant_image_survives_heavy_quantization(self):
        img = PlanarImage.full(64, 64, 0.5)
        out = jpeg_compress(img, 40)
        assert psnr(out, img) > 50.0

    def test_mean_psnr_increases_with_quality(self):
        rng = np.random.default_rng(5)
        photos = [toy_photo(rng, 64, 64) for _ in range(10)]
        means = []
        for q in (40, 60, 95):
            means.append(np.mean([psnr(jpeg_compress(p, q), p) for p in photos]))
        assert means[0] < means[1] < means[2]

    def test_deterministic(self, photo):
        a = jpeg_compress(photo, 60)
        b = jpeg_compress(photo, 60)
        assert np.array_equal(a.samples, b.samples)

    def test_single_channel(self, rng):
        img = PlanarImage.from_planes(toy_photo(rng, 48, 48).luma())
        out = jpeg_compress(img, 80)
        assert out.channels == 1
        assert psnr(out, img) > 25.0

    def test_rejects_out_of_range_quality(self, photo):
        with pytest.raises(ValueError):
            jpeg_compress(photo, 0)
        with pytest.raises(ValueError):
            jpeg_compress(photo, 101)


class TestApplyGate:
    def test_closed_gate_returns_input_object(self, rng):
        img = random_image(rng, 16, 16)
        step = Blur(make_isotropic_gaussian(2.0, 9))
        assert apply_gate(step, 0, img) is img

    def test_open_gate_equals_direct_application(self, rng):
        img = random_image(rng, 16, 16)
        kernel = make_isotropic_gaussian(2.0, 9)
        gated = apply_gate(Blur(kernel), 1, img)
        assert np.array_equal(gated.samples, convolve(img, kernel).samples)

    def test_noise_step_reproducible_from_stream(self, rng):
        img = random_image(rng, 16, 16)
        spec = NoiseSpec("gaussian_grey", sigma_255=15.0)
        a = apply_gate(Noise(spec), 1, img, noise_rng(3, "k"))
        b = apply_gate(Noise(spec), 1, img, noise_rng(3, "k"))
        assert np.array_equal(a.samples, b.samples)


class TestSampleRecipe:
    def test_practical_mode_opens_every_gate(self):
        config = PipelineConfig(mode="practical")
        for i in range(20):
            recipe = sample_recipe(config, StreamKey(1, f"img{i}", 0))
            assert recipe.gate_outcomes == (1, 1, 1)
            assert recipe.blur is not None and recipe.noise is not None and recipe.jpeg is not None

    def test_zero_probability_gates_leave_only_downsampling(self):
        config = PipelineConfig(mode="gated", gates=GateSpec.uniform(0.0))
        for i in range(20):
            recipe = sample_recipe(config, StreamKey(1, f"img{i}", 0))
            assert recipe.gate_outcomes == (0, 0, 0)
            assert recipe.blur is None and recipe.noise is None and recipe.jpeg is None

    def test_classical_mode_never_draws_noise_or_jpeg(self):
        config = PipelineConfig(mode="classical", blur_sigma=(0.0, 3.0))
        gates_seen = set()
        for i in range(200):
            recipe = sample_recipe(config, StreamKey(9, f"img{i}", 0))
            assert recipe.gate_outcomes[1] == 0 and recipe.gate_outcomes[2] == 0
            assert recipe.noise is None and recipe.jpeg is None
            gates_seen.add(recipe.gate_outcomes[0])
        assert gates_seen == {0, 1}

    def test_sampled_parameters_respect_ranges(self):
        config = PipelineConfig(mode="practical")
        for i in range(100):
            recipe = sample_recipe(config, StreamKey(4, f"img{i}", 0))
            assert 0.1 <= recipe.blur.sigma_x <= 3.0
            assert 1.0 <= recipe.noise.sigma_255 <= 30.0
            assert 40 <= recipe.jpeg <= 95

    def test_hard_model_draws_full_taxonomy(self):
        config = PipelineConfig(mode="practical", hard_model=True)
        kernel_types = set()
        noise_types = set()
        for i in range(300):
            recipe = sample_recipe(config, StreamKey(11, f"img{i}", 0))
            kernel_types.add(recipe.blur.kernel_type)
            noise_types.add((recipe.noise.noise_type, recipe.noise.color_mode))
        assert kernel_types == {
            "isotropic_gaussian", "anisotropic_gaussian", "generalized_gaussian", "plateau",
        }
        assert noise_types == {
            ("gaussian", "grey"), ("gaussian", "color"), ("poisson", "grey"), ("poisson", "color"),
        }

    def test_same_key_same_recipe(self):
        config = PipelineConfig()
        a = sample_recipe(config, StreamKey(5, "img", 0))
        b = sample_recipe(config, StreamKey(5, "img", 0))
        assert a == b


class TestRunRecipe:
    def test_all_zero_gates_equal_pure_downsampling(self, rng):
        config = PipelineConfig(mode="gated", gates=GateSpec.uniform(0.0))
        for i in range(5):
            img = toy_photo(rng, 48, 48)
            lr, recipe = run_gated(img, config, StreamKey(2, f"img{i}", 0))
            assert recipe.gate_outcomes == (0, 0, 0)
            assert np.array_equal(lr.samples, downsample_bicubic(img, 4).samples)

    def test_all_one_gates_equal_classical_composition(self, rng):
        config = PipelineConfig(mode="practical")
        for i in range(5):
            img = toy_photo(rng, 48, 48)
            key = StreamKey(3, f"img{i}", 0)
            lr, recipe = run_gated(img, config, key)
            from degraforge import make_kernel
            stage1 = convolve(img, make_kernel(recipe.blur))
            stage2 = downsample_bicubic(stage1, recipe.scale)
            stage3 = add_gaussian_noise(
                stage2, NoiseSpec.from_params(recipe.noise), noise_rng(3, f"img{i}")
            )
            stage4 = jpeg_compress(stage3, recipe.jpeg)
            assert np.array_equal(lr.samples, stage4.samples)

    def test_replay_is_bit_exact(self, rng):
        img = toy_photo(rng, 64, 64)
        config = PipelineConfig()
        lr, recipe = run_gated(img, config, StreamKey(8, "img", 0))
        assert np.array_equal(run_recipe(img, recipe).samples, lr.samples)
        assert np.array_equal(run_recipe(img, recipe).samples, lr.samples)

    def test_output_dims(self, rng):
        img = random_image(rng, 50, 38)
        lr, _ = run_gated(img, PipelineConfig(), StreamKey(0, "img", 0))
        assert (lr.height, lr.width) == (12, 9)

    def test_scale_larger_than_image_errors(self, rng):
        img = random_image(rng, 3, 3)
        with pytest.raises(ValueError):
            run_gated(img, PipelineConfig(), StreamKey(0, "img", 0))


class TestPipelineConfig:
    def test_json_roundtrip(self):
        config = PipelineConfig(mode="classical", scale=2, hard_model=True,
                                gates=GateSpec.uniform(0.25), master_seed=17)
        assert PipelineConfig.from_dict(config.to_dict()) == config

    def test_scalar_gate_probability_accepted(self):
        config = PipelineConfig.from_dict({"gate_probabilities": 0.75})
        assert config.gates.probabilities["noise"] == 0.75

    def test_rejects_unknown_keys(self):
        with pytest.raises(ValueError):
            PipelineConfig.from_dict({"blur": [0, 1]})

    def test_rejects_inverted_range(self):
        with pytest.raises(ValueError):
            PipelineConfig(blur_sigma=(3.0, 0.1))

    def test_rejects_bad_mode_and_probability(self):
        with pytest.raises(ValueError):
            PipelineConfig(mode="shuffled")
        with pytest.raises(ValueError):
            GateSpec.uniform(1.5)
