import hashlib
from pathlib import Path

import numpy as np
import pytest

from degraforge import (
    NoiseSpec,
    StreamKey,
    add_gaussian_noise,
    classical5_cases,
    convolve,
    decode_image,
    derive_stream,
    downsample_bicubic,
    jpeg_compress,
    make_isotropic_gaussian,
    practical8_cases,
    read_manifest,
)
from degraforge.bench import BenchmarkError, case_name, generate_benchmark
from degraforge.core import STAGE_NOISE, float_to_uint8
from degraforge.kernels import discrete_variance

PRACTICAL8_NAMES = ["bic", "b2.0", "n20", "j60", "b2.0n20", "b2.0j60", "n20j60", "b2.0n20j60"]


class TestCaseSets:
    def test_practical8_names(self):
        assert [c.name for c in practical8_cases(4)] == PRACTICAL8_NAMES

    def test_practical8_gate_vectors_are_a_bijection(self):
        vectors = {c.gate_vector for c in practical8_cases(4)}
        assert vectors == {(b, n, j) for b in (0, 1) for n in (0, 1) for j in (0, 1)}

    def test_bic_case_has_no_stage_blocks(self):
        bic = practical8_cases(4)[0]
        recipe = bic.to_recipe("bic/x.png", master_seed=0)
        assert recipe.blur is None and recipe.noise is None and recipe.jpeg is None
        assert recipe.scale == 4

    def test_classical5_names_and_recipes(self):
        cases = classical5_cases(4)
        assert [c.name for c in cases] == ["bic", "b0.6", "b1.2", "b1.8", "b2.4"]
        blurred = [c for c in cases if c.blur_sigma is not None]
        assert len(blurred) == 4
        assert all(c.noise_sigma is None and c.jpeg_quality is None for c in cases)

    def test_blur_variance_ordering(self):
        low = discrete_variance(make_isotropic_gaussian(0.6, 21))
        high = discrete_variance(make_isotropic_gaussian(2.4, 21))
        assert low < high

    def test_shared_downsampling(self):
        assert {c.scale for c in classical5_cases(3)} == {3}

    def test_case_name_formatting(self):
        assert case_name(None, None, None) == "bic"
        assert case_name(2.0, 20.0, 60) == "b2.0n20j60"
        assert case_name(0.6, None, None) == "b0.6"
        assert case_name(None, 20.0, 60) == "n20j60"


def _digest_tree(root: Path) -> dict:
    return {
        str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


class TestGenerateBenchmark:
    def test_cardinality_and_layout(self, corpus_dir, tmp_path):
        out = tmp_path / "p8"
        records = generate_benchmark(corpus_dir, out, practical8_cases(4), master_seed=1)
        assert len(records) == 6 * 8
        assert sum(1 for _ in read_manifest(out / "manifest.jsonl")) == 48
        for case in PRACTICAL8_NAMES:
            files = sorted((out / case).glob("*.png"))
            assert len(files) == 6

    def test_bic_case_is_pure_downsampling(self, corpus_dir, tmp_path):
        out = tmp_path / "p8"
        generate_benchmark(corpus_dir, out, practical8_cases(4)[:1], master_seed=1)
        for name in ["img000", "img003"]:
            hr = decode_image(corpus_dir / f"{name}.png")
            lr = decode_image(out / "bic" / f"{name}.png")
            expected = float_to_uint8(downsample_bicubic(hr, 4).samples)
            assert np.array_equal(float_to_uint8(lr.samples), expected)

    def test_rerun_changes_nothing(self, corpus_dir, tmp_path):
        out = tmp_path / "p8"
        generate_benchmark(corpus_dir, out, practical8_cases(4), master_seed=7)
        first = _digest_tree(out)
        generate_benchmark(corpus_dir, out, practical8_cases(4), master_seed=7)
        assert _digest_tree(out) == first

    def test_full_corner_is_the_exact_composition(self, corpus_dir, tmp_path):
        out = tmp_path / "p8"
        case = practical8_cases(4)[-1]
        assert case.name == "b2.0n20j60"
        generate_benchmark(corpus_dir, out, [case], master_seed=5)
        name = "img002"
        hr = decode_image(corpus_dir / f"{name}.png")
        image_key = f"b2.0n20j60/{name}.png"
        rng = derive_stream(StreamKey(5, image_key, STAGE_NOISE))
        stage = convolve(hr, make_isotropic_gaussian(2.0, 21))
        stage = downsample_bicubic(stage, 4)
        stage = add_gaussian_noise(stage, NoiseSpec("gaussian_grey", sigma_255=20.0), rng)
        stage = jpeg_compress(stage, 60)
        stored = decode_image(out / "b2.0n20j60" / f"{name}.png")
        assert np.array_equal(float_to_uint8(stored.samples), float_to_uint8(stage.samples))

    def test_manifest_records_sorted_and_replayable(self, corpus_dir, tmp_path):
        out = tmp_path / "p8"
        generate_benchmark(corpus_dir, out, practical8_cases(4), master_seed=1)
        keys = [r["image_key"] for r in read_manifest(out / "manifest.jsonl")]
        assert keys == sorted(keys)

    def test_empty_dir_is_fatal(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        with pytest.raises(BenchmarkError):
            generate_benchmark(empty, tmp_path / "out", practical8_cases(4))

    def test_unreadable_file_recorded_and_processing_continues(self, corpus_dir, tmp_path):
        (corpus_dir / "broken.png").write_bytes(b"not a png at all")
        out = tmp_path / "p8"
        records = generate_benchmark(corpus_dir, out, practical8_cases(4)[:2], master_seed=1)
        errors = [r for r in records if "error" in r]
        good = [r for r in records if "error" not in r]
        assert len(errors) == 2  # one per case
        assert len(good) == 12
