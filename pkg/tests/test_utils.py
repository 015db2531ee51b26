"""
Tests for utility functions: random streams, hashing, headers and output paths.
"""

import numpy as np

from superbunch.utils import (
    compensated_sum,
    config_hash,
    ensure_directories,
    format_float,
    output_header,
    stream_generator,
    stream_seed,
)


class TestStreams:
    """Tests for stream_generator() and stream_seed()."""

    def test_same_key_same_stream(self):
        """Test a (seed, key) pair always gives the same numbers."""
        assert np.array_equal(stream_generator(5, 1, 2).random(8), stream_generator(5, 1, 2).random(8))

    def test_keys_are_independent(self):
        """Test different keys give different streams."""
        assert not np.array_equal(stream_generator(5, 1).random(8), stream_generator(5, 2).random(8))

    def test_generator_uses_stream_seed(self):
        """Test the generator is Philox seeded by stream_seed for the same key."""
        expected = np.random.Generator(np.random.Philox(stream_seed(5, 3, 4))).random(8)
        assert np.array_equal(stream_generator(5, 3, 4).random(8), expected)

    def test_nested_seed_sequence(self):
        """Test a SeedSequence seed extends its spawn key."""
        nested = stream_generator(stream_seed(5, 1), 2).random(4)
        assert np.array_equal(nested, stream_generator(5, 1, 2).random(4))


class TestHashing:
    """Tests for config_hash() and output_header()."""

    def test_key_order_irrelevant(self):
        """Test the hash uses canonical JSON."""
        assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})

    def test_sixteen_hex_digits(self):
        """Test the digest is 16 lowercase hex characters."""
        digest = config_hash({"seed": 1})
        assert len(digest) == 16
        assert int(digest, 16) >= 0

    def test_header(self):
        """Test the artifact header line format."""
        assert output_header("abc", 3) == "# superbunch config_hash=abc seed=3"


class TestNumbers:
    """Tests for compensated_sum() and format_float()."""

    def test_compensated_sum_is_order_free(self):
        """Test fsum gives the same result in any order."""
        values = [1e16, 1.0, -1e16, 3.0]
        assert compensated_sum(values) == 4.0
        assert compensated_sum(values[::-1]) == 4.0

    def test_format_round_trip(self):
        """Test 17 significant digits reproduce the float."""
        for value in (0.1, 2 * np.pi / 2.15e-6, 1e-300):
            assert float(format_float(value)) == value


class TestEnsureDirectories:
    """Tests for ensure_directories() function."""

    def test_creates_given_path(self, tmp_path):
        """Test nested directories are created."""
        target = ensure_directories(tmp_path / "a" / "b")
        assert target.is_dir()

    def test_default_path(self, temp_output_dir):
        """Test the default is the configured output directory."""
        assert ensure_directories() == temp_output_dir
        assert temp_output_dir.is_dir()
