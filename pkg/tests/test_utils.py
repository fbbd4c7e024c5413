import hashlib

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fraclt.exceptions import ValidationError
from fraclt.utils import (
    SEED_MASK,
    derive_seed,
    derive_stream,
    format_float,
    is_power_of_two,
    make_generator,
    validate_interval,
    validate_sorted,
)


class TestSeeds:
    def test_derive_seed_is_blake2b_of_little_endian_words(self):
        payload = (42).to_bytes(8, "little") + (3).to_bytes(8, "little")
        expected = int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")
        assert derive_seed(42, 3) == expected

    @given(st.integers(min_value=0, max_value=SEED_MASK), st.integers(min_value=0, max_value=10_000))
    def test_derived_seeds_are_64_bit(self, master, replicate):
        assert 0 <= derive_seed(master, replicate) <= SEED_MASK

    def test_replicates_get_distinct_seeds(self):
        assert len({derive_seed(0, r) for r in range(1000)}) == 1000

    def test_rejects_negative_replicates(self):
        with pytest.raises(ValidationError):
            derive_seed(0, -1)

    def test_streams_differ_by_label(self):
        assert derive_stream(1, "lil") != derive_stream(1, "holder")
        assert derive_stream(1, "lil") == derive_stream(1, "lil")

    def test_generator_is_reproducible(self):
        np.testing.assert_array_equal(make_generator(5).random(4), make_generator(5).random(4))


class TestFormatting:
    @pytest.mark.parametrize("value, text", [(0.0, "0"), (1.0, "1"), (0.1, "0.10000000000000001"), (None, "")])
    def test_format_float(self, value, text):
        assert format_float(value) == text

    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_format_float_is_exact(self, value):
        assert float(format_float(value)) == value


class TestValidation:
    def test_power_of_two(self):
        assert [n for n in range(0, 70) if is_power_of_two(n)] == [1, 2, 4, 8, 16, 32, 64]

    def test_intervals(self):
        validate_interval(0.0, 0.0)
        validate_interval(-np.inf, np.inf)
        with pytest.raises(ValidationError):
            validate_interval(1.0, 0.0)
        with pytest.raises(ValidationError):
            validate_interval(float("nan"), 1.0)

    def test_sorted_grids(self):
        np.testing.assert_array_equal(validate_sorted([1, 2, 3]), [1.0, 2.0, 3.0])
        for grid in ([], [1.0, 1.0], [[1.0, 2.0]]):
            with pytest.raises(ValidationError):
                validate_sorted(grid)
