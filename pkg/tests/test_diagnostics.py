"""Tests for the end-to-end gradient self-check."""

import time

from mixsent.diagnostics import GRADCHECK_THRESHOLD, tiny_gradcheck


class TestTinyGradcheck:
    def test_default_seed_under_threshold(self):
        started = time.monotonic()
        err = tiny_gradcheck()
        elapsed = time.monotonic() - started
        assert err < GRADCHECK_THRESHOLD
        assert elapsed < 30.0

    def test_seed_one_under_threshold(self):
        assert tiny_gradcheck(seed=1) < GRADCHECK_THRESHOLD

    def test_same_seed_same_error(self):
        assert tiny_gradcheck(seed=98) == tiny_gradcheck(seed=98)
