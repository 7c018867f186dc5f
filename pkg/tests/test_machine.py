"""Block combinatorics: overlaps, weights, baselines, critical margins."""

import math

import numpy as np
import pytest

from margindisc.machine import (
    JordanSpectrum,
    PortConfig,
    global_critical_margin,
    jordan_spectrum,
    minimum_error_baseline,
    overlaps,
    unambiguous_baseline,
    weights,
)

SMALL_CONFIGS = [(n, npr) for n in (1, 2, 3, 5, 9, 12, 20) for npr in (1, 2, 3, 4)]


class TestPortConfig:
    def test_rejects_zero_ports(self):
        with pytest.raises(ValueError):
            PortConfig(0, 1)
        with pytest.raises(ValueError):
            PortConfig(1, 0)

    def test_derived_dimensions(self):
        config = PortConfig(9, 2)
        assert config.blocks == 10
        assert config.d_program == 10
        assert config.d_joint == 12
        assert config.total_qubits == 20


class TestOverlaps:
    def test_hand_expanded_binomials(self):
        np.testing.assert_allclose(overlaps(PortConfig(2, 1)), [1 / 3, 2 / 3, 1.0], atol=1e-15)

    def test_last_entry_is_exactly_one(self):
        for n, npr in SMALL_CONFIGS:
            assert overlaps(PortConfig(n, npr))[-1] == 1.0

    def test_first_entry_nine_two(self):
        assert overlaps(PortConfig(9, 2))[0] == pytest.approx(1 / 55, abs=1e-15)

    def test_strictly_increasing(self):
        for n, npr in SMALL_CONFIGS:
            c = overlaps(PortConfig(n, npr))
            assert c[0] > 0
            assert np.all(np.diff(c) > 0)

    def test_large_copy_counts_stay_finite(self):
        c = overlaps(PortConfig(290, 10))
        assert np.all(np.isfinite(c))
        assert c[-1] == 1.0

    def test_overflow_guard(self):
        with pytest.raises(OverflowError):
            overlaps(PortConfig(300, 2))


class TestWeights:
    def test_hand_values(self):
        np.testing.assert_allclose(weights(PortConfig(1, 1)), [1 / 3, 2 / 3], atol=1e-15)
        assert weights(PortConfig(9, 2))[0] == pytest.approx(0.025, abs=1e-15)

    def test_normalized(self):
        for n, npr in SMALL_CONFIGS:
            p = weights(PortConfig(n, npr))
            assert np.all(p > 0)
            assert p.sum() == pytest.approx(1.0, abs=1e-12)


class TestBaselines:
    def test_unambiguous_values(self):
        assert unambiguous_baseline(PortConfig(9, 2)) == pytest.approx(0.45, abs=1e-15)
        assert unambiguous_baseline(PortConfig(1, 1)) == pytest.approx(1 / 6, abs=1e-15)

    def test_unambiguous_equals_spectrum_sum(self):
        # closed form vs independent evaluation through the block arrays
        for n, npr in SMALL_CONFIGS:
            config = PortConfig(n, npr)
            block_sum = float(weights(config) @ (1.0 - overlaps(config)))
            assert unambiguous_baseline(config) == pytest.approx(block_sum, abs=1e-12)

    def test_minimum_error_two_term_sum(self):
        # k=0 contributes (2/6) * sqrt(3)/2 inside the halved sum, k=1 nothing
        assert minimum_error_baseline(PortConfig(1, 1)) == pytest.approx(
            0.5 + math.sqrt(3) / 12, abs=1e-14
        )

    def test_minimum_error_equals_spectrum_sum(self):
        for n, npr in SMALL_CONFIGS:
            config = PortConfig(n, npr)
            c = overlaps(config)
            block_sum = float(weights(config) @ (0.5 * (1.0 + np.sqrt(1.0 - c**2))))
            assert minimum_error_baseline(config) == pytest.approx(block_sum, abs=1e-12)

    def test_minimum_error_range(self):
        for n, npr in SMALL_CONFIGS:
            value = minimum_error_baseline(PortConfig(n, npr))
            assert 0.5 < value <= 1.0


class TestJordanSpectrum:
    def test_arrays_are_consistent(self):
        spectrum = jordan_spectrum(9, 2)
        np.testing.assert_allclose(spectrum.c, overlaps(spectrum.config), atol=0)
        np.testing.assert_allclose(spectrum.p, weights(spectrum.config), atol=0)
        assert np.all(np.diff(spectrum.r_crit) > 0)
        assert spectrum.r_crit[-1] == 0.5

    def test_arrays_are_read_only(self):
        spectrum = jordan_spectrum(3, 2)
        with pytest.raises(ValueError):
            spectrum.c[0] = 0.5

    def test_j_labels(self):
        spectrum = jordan_spectrum(2, 1)
        assert spectrum.j_of_alpha(1) == 0.5
        assert spectrum.j_of_alpha(3) == 2.5
        assert jordan_spectrum(2, 2).j_of_alpha(1) == 1.0
        with pytest.raises(ValueError):
            spectrum.j_of_alpha(4)

    def test_rejects_tampered_arrays(self):
        spectrum = jordan_spectrum(2, 1)
        bad_c = spectrum.c.copy()
        bad_c[0], bad_c[1] = bad_c[1], bad_c[0]
        with pytest.raises(ValueError):
            JordanSpectrum(config=spectrum.config, c=bad_c, p=spectrum.p, r_crit=spectrum.r_crit)
        bad_p = spectrum.p * 1.01
        with pytest.raises(ValueError):
            JordanSpectrum(config=spectrum.config, c=spectrum.c, p=bad_p, r_crit=spectrum.r_crit)


class TestGlobalCriticalMargin:
    def test_nine_two_reference_band(self):
        # frozen reference: ~0.154 for nine program and two data copies
        assert 0.153 <= global_critical_margin(jordan_spectrum(9, 2)) <= 0.155

    def test_hand_value_one_one(self):
        expected = (1 / 3) * 0.5 * (1 - math.sqrt(0.75)) + (2 / 3) * 0.5
        assert global_critical_margin(jordan_spectrum(1, 1)) == pytest.approx(expected, abs=1e-14)

    def test_always_below_one_half(self):
        for n, npr in SMALL_CONFIGS:
            assert global_critical_margin(jordan_spectrum(n, npr)) < 0.5
