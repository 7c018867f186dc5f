"""Closed-form layer: critical margins, success formulas, angles, margin maps.

Derived reference values were frozen from an independent angle-grid scan
(step 1e-6 with boundary bisection); see test_oracle for the live
scan-vs-formula comparison.
"""

import math

import numpy as np
import pytest

from margindisc.known_pair import (
    DegenerateOverlapError,
    PovmAngles,
    critical_margin,
    outcome_probabilities,
    strong_phi,
    strong_success,
    strong_to_weak_margin,
    weak_phi,
    weak_success,
    weak_to_strong_margin,
)

# frozen from the scratch grid-scan oracle (step 1e-6, refined)
WEAK_SUCCESS_06_004 = 0.6929822128134705
STRONG_SUCCESS_06_005 = 0.6736273578451181
STRONG_MARGIN_06_004 = 0.054571583458300384
WEAK_PHI_06_004 = 1.7724768679619771


class TestCriticalMargin:
    def test_orthogonal_states(self):
        assert critical_margin(0.0) == 0.0

    def test_identical_states(self):
        assert critical_margin(1.0) == 0.5

    def test_plain_value(self):
        # sqrt(1 - 0.36) = 0.8 exactly up to the binary representation of 0.6
        assert critical_margin(0.6) == pytest.approx(0.1, abs=1e-15)

    @pytest.mark.parametrize("bad", [-0.1, 1.1, math.nan])
    def test_rejects_bad_overlap(self, bad):
        with pytest.raises(ValueError):
            critical_margin(bad)


class TestWeakSuccess:
    def test_zero_margin_is_unambiguous(self):
        assert weak_success(0.6, 0.0) == pytest.approx(0.4, abs=1e-15)

    def test_above_critical_is_plateau(self):
        assert weak_success(0.6, 0.25) == pytest.approx(0.9, abs=1e-15)

    def test_interior_value(self):
        assert weak_success(0.6, 0.04) == pytest.approx(WEAK_SUCCESS_06_004, abs=1e-12)

    def test_strictly_increasing_below_critical(self):
        rng = np.random.default_rng(7)
        for c in rng.uniform(0.05, 0.95, size=25):
            rc = critical_margin(c)
            grid = np.linspace(0.0, rc, 101)
            values = [weak_success(c, r) for r in grid]
            assert np.all(np.diff(values) > 0)

    def test_continuous_at_critical_margin(self):
        for c in (0.1, 0.5, 0.9, 0.99):
            rc = critical_margin(c)
            assert weak_success(c, rc) == pytest.approx(weak_success(c, rc * (1 - 1e-9)), abs=1e-8)
            assert weak_success(c, rc) == pytest.approx(0.5 * (1 + math.sqrt(1 - c * c)), abs=1e-15)

    def test_success_plus_margin_below_one(self):
        rng = np.random.default_rng(11)
        for c in rng.uniform(0.0, 1.0, size=50):
            r = float(rng.uniform(0.0, critical_margin(c))) if critical_margin(c) > 0 else 0.0
            assert weak_success(c, r) + r <= 1.0 + 1e-12

    def test_identical_states_success_equals_margin(self):
        # one unit-overlap block exists in every spectrum; it must behave
        assert weak_success(1.0, 0.2) == pytest.approx(0.2, abs=1e-15)
        assert weak_success(1.0, 0.7) == 0.5


class TestStrongSuccess:
    def test_zero_margin_is_unambiguous(self):
        assert strong_success(0.6, 0.0) == pytest.approx(0.4, abs=1e-15)

    def test_value_at_critical_matches_plateau(self):
        # direct evaluation of the below-critical branch at r_c gives
        # (0.9/0.4) * 0.4 = 0.9, the same as the plateau: continuity
        assert strong_success(0.6, 0.1) == pytest.approx(0.9, abs=1e-12)

    def test_interior_value(self):
        assert strong_success(0.6, 0.05) == pytest.approx(STRONG_SUCCESS_06_005, abs=1e-12)

    def test_strictly_increasing_below_critical(self):
        rng = np.random.default_rng(13)
        for c in rng.uniform(0.05, 0.95, size=25):
            grid = np.linspace(0.0, critical_margin(c), 101)
            values = [strong_success(c, r) for r in grid]
            assert np.all(np.diff(values) > 0)


class TestAngles:
    def test_weak_phi_zero_margin(self):
        # at r = 0 the label vector is orthogonal to the wrong state
        phi, mu = weak_phi(0.6, 0.0)
        assert phi == pytest.approx(math.pi - math.acos(0.6), abs=1e-12)
        assert mu == pytest.approx(1.0 / (1.0 - math.cos(phi)), abs=1e-15)

    def test_weak_phi_above_critical(self):
        assert weak_phi(0.6, 0.25) == (math.pi / 2, 1.0)

    def test_weak_phi_interior(self):
        phi, _ = weak_phi(0.6, 0.04)
        assert phi == pytest.approx(WEAK_PHI_06_004, abs=1e-12)

    def test_weak_phi_abstain_only_device(self):
        # identical states at zero margin: never answer
        phi, mu = weak_phi(1.0, 0.0)
        assert phi == pytest.approx(math.pi, abs=1e-15)
        assert mu == pytest.approx(0.5, abs=1e-15)

    def test_strong_phi_matches_weak_at_zero(self):
        assert strong_phi(0.6, 0.0).phi == pytest.approx(weak_phi(0.6, 0.0).phi, abs=1e-12)

    def test_strong_phi_at_critical_is_projective(self):
        assert strong_phi(0.6, 0.1).phi == pytest.approx(math.pi / 2, abs=1e-12)

    def test_strong_phi_rejects_identical_states(self):
        with pytest.raises(DegenerateOverlapError):
            strong_phi(1.0, 0.2)

    def test_mu_bounded_by_one(self):
        rng = np.random.default_rng(3)
        for c in rng.uniform(0.0, 0.999, size=50):
            r = float(rng.uniform(0.0, 1.0)) * critical_margin(c)
            _, mu = weak_phi(c, r)
            assert 0.0 < mu <= 1.0 + 1e-12


class TestOutcomeProbabilities:
    def test_orthogonal_projective(self):
        out = outcome_probabilities(0.0, PovmAngles(math.pi / 2, 1.0))
        assert out.p_success == pytest.approx(1.0, abs=1e-15)
        assert out.p_error == pytest.approx(0.0, abs=1e-15)
        assert out.p_abstain == pytest.approx(0.0, abs=1e-15)

    def test_identical_states_are_symmetric(self):
        out = outcome_probabilities(1.0, PovmAngles(math.pi, 0.5))
        assert out.p_success == pytest.approx(out.p_error, abs=1e-15)
        assert out.p_abstain == pytest.approx(1.0 - 2.0 * out.p_success, abs=1e-15)

    def test_weak_margin_saturates(self):
        out = outcome_probabilities(0.6, weak_phi(0.6, 0.04))
        assert out.p_error == pytest.approx(0.04, abs=1e-10)
        assert out.p_success == pytest.approx(weak_success(0.6, 0.04), abs=1e-10)

    def test_weak_saturation_sweep(self):
        rng = np.random.default_rng(23)
        for c in rng.uniform(0.05, 0.95, size=40):
            r = float(rng.uniform(0.0, 1.0)) * critical_margin(c)
            out = outcome_probabilities(c, weak_phi(c, r))
            assert out.p_error == pytest.approx(r, abs=1e-10)
            assert out.p_success == pytest.approx(weak_success(c, r), abs=1e-10)

    def test_strong_saturation_sweep(self):
        rng = np.random.default_rng(29)
        for c in rng.uniform(0.05, 0.95, size=40):
            r = float(rng.uniform(0.05, 1.0)) * critical_margin(c)
            out = outcome_probabilities(c, strong_phi(c, r))
            conditional = out.p_error / (out.p_success + out.p_error)
            assert conditional == pytest.approx(r, abs=1e-10)
            assert out.p_success == pytest.approx(strong_success(c, r), abs=1e-10)

    def test_probabilities_sum_to_one(self):
        rng = np.random.default_rng(31)
        for c in rng.uniform(0.0, 1.0, size=40):
            r = float(rng.uniform(0.0, 1.0)) * critical_margin(c) if c > 0 else 0.0
            out = outcome_probabilities(c, weak_phi(c, r))
            assert sum(out) == pytest.approx(1.0, abs=1e-12)
            assert all(0.0 <= x <= 1.0 for x in out)

    def test_rejects_inconsistent_mu(self):
        with pytest.raises(ValueError):
            outcome_probabilities(0.5, PovmAngles(2.0, 1.0))

    def test_rejects_out_of_range_phi(self):
        with pytest.raises(ValueError):
            outcome_probabilities(0.5, PovmAngles(0.3, 1.0 / (1.0 - math.cos(0.3))))


class TestMarginMaps:
    def test_zero_maps_to_zero(self):
        assert weak_to_strong_margin(0.3, 0.0) == 0.0
        assert strong_to_weak_margin(0.3, 0.0) == 0.0

    def test_critical_margin_is_shared_fixed_point(self):
        assert weak_to_strong_margin(0.6, 0.1) == pytest.approx(0.1, abs=1e-12)
        assert strong_to_weak_margin(0.6, 0.1) == pytest.approx(0.1, abs=1e-12)

    def test_interior_value(self):
        assert weak_to_strong_margin(0.6, 0.04) == pytest.approx(STRONG_MARGIN_06_004, abs=1e-12)

    def test_roundtrip_both_ways(self):
        rng = np.random.default_rng(41)
        for c in rng.uniform(0.05, 0.95, size=30):
            rc = critical_margin(c)
            r = float(rng.uniform(0.0, 1.0)) * rc
            forward = weak_to_strong_margin(c, r)
            assert strong_to_weak_margin(c, forward) == pytest.approx(r, abs=1e-9)
        assert strong_to_weak_margin(0.6, STRONG_MARGIN_06_004) == pytest.approx(0.04, abs=1e-9)

    def test_strictly_increasing(self):
        grid = np.linspace(0.0, critical_margin(0.6), 200)
        values = [weak_to_strong_margin(0.6, r) for r in grid]
        assert np.all(np.diff(values) > 0)

    def test_strong_margin_dominates_weak(self):
        # the strong condition is stricter, so its margin reads larger
        rng = np.random.default_rng(43)
        for c in rng.uniform(0.05, 0.95, size=30):
            r = float(rng.uniform(0.01, 0.99)) * critical_margin(c)
            assert weak_to_strong_margin(c, r) >= r

    def test_rejects_margin_above_critical(self):
        with pytest.raises(ValueError):
            weak_to_strong_margin(0.6, 0.2)
