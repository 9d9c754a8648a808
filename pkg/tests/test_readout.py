import os
import sys

import numpy as np
import pytest
from scipy.stats import norm

# Add the src directory to the Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from robust_meas.codes import build_c6, build_repetition
from robust_meas.exceptions import DomainError, IndeterminateClassificationError, IndexRangeError
from robust_meas.readout import (
    QUADRATURE_STD,
    ReadoutConfig,
    classify,
    classify_outcome,
    decoded_success_for_readout,
    estimate_misclassification,
    misclassification_bounds,
    misclassification_curve,
    readout_noise_model,
    rotated_amplitude,
    rotated_means,
    sample_quadratures,
)


class TestReadoutConfig:
    """Test cases for readout parameters."""

    def test_coupling_time(self):
        """Test theta = 2 pi / (q gamma)."""
        assert ReadoutConfig(q=4, alpha=1.0, gamma=0.5).theta == pytest.approx(np.pi)

    def test_photon_number(self):
        """Test |alpha|^2 for a complex amplitude."""
        assert ReadoutConfig(q=2, alpha=3 + 4j).photon_number == pytest.approx(25.0)

    def test_low_photon_advisory(self):
        """Test the advisory is raised for |alpha| = 1 but not |alpha| = 4 at q = 2."""
        assert ReadoutConfig(q=2, alpha=1.0).low_photon_advisory
        assert not ReadoutConfig(q=2, alpha=4.0).low_photon_advisory

    def test_invalid_parameters(self):
        """Test q < 2 and non-positive coupling are rejected."""
        with pytest.raises(DomainError):
            ReadoutConfig(q=1, alpha=1.0)
        with pytest.raises(DomainError):
            ReadoutConfig(q=2, alpha=1.0, gamma=0.0)


class TestRotation:
    """Test cases for the eigenvalue-dependent phase rotation."""

    def test_binary_flips_sign(self):
        """Test alpha = 3 rotates to -3 for z = 1 at q = 2."""
        assert rotated_amplitude(ReadoutConfig(q=2, alpha=3.0), 1) == pytest.approx(-3.0)

    def test_quaternary_quarter_turn(self):
        """Test alpha = 3 rotates to -3i for z = 1 at q = 4."""
        assert rotated_amplitude(ReadoutConfig(q=4, alpha=3.0), 1) == pytest.approx(-3j)

    def test_rotations_compose(self):
        """Test rotating by a and then b equals rotating by a + b mod q."""
        cfg = ReadoutConfig(q=5, alpha=1.5 + 0.5j)
        for a in range(5):
            for b in range(5):
                expected = np.exp(-2j * np.pi * a / 5) * rotated_amplitude(cfg, b)
                assert rotated_amplitude(cfg, (a + b) % 5) == pytest.approx(expected)

    def test_independent_of_gamma(self):
        """Test the rotation angle theta * gamma does not depend on gamma."""
        a = rotated_amplitude(ReadoutConfig(q=3, alpha=2.0, gamma=1.0), 2)
        b = rotated_amplitude(ReadoutConfig(q=3, alpha=2.0, gamma=7.0), 2)
        assert a == pytest.approx(b)

    def test_symbol_out_of_range(self):
        """Test z = q is rejected."""
        with pytest.raises(IndexRangeError):
            rotated_amplitude(ReadoutConfig(q=3, alpha=1.0), 3)


class TestQuadratures:
    """Test cases for homodyne samples and classification."""

    def test_sample_moments(self):
        """Test sample means sqrt(2) (Re beta, Im beta) and standard deviation 1/sqrt(2)."""
        cfg = ReadoutConfig(q=4, alpha=2.0)
        samples = sample_quadratures(cfg, 1, seed=0, size=100_000)
        np.testing.assert_allclose(samples.mean(axis=0), [0.0, -2 * np.sqrt(2)], atol=0.02)
        np.testing.assert_allclose(samples.std(axis=0), [QUADRATURE_STD] * 2, atol=0.01)

    def test_single_sample_shape(self):
        """Test one sample is an (x, p) pair and seeding is reproducible."""
        cfg = ReadoutConfig(q=2, alpha=1.0)
        a = sample_quadratures(cfg, 0, seed=3)
        assert a.shape == (2,)
        np.testing.assert_array_equal(a, sample_quadratures(cfg, 0, seed=3))

    def test_means_classify_to_themselves(self):
        """Test each rotated mean is classified as its own symbol."""
        cfg = ReadoutConfig(q=6, alpha=2.0)
        assert classify(cfg, rotated_means(cfg)).tolist() == list(range(6))
        assert classify_outcome(cfg, rotated_means(cfg)[4]) == 4

    def test_vacuum_is_indeterminate(self):
        """Test alpha = 0 carries no phase to classify."""
        cfg = ReadoutConfig(q=2, alpha=0.0)
        with pytest.raises(IndeterminateClassificationError):
            classify_outcome(cfg, [0.1, 0.0])


class TestMisclassification:
    """Test cases for readout error estimates."""

    @pytest.mark.slow
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_binary_matches_analytic(self, alpha):
        """Test the q = 2 rate agrees with Phi(-2 |alpha|)."""
        est = estimate_misclassification(ReadoutConfig(q=2, alpha=alpha), trials=500_000, seed=1)
        expected = norm.cdf(-2 * alpha)
        assert est.analytic == pytest.approx(expected)
        se = np.sqrt(expected * (1 - expected) / (2 * est.trials))
        assert abs(est.average - expected) <= 3 * se

    def test_decreases_with_photon_number(self):
        """Test the error rate falls as |alpha|^2 grows."""
        curve = misclassification_curve(2, [0.25, 1.0, 4.0], trials=200_000, seed=0)
        rates = [est.average for est in curve]
        assert rates[0] > rates[1] > rates[2]
        assert [est.photon_number for est in curve] == pytest.approx([0.25, 1.0, 4.0])

    def test_large_amplitude_is_reliable(self):
        """Test |alpha| = 4 essentially never misclassifies at q = 2."""
        est = estimate_misclassification(ReadoutConfig(q=2, alpha=4.0), trials=50_000, seed=2)
        assert est.average < 1e-4
        assert not est.low_photon_advisory

    def test_union_bounds(self):
        """Test the q = 4 rate lies between the neighbour and pairwise bounds."""
        cfg = ReadoutConfig(q=4, alpha=2.0)
        lower, upper = misclassification_bounds(cfg)
        assert lower == pytest.approx(norm.cdf(-2 * 2.0 * np.sin(np.pi / 4)))
        assert upper == pytest.approx(2 * lower)
        est = estimate_misclassification(cfg, trials=100_000, seed=3)
        assert est.analytic is None
        assert lower - 3 * est.standard_error <= est.average <= upper + 3 * est.standard_error

    def test_zero_trials(self):
        """Test at least one sample per symbol is needed."""
        with pytest.raises(DomainError):
            estimate_misclassification(ReadoutConfig(q=2, alpha=1.0), trials=0, seed=0)


class TestReadoutToDecoding:
    """Test cases for feeding readout errors into decoding."""

    def test_noise_model_rate(self):
        """Test the noise model flips with the estimated average rate."""
        est = estimate_misclassification(ReadoutConfig(q=2, alpha=1.0), trials=20_000, seed=0)
        model = readout_noise_model(est, seed=4)
        assert model.kind == "independent"
        assert model.flip_probability == est.average
        assert model.seed == 4

    def test_code_beats_single_readout(self):
        """Test decoding six noisy outcomes beats reading one symbol."""
        raw, success = decoded_success_for_readout(build_c6(), ReadoutConfig(q=2, alpha=1.0), 20_000, seed=0)
        assert 0.0 < raw < 0.05
        assert success > 1 - raw

    def test_success_rises_with_separation(self):
        """Test decoded success on C6 climbs with the pointer separation."""
        results = [
            decoded_success_for_readout(build_c6(), ReadoutConfig(q=2, alpha=alpha), 20_000, seed=0)
            for alpha in (0.5, 1.0, 1.5, 2.0)
        ]
        raws = [raw for raw, _ in results]
        successes = [success for _, success in results]
        assert raws == sorted(raws, reverse=True)
        assert successes == sorted(successes)
        assert successes[-1] >= 1 - 1e-3

    def test_alphabet_mismatch(self):
        """Test a ternary code cannot use binary readout."""
        with pytest.raises(DomainError):
            decoded_success_for_readout(build_repetition(3, 1), ReadoutConfig(q=2, alpha=1.0), 100, seed=0)
