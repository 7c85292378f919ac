import numpy as np
import pytest

from ambient_capacity.bs_separated import (
    J_MAX,
    LambdaSpectrum,
    SeparatedRealization,
    bpsk_cutoff_rate,
    bpsk_lambda_parts,
    bpsk_lower_closed_form,
    bpsk_lower_from_j,
    bpsk_product_factor,
    c4_lower,
    c4_upper,
    c4_upper_large_m,
    cutoff_rate_realization_sep,
    draw_separated_realization,
    j_function,
    j_maximizer,
    j_ratio_mc,
    lambda_spectrum,
)
from ambient_capacity.channel import carnot_distance
from ambient_capacity.errors import ConsistencyError, DomainError
from ambient_capacity.scenario import make_scenario

ALPHA = 0.1


def d_ratio(d12, d14, theta, eta, alpha):
    return (d12 * carnot_distance(d12, d14, theta) / d14) ** eta / alpha**2


@pytest.mark.unit
class TestLambdaSpectrum:
    def test_shape_and_positivity(self, default_scenario, rng):
        realization = draw_separated_realization(default_scenario, rng)
        c = default_scenario.constellation
        lam = lambda_spectrum(
            realization, c, 1.0, default_scenario.sigma_v4_sq, default_scenario.alpha
        )
        assert lam.values.shape == (4, 32)
        assert (lam.Q, lam.M) == (4, 32)
        assert np.all(lam.values >= default_scenario.sigma_v4_sq)

    def test_stacked_realizations(self, default_scenario, rng):
        single = [draw_separated_realization(default_scenario, rng) for _ in range(3)]
        stacked = SeparatedRealization(
            psi12=np.stack([r.psi12 for r in single]),
            psi24=np.stack([r.psi24 for r in single]),
            psi14=np.stack([r.psi14 for r in single]),
            s=np.stack([r.s for r in single]),
            snr_b4=1.0,
        )
        c = default_scenario.constellation
        lam = lambda_spectrum(stacked, c, 1.0, 1e-2, ALPHA)
        assert lam.values.shape == (3, 4, 32)
        assert np.allclose(stacked.theta124, [r.theta124 for r in single])

    def test_rejects_nonpositive_variances(self):
        with pytest.raises(ConsistencyError):
            LambdaSpectrum(np.array([[1.0, 0.0], [1.0, 2.0]]))
        with pytest.raises(ConsistencyError):
            LambdaSpectrum(np.array([[1.0, np.nan], [1.0, 2.0]]))

    def test_rejects_mismatched_vectors(self):
        with pytest.raises(DomainError):
            SeparatedRealization(np.ones(4), np.ones(4), np.ones(3), np.ones(4), 1.0)


@pytest.mark.unit
class TestCutoffRate:
    def test_two_symbol_reference(self):
        assert cutoff_rate_realization_sep(np.array([[4.0], [1.0]])) == pytest.approx(
            0.15200, abs=1e-5
        )

    def test_identical_variances_carry_nothing(self):
        lam = np.full((4, 16), 2.5)
        assert cutoff_rate_realization_sep(lam) == pytest.approx(0.0, abs=1e-12)

    def test_far_apart_variances_saturate(self):
        lam = np.array([[1e-9] * 8, [1.0] * 8])
        assert cutoff_rate_realization_sep(lam) == pytest.approx(1.0, abs=1e-6)

    def test_symbol_count_must_match(self):
        with pytest.raises(DomainError):
            cutoff_rate_realization_sep(np.ones((2, 4)), Q=4)

    def test_bpsk_identity(self, rng):
        scenario = make_scenario(constellation="BPSK")
        c = scenario.constellation
        for _ in range(50):
            realization = draw_separated_realization(scenario, rng)
            lam = lambda_spectrum(realization, c, 1.0, scenario.sigma_v4_sq, scenario.alpha)
            common, cross = bpsk_lambda_parts(
                realization, 1.0, scenario.sigma_v4_sq, scenario.alpha
            )
            assert np.allclose(lam.values[0], common + cross, rtol=1e-12)
            assert np.allclose(lam.values[1], common - cross, rtol=1e-12)
            assert cutoff_rate_realization_sep(lam) == pytest.approx(
                bpsk_cutoff_rate(common, cross), abs=1e-12
            )

    def test_product_factor(self):
        assert bpsk_product_factor([2.0, 2.0], [0.0, 0.0]) == pytest.approx(1.0)
        assert bpsk_product_factor([1.0], [0.6]) == pytest.approx(0.8)
        assert bpsk_product_factor([1.0, 1.0], [1.0, 0.0]) == 0.0
        with pytest.raises(ConsistencyError):
            bpsk_product_factor([1.0], [2.0])
        with pytest.raises(ConsistencyError):
            bpsk_product_factor([0.0], [0.0])


@pytest.mark.unit
class TestJFunction:
    """Zero-noise BPSK cross-to-common ratio and its maximizer."""

    @pytest.mark.parametrize("theta", [np.pi / 18, np.pi / 3])
    def test_maximizer(self, theta):
        d12 = j_maximizer(1.0, theta, 3.0, ALPHA)
        assert d_ratio(d12, 1.0, theta, 3.0, ALPHA) == pytest.approx(np.sqrt(2.0), abs=1e-6)
        assert j_function(d12, 1.0, theta, 3.0, ALPHA) == pytest.approx(J_MAX, abs=1e-10)

    def test_peak_value(self):
        assert J_MAX == pytest.approx(0.261204, abs=1e-6)

    def test_bounded_by_peak(self):
        for d12 in np.linspace(0.05, 2.0, 40):
            assert 0.0 < j_function(d12, 1.0, np.pi / 3, 3.0, ALPHA) <= J_MAX + 1e-15

    def test_sleep_mode(self):
        assert j_function(0.2, 1.0, np.pi / 3, 3.0, 0.0) == 0.0

    def test_rejects_bad_geometry(self):
        with pytest.raises(DomainError):
            j_function(0.0, 1.0, np.pi / 3, 3.0, ALPHA)
        with pytest.raises(DomainError):
            j_function(0.2, 1.0, np.pi / 3, -1.0, ALPHA)

    @pytest.mark.slow
    @pytest.mark.parametrize("d12", [0.1, 0.2, 0.4, 0.8, 1.2])
    def test_monte_carlo_ratio(self, d12):
        scenario = make_scenario(d12=d12, theta=np.pi / 3)
        estimate = j_ratio_mc(scenario, 100_000, 5, batch_size=20_000)
        expected = j_function(d12, 1.0, np.pi / 3, 3.0, scenario.alpha)
        assert abs(estimate.mean - expected) <= 3.0 * estimate.std_error


@pytest.mark.unit
class TestClosedFormBound:
    def test_value_at_peak(self):
        assert bpsk_lower_from_j(J_MAX, 32) == pytest.approx(0.030896, abs=1e-6)

    def test_zero_ratio_gives_zero(self):
        assert bpsk_lower_from_j(0.0, 32) == pytest.approx(0.0, abs=1e-15)

    def test_scenario_value(self):
        scenario = make_scenario(constellation="BPSK")
        g = scenario.geometry
        j = j_function(g.d12, g.d14, g.theta, g.eta, scenario.alpha)
        assert bpsk_lower_closed_form(scenario) == pytest.approx(bpsk_lower_from_j(j, 32))

    def test_requires_bpsk(self, default_scenario):
        with pytest.raises(DomainError):
            bpsk_lower_closed_form(default_scenario)


@pytest.mark.integration
class TestMonteCarloBounds:
    def test_lower_below_upper(self):
        for snr_b4_db in (-30.0, 0.0):
            scenario = make_scenario(snr_b4_db=snr_b4_db)
            lower = c4_lower(scenario, 5000, 3)
            upper = c4_upper(scenario, 5000, 3)
            assert lower.mean <= upper.mean + 3.0 * lower.combined_se(upper)

    def test_sleep_mode_carries_nothing(self):
        scenario = make_scenario(alpha_sq_db=None)
        assert c4_lower(scenario, 500, 0).mean == pytest.approx(0.0, abs=1e-12)
        assert c4_upper(scenario, 500, 0).mean == 0.0
        assert c4_upper_large_m(scenario) == 0.0

    def test_saturation_in_low_noise(self):
        quiet = c4_lower(make_scenario(noise4_db=-40.0), 5000, 8)
        quieter = c4_lower(make_scenario(noise4_db=-60.0), 5000, 8)
        assert abs(quiet.mean - quieter.mean) < 3.0 * quiet.combined_se(quieter) + 1e-12

    def test_lower_bound_grows_with_snr(self):
        values = [
            c4_lower(make_scenario(snr_b4_db=snr), 2000, 2).mean for snr in (-30, -10, 10)
        ]
        assert values[0] < values[1] < values[2]

    def test_upper_bound_decreases_with_distance(self):
        values = [
            c4_upper(make_scenario(d12=d12, theta=np.pi / 3), 3000, 6).mean
            for d12 in (0.1, 0.3, 0.6, 1.0)
        ]
        assert np.all(np.diff(values) < 0.0)

    def test_upper_bound_approaches_large_m_limit(self):
        scenario = make_scenario(M=512)
        estimate = c4_upper(scenario, 2000, 0, batch_size=500)
        assert estimate.mean == pytest.approx(c4_upper_large_m(scenario), rel=0.05)

    def test_tap_level_sampling(self):
        scenario = make_scenario(sampling="taps")
        lower = c4_lower(scenario, 2000, 1)
        upper = c4_upper(scenario, 2000, 1)
        assert 0.0 < lower.mean <= upper.mean

    @pytest.mark.parametrize("noise4_db", [-20.0, -10.0])
    def test_psk_beats_ask(self, noise4_db):
        # interference-dominated point: direct 1->4 path stronger than the cascade
        common = {"d12": 0.5, "theta": np.pi / 3, "noise4_db": noise4_db}
        qpsk = c4_lower(make_scenario(constellation="QPSK", **common), 5000, 12)
        ask4 = c4_lower(make_scenario(constellation="ASK4", **common), 5000, 12)
        assert qpsk.mean >= ask4.mean - 3.0 * qpsk.combined_se(ask4)
