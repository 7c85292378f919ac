import numpy as np
import pytest

from ambient_capacity.channel import (
    LINKS,
    ChannelDraw,
    LinkSpec,
    NetworkGeometry,
    carnot_distance,
    cascade_taps,
    composite_legacy_response,
    draw_marginal_response,
    draw_taps,
    freq_response,
    mobility_extrema,
    path_loss_variance,
)
from ambient_capacity.errors import CoincidentNodeError, DomainError


@pytest.mark.unit
class TestGeometry:
    """Distances, path loss and the mobility extrema."""

    def test_carnot_right_angle(self):
        assert carnot_distance(3.0, 4.0, np.pi / 2) == pytest.approx(5.0)

    def test_carnot_example(self):
        assert carnot_distance(0.2, 1.0, np.pi / 18) == pytest.approx(0.803790, abs=1e-6)

    def test_coincident_nodes(self):
        with pytest.raises(CoincidentNodeError):
            carnot_distance(1.0, 1.0, 0.0)

    def test_nonpositive_sides(self):
        with pytest.raises(DomainError):
            carnot_distance(0.0, 1.0, 0.3)

    def test_path_loss(self):
        assert path_loss_variance(0.5, 3.0) == pytest.approx(8.0)
        with pytest.raises(DomainError):
            path_loss_variance(0.0, 3.0)

    def test_mobility_extrema_pi_over_18(self):
        extrema = mobility_extrema(np.pi / 18)
        assert not extrema.in_set_a
        assert extrema.d_min == pytest.approx(0.5252, abs=5e-4)
        assert extrema.d_max == pytest.approx(0.9520, abs=5e-4)

    def test_mobility_extrema_pi_over_3(self):
        extrema = mobility_extrema(np.pi / 3)
        assert extrema.in_set_a
        assert extrema.d_min is None and extrema.d_max is None

    def test_extrema_are_stationary_points_of_the_product(self):
        phi = np.pi / 18
        extrema = mobility_extrema(phi)

        def product(d):
            return d * carnot_distance(d, 1.0, phi)

        for d in (extrema.d_min, extrema.d_max):
            h = 1e-6
            slope = (product(d + h) - product(d - h)) / (2 * h)
            assert abs(slope) < 1e-6

    def test_network_geometry_link_variances(self):
        g = NetworkGeometry(d12=0.2, d13=1.0, d14=1.0, phi=np.pi / 18, theta=np.pi / 3, eta=3.0)
        assert g.link_variance("12") == pytest.approx(125.0)
        assert g.link_variance("21") == g.link_variance("12")
        assert g.link_variance("13") == pytest.approx(1.0)
        assert g.d23 == pytest.approx(0.803790, abs=1e-6)
        assert g.link_variance("11", self_interference=0.5) == 0.5

    def test_network_geometry_rejects_bad_distance(self):
        with pytest.raises(DomainError):
            NetworkGeometry(d12=-0.1)


@pytest.mark.unit
class TestLinks:
    """Tap draws and frequency responses."""

    def test_link_spec_validation(self):
        with pytest.raises(DomainError):
            LinkSpec(order=-1, time_offset=0, variance=1.0)
        with pytest.raises(DomainError):
            LinkSpec(order=1, time_offset=0, variance=0.0)

    def test_tap_variance_and_span(self):
        spec = LinkSpec(order=3, time_offset=1, variance=2.0)
        assert spec.tap_variance == pytest.approx(0.5)
        assert spec.span == 4

    def test_draw_taps_shape_and_power(self, rng):
        spec = LinkSpec(order=3, time_offset=1, variance=2.0)
        taps = draw_taps(spec, rng, size=200_000)
        assert taps.shape == (200_000, 4)
        power = np.mean(np.sum(np.abs(taps) ** 2, axis=1))
        assert power == pytest.approx(2.0, rel=0.01)

    def test_marginal_response_power(self, rng):
        psi = draw_marginal_response(3.0, rng, (100_000, 4))
        assert np.mean(np.abs(psi) ** 2) == pytest.approx(3.0, rel=0.01)

    def test_freq_response_matches_padded_fft(self, rng):
        M, theta = 16, 2
        taps = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        padded = np.zeros(M, dtype=np.complex128)
        padded[theta : theta + 4] = taps
        assert np.allclose(freq_response(taps, theta, M), np.fft.fft(padded), atol=1e-12)

    def test_freq_response_batches(self, rng):
        taps = rng.standard_normal((5, 3)) + 0j
        out = freq_response(taps, 1, 8)
        assert out.shape == (5, 8)
        assert np.allclose(out[2], freq_response(taps[2], 1, 8))

    def test_response_marginal_variance(self, rng):
        """Psi(m) ~ CN(0, sigma^2) for every m."""
        spec = LinkSpec(order=3, time_offset=1, variance=1.5)
        psi = freq_response(draw_taps(spec, rng, size=100_000), spec.time_offset, 8)
        assert np.allclose(np.mean(np.abs(psi) ** 2, axis=0), 1.5, rtol=0.03)

    def test_cascade_is_product_of_responses(self, rng):
        a = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        M = 16
        lhs = freq_response(cascade_taps(a, b), 3, M)
        rhs = freq_response(a, 1, M) * freq_response(b, 2, M)
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_composite_legacy_response(self):
        psi13 = np.ones(4, dtype=np.complex128)
        psi12 = np.full(4, 2.0 + 0j)
        psi23 = np.full(4, 1j)
        out = composite_legacy_response(psi13, psi12, psi23, 0.5, -1.0)
        assert np.allclose(out, 1.0 - 1j)

    def test_composite_response_broadcasts_symbols(self):
        psi = np.ones((3, 4), dtype=np.complex128)
        b = np.array([1.0, -1.0, 1j])
        out = composite_legacy_response(psi, psi, psi, 1.0, b)
        assert np.allclose(out[1], 0.0)
        assert np.allclose(out[2], 1.0 + 1j)


@pytest.mark.unit
class TestChannelDraw:
    """Joint realization of every link."""

    def test_draw_is_reproducible(self):
        links = {name: LinkSpec(3, 1, 1.0) for name in LINKS}
        first = ChannelDraw.draw(links, np.random.default_rng(5))
        second = ChannelDraw.draw(links, np.random.default_rng(5))
        for name in LINKS:
            assert np.array_equal(first[name], second[name])

    def test_response(self):
        links = {"13": LinkSpec(2, 1, 1.0)}
        draw = ChannelDraw.draw(links, np.random.default_rng(1))
        assert np.allclose(draw.response("13", links, 8), freq_response(draw["13"], 1, 8))
