import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

import copula_forge as cf
from copula_forge import archimedean as arch
from copula_forge.checks import generator_checks

from conftest import spec_of

N = 100_000


def tau_quadrature(spec):
    """Kendall's tau as 1 + 4 * int_0^1 phi / phi' dt."""
    g = arch.generator(spec)
    val, _ = integrate.quad(lambda t: g.phi(t) / g.phi_prime(t), 0.0, 1.0, limit=200)
    return 1.0 + 4.0 * val


class TestGenerators:
    def test_clayton_values(self):
        s = cf.make_spec("clayton", 1.0)
        assert arch.phi(s, 1.0) == 0.0
        assert arch.phi(s, 0.5) == pytest.approx(1.0)

    def test_joe_value(self):
        assert arch.phi(cf.make_spec("joe", 2.0), 0.5) == pytest.approx(-np.log(0.75), abs=1e-12)

    def test_frank_round_trip(self):
        s = cf.make_spec("frank", -8.0)
        assert arch.phi_inv(s, arch.phi(s, 0.3)) == pytest.approx(0.3, abs=1e-10)

    def test_domain(self):
        s = cf.make_spec("clayton", 1.0)
        with pytest.raises(cf.DomainError):
            arch.phi(s, 0.0)
        with pytest.raises(cf.DomainError):
            arch.phi_inv(s, -1.0)
        with pytest.raises(cf.DomainError):
            arch.phi_prime(s, 1.0)

    @pytest.mark.parametrize("key", ["clayton", "amh", "frank", "joe", "nelsen9", "nelsen10", "nelsen11",
                                     "nelsen12", "nelsen13", "nelsen14", "nelsen15", "nelsen22",
                                     "clayton_mv", "amh_mv", "frank_mv", "joe_mv"])
    def test_invariant_suite(self, key):
        failed = [r.line() for r in generator_checks(spec_of(key)) if not r.passed]
        assert not failed, failed

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.1, 20.0), st.floats(0.02, 0.98))
    def test_clayton_round_trip_property(self, theta, t):
        s = cf.make_spec("clayton", theta)
        assert arch.phi_inv(s, arch.phi(s, t)) == pytest.approx(t, abs=1e-10)


class TestCdf:
    def test_clayton_examples(self):
        assert arch.arch_cdf(cf.make_spec("clayton", 1.0), [0.5, 0.5]) == pytest.approx(1 / 3)
        c = arch.arch_cdf(cf.make_spec("clayton", 5.0, 3), [0.5, 0.5, 0.5])
        assert c == pytest.approx((3 * 2**5 - 2) ** (-1 / 5), abs=1e-12)

    @pytest.mark.parametrize("key", ["clayton", "frank", "joe", "nelsen14"])
    def test_margins_and_groundedness(self, key):
        s = spec_of(key)
        assert arch.arch_cdf(s, [1.0, 1.0]) == pytest.approx(1.0)
        assert arch.arch_cdf(s, [1e-12, 0.7]) == pytest.approx(0.0, abs=1e-9)

    def test_cond_cdf_example(self):
        s = cf.make_spec("clayton", 1.0)
        assert arch.arch_cond_cdf(s, 0.5, 0.5) == pytest.approx(4 / 9)
        assert arch.arch_cond_cdf(s, 0.3, 1 - 1e-12) == pytest.approx(1.0, abs=1e-9)

    def test_brent_inverts_conditional(self):
        s = cf.make_spec("clayton", 1.0)
        u1 = cf.brent_root(lambda x: arch.arch_cond_cdf(s, 0.5, x) - 4 / 9, 1e-9, 1 - 1e-9, tol=1e-12)
        assert u1 == pytest.approx(0.5, abs=1e-10)

    @pytest.mark.parametrize("key", ["clayton", "amh", "frank", "joe", "nelsen12", "nelsen22"])
    def test_cond_cdf_is_partial_derivative(self, key):
        s = spec_of(key)
        g = np.linspace(0.1, 0.9, 9)
        U0, U1 = np.meshgrid(g, g)
        u0, u1 = U0.ravel(), U1.ravel()
        h = 1e-6
        fd = (arch.arch_cdf(s, np.column_stack([u0 + h, u1]))
              - arch.arch_cdf(s, np.column_stack([u0 - h, u1]))) / (2 * h)
        np.testing.assert_allclose(arch.arch_cond_cdf(s, u0, u1), fd, atol=1e-5)


class TestSamplers:
    def test_empty(self):
        s = cf.make_spec("clayton", 2.0)
        assert cf.sample(s, 0, cf.RngStream(0)).data.shape == (0, 2)
        assert arch.sample_cond_bivariate(s, 0, cf.RngStream(0)).data.shape == (0, 2)

    def test_clayton_tau(self):
        s = cf.make_spec("clayton", 2.0)
        for method in ("frailty", "conditional"):
            U = cf.sample(s, N, cf.RngStream(1), method).data
            assert cf.empirical_kendall_tau(U) == pytest.approx(0.5, abs=0.02)

    def test_frank_negative_tau(self):
        s = cf.make_spec("frank", -8.0)
        target = tau_quadrature(s)
        assert target == pytest.approx(-0.602, abs=1e-3)
        U = cf.sample(s, N, cf.RngStream(2)).data
        assert cf.empirical_kendall_tau(U) == pytest.approx(target, abs=0.02)

    def test_joe_tau(self):
        s = cf.make_spec("joe", 2.0)
        target = tau_quadrature(s)
        # series form: 1 - 4 sum_k 1 / (4 k^2 (k + 1)) = 2 - pi^2 / 6
        assert target == pytest.approx(2 - np.pi**2 / 6, abs=1e-8)
        U = cf.sample(s, N, cf.RngStream(3)).data
        assert cf.empirical_kendall_tau(U) == pytest.approx(target, abs=0.02)

    @pytest.mark.parametrize("key", ["nelsen10", "nelsen13", "nelsen15", "amh"])
    def test_conditional_tau_matches_quadrature(self, key):
        s = spec_of(key)
        U = arch.sample_cond_bivariate(s, 50_000, cf.RngStream(4)).data
        assert cf.empirical_kendall_tau(U) == pytest.approx(tau_quadrature(s), abs=0.02)

    @pytest.mark.parametrize("key", ["clayton_mv", "amh_mv", "frank_mv", "joe_mv"])
    def test_multivariate_pairwise_tau(self, key):
        s = spec_of(key)
        biv = cf.make_spec(s.family, s.params, 2)
        target = tau_quadrature(biv)
        U = cf.sample(s, 50_000, cf.RngStream(5)).data
        for i, j in ((0, 1), (0, 2), (1, 2)):
            assert cf.empirical_kendall_tau(U[:, [i, j]]) == pytest.approx(target, abs=0.02)

    @pytest.mark.parametrize("key", ["clayton", "frank_mv", "joe", "amh_mv"])
    def test_frailty_laplace_transform(self, key):
        # E exp(-s V) = phi_inv(s)
        s = spec_of(key)
        g = arch.generator(s)
        V = g.frailty(cf.RngStream(6), N)
        for x in (0.2, 1.0, 3.0):
            ex = np.exp(-x * V)
            assert ex.mean() == pytest.approx(float(g.phi_inv(x)), abs=5 * ex.std() / np.sqrt(N) + 1e-4)

    def test_margins_uniform(self):
        U = cf.sample(spec_of("nelsen12"), 20_000, cf.RngStream(7)).data
        for j in range(2):
            assert cf.core.ks_uniform(U[:, j]) < 1.95 / np.sqrt(20_000)

    def test_no_frailty(self):
        with pytest.raises(cf.FrailtyUnavailable):
            cf.sample(cf.make_spec("frank", -2.0), 10, cf.RngStream(0), "frailty")

    def test_deterministic(self):
        s = cf.make_spec("joe", 2.0)
        a = cf.sample(s, 500, cf.RngStream(9)).data
        b = cf.sample(s, 500, cf.RngStream(9)).data
        np.testing.assert_array_equal(a, b)


class TestConstraints:
    @pytest.mark.parametrize("family,theta,d", [
        ("clayton", 0.0, 2), ("clayton", -1.5, 2), ("clayton", -0.5, 3),
        ("amh", 1.0, 2), ("amh", -0.5, 3), ("frank", 0.0, 2), ("frank", -1.0, 3),
        ("joe", 0.9, 2), ("nelsen9", 1.5, 2), ("nelsen10", 0.0, 2), ("nelsen11", 0.6, 2),
        ("nelsen12", 0.5, 2), ("nelsen13", 0.0, 2), ("nelsen14", 1.0, 2), ("nelsen15", 0.5, 2),
        ("nelsen22", 0.0, 2),
    ])
    def test_rejected(self, family, theta, d):
        with pytest.raises((cf.ConstraintViolation, cf.DimensionUnsupported)):
            cf.make_spec(family, theta, d)

    def test_showcase_accepted(self):
        cf.make_spec("clayton", -0.5, 2)
        cf.make_spec("asym_mixed", {"theta": 4 / 3, "psi1": -1 / 3})
