import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import copula_forge as cf
from copula_forge import madogram as mg

from conftest import spec_of

LAMS = np.arange(1, 10) / 10
JOE_P = 1 - np.sqrt(0.01 + 0.01 - 0.0001)


def showcase_config(**kw):
    base = dict(target=cf.make_spec("asym_neg_logistic", {"theta": 10.0, "psi1": 0.1, "psi2": 1.0}),
                miss=cf.make_spec("joe", 2.0), p0=0.9, p1=0.9, w=0.5, n_sample=256, n_iter=8,
                corrected=True, seed=42, margins=["std_normal", "std_exponential"])
    base.update(kw)
    return cf.MonteCarloConfig(**base)


class TestAnalytic:
    def test_c_lambda_half(self):
        assert mg.c_lambda(0.5) == pytest.approx(1 / 3)

    def test_true_madogram_examples(self):
        assert cf.true_madogram(cf.make_spec("logistic", 1.0), 0.5) == pytest.approx(1 / 6, abs=1e-14)
        assert cf.true_madogram(spec_of("logistic"), 0.5) == pytest.approx(0.08088, abs=1e-5)

    def test_inverse_examples(self):
        assert cf.pickands_from_madogram(1 / 6, 0.5) == pytest.approx(1.0, abs=1e-14)
        assert cf.pickands_from_madogram(0.0, 0.5) == pytest.approx(0.5, abs=1e-14)
        nu = cf.true_madogram(spec_of("logistic"), 0.5)
        assert cf.pickands_from_madogram(nu, 0.5) == pytest.approx(np.sqrt(0.5), abs=1e-12)

    def test_degenerate_denominator(self):
        with pytest.raises(cf.DegenerateDenominator):
            cf.pickands_from_madogram(2 / 3, 0.5)

    def test_lambda_domain(self):
        with pytest.raises(cf.DomainError):
            cf.true_madogram(spec_of("logistic"), 1.0)

    @pytest.mark.parametrize("key", ["logistic", "galambos", "asym_logistic", "asym_neg_logistic",
                                     "asym_mixed", "husler_reiss", "t_ev", "bilogistic"])
    def test_round_trip(self, key):
        s = spec_of(key)
        for lam in LAMS:
            back = cf.pickands_from_madogram(cf.true_madogram(s, lam), lam)
            assert back == pytest.approx(float(cf.pickands(s, [lam, 1 - lam])), abs=1e-10)

    def test_independence_monte_carlo(self):
        # 1/2 E|U^2 - V^2| for independent uniforms
        U = cf.RngStream(60).uniform((1_000_000, 2))
        assert 0.5 * np.mean(np.abs(U[:, 0] ** 2 - U[:, 1] ** 2)) == pytest.approx(1 / 6, abs=1e-3)

    def test_logistic_monte_carlo(self):
        U = cf.sample(spec_of("logistic"), 1_000_000, cf.RngStream(61)).data
        assert 0.5 * np.mean(np.abs(U[:, 0] ** 2 - U[:, 1] ** 2)) == pytest.approx(0.08088, abs=0.005)


class TestEstimator:
    def test_comonotone(self):
        u = cf.RngStream(62).uniform(10_000)
        assert cf.estimate_madogram(np.column_stack([u, u]), None, 0.5) <= 0.01

    def test_independence(self):
        U = cf.RngStream(63).uniform((10_000, 2))
        assert cf.estimate_madogram(U, None, 0.5) == pytest.approx(1 / 6, abs=0.01)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_rank_invariance(self, seed):
        U = cf.RngStream(seed).uniform((200, 2))
        X = np.column_stack([np.log(U[:, 0]), U[:, 1] ** 3])
        assert cf.estimate_madogram(X, None, 0.3) == pytest.approx(cf.estimate_madogram(U, None, 0.3), abs=1e-15)

    def test_corrected_within_bounds(self):
        U = cf.RngStream(64).uniform((50, 2))
        for lam in LAMS:
            est = cf.estimate_madogram(U, None, lam, corrected=True)
            lo, hi = mg._madogram_bounds(lam)
            assert lo - 1e-15 <= est <= hi + 1e-15

    def test_insufficient(self):
        mask = mg.MissingMask(np.array([[1, 0], [0, 1], [1, 1]], dtype=np.int8), 0.5, 0.5, 0.25)
        with pytest.raises(cf.InsufficientData):
            cf.estimate_madogram(np.full((3, 2), 0.5), mask, 0.5)

    def test_full_data_convergence(self):
        s = spec_of("logistic")
        truth = np.array([cf.true_madogram(s, lam) for lam in LAMS])
        good = 0
        for r in range(100):
            U = cf.sample(s, 10_000, cf.RngStream(65).child(r)).data
            est = np.array([cf.estimate_madogram(U, None, lam) for lam in LAMS])
            good += np.max(np.abs(est - truth)) <= 0.02
        assert good >= 95

    def test_mcar_consistency(self):
        s, joe = spec_of("logistic"), cf.make_spec("joe", 2.0)
        diffs = []
        for r in range(20):
            rng = cf.RngStream(66).child(r)
            U = cf.sample(s, 10_000, rng).data
            mask = cf.gen_missing_mask(rng, joe, 0.9, 0.9, 10_000)
            diffs.append(abs(cf.estimate_madogram(U, mask, 0.5) - cf.estimate_madogram(U, None, 0.5)))
        assert np.mean(diffs) <= 0.01

    def test_showcase_estimate(self):
        s = cf.make_spec("asym_neg_logistic", {"theta": 10.0, "psi1": 0.1, "psi2": 1.0})
        truth = cf.true_madogram(s, 0.5)
        ests = []
        for r in range(50):
            rng = cf.RngStream(67).child(r)
            U = cf.sample(s, 1024, rng).data
            mask = cf.gen_missing_mask(rng, cf.make_spec("joe", 2.0), 0.9, 0.9, 1024)
            ests.append(cf.estimate_madogram(U, mask, 0.5, corrected=True))
        ests = np.array(ests)
        assert abs(ests.mean() - truth) <= 5 * ests.std(ddof=1) / np.sqrt(ests.size)


class TestMask:
    def test_all_observed(self):
        m = cf.gen_missing_mask(cf.RngStream(0), cf.make_spec("joe", 2.0), 1.0, 1.0, 10)
        assert m.I.min() == 1 and m.p == 1.0

    def test_joe_rates(self):
        n = 100_000
        m = cf.gen_missing_mask(cf.RngStream(68), cf.make_spec("joe", 2.0), 0.9, 0.9, n)
        assert m.p == pytest.approx(JOE_P, abs=1e-12)
        assert m.p == pytest.approx(0.85893, abs=1e-5)
        assert m.complete.mean() == pytest.approx(JOE_P, abs=0.01)
        for j in range(2):
            assert abs(m.I[:, j].mean() - 0.9) <= 3 * np.sqrt(0.09 / n)

    def test_independence_rate(self):
        m = cf.gen_missing_mask(cf.RngStream(69), cf.make_spec("independence"), 0.5, 0.5, 100_000)
        assert m.p == pytest.approx(0.25)
        assert m.complete.mean() == pytest.approx(0.25, abs=0.01)

    def test_bad_probability(self):
        with pytest.raises(cf.DomainError):
            cf.gen_missing_mask(cf.RngStream(0), cf.make_spec("joe", 2.0), 0.0, 0.9, 10)


class TestMonteCarlo:
    def test_deterministic(self):
        a = cf.monte_carlo_run(showcase_config(n_iter=1))
        b = cf.monte_carlo_run(showcase_config(n_iter=1))
        assert a.to_csv() == b.to_csv()
        f, n, scaled = a.records[0]
        assert scaled == pytest.approx(np.sqrt(n) * (f - a.nu_true), abs=1e-12)

    def test_workers_preserve_order(self):
        a = cf.monte_carlo_run(showcase_config())
        b = cf.monte_carlo_run(showcase_config(), workers=4)
        assert a.to_csv() == b.to_csv()

    def test_csv_header(self):
        res = cf.monte_carlo_run(showcase_config(n_iter=3))
        lines = res.to_csv().splitlines()
        assert lines[0] == "FMado,n,scaled" and len(lines) == 4
        assert res.p == pytest.approx(JOE_P)

    def test_full_data_config(self):
        cfg = cf.MonteCarloConfig(target=spec_of("logistic"), n_sample=500, n_iter=4, seed=1)
        res = cf.monte_carlo_run(cfg)
        assert res.records.shape == (4, 3) and res.p == 1.0

    def test_config_validation(self):
        with pytest.raises(cf.DomainError):
            cf.MonteCarloConfig(target=spec_of("logistic"), p0=0.5)
        with pytest.raises(cf.DomainError):
            showcase_config(w=1.5)


class TestDiagnostics:
    def test_gaussian(self):
        d = cf.normality_diagnostics(cf.RngStream(70).normal(10_000))
        assert abs(d["skewness"]) <= 0.1 and abs(d["excess_kurtosis"]) <= 0.2
        assert len(d["histogram"]["counts"]) == 100
        assert sum(d["histogram"]["counts"]) == 10_000

    def test_constant(self):
        d = cf.normality_diagnostics(np.full(200, 0.3))
        assert d["variance"] == 0.0 and d["degenerate"]

    def test_too_few(self):
        with pytest.raises(cf.InsufficientData):
            cf.normality_diagnostics(np.zeros(99))
