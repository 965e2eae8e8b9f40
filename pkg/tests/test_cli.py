import io
import json
import os

import numpy as np
import pytest

import copula_forge as cf
from copula_forge import cli, core
from copula_forge.extreme import BivariateExtreme


def run(tmp_path, command, config, *extra):
    path = tmp_path / f"{command}.json"
    path.write_text(json.dumps(config))
    out, err = io.StringIO(), io.StringIO()
    code = cli.main([command, "--config", str(path), *extra], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def clayton(tmp_path, **kw):
    cfg = {"family": "clayton", "params": {"theta": -0.5}, "d": 2, "n": 1024, "seed": 42,
           "output": str(tmp_path / "sample.csv")}
    cfg.update(kw)
    return cfg


class TestSample:
    def test_clayton_negative_theta_and_rerun(self, tmp_path):
        code, out, _ = run(tmp_path, "sample", clayton(tmp_path))
        assert code == 0
        first = (tmp_path / "sample.csv").read_bytes()
        header, X = cli.read_csv(tmp_path / "sample.csv")
        assert header == ["x0", "x1"] and X.shape == (1024, 2)
        assert b"\r" not in first
        assert run(tmp_path, "sample", clayton(tmp_path))[0] == 0
        assert (tmp_path / "sample.csv").read_bytes() == first

    def test_trivariate(self, tmp_path):
        code, _, _ = run(tmp_path, "sample", clayton(tmp_path, params={"theta": 2.0}, d=3))
        assert code == 0
        header, X = cli.read_csv(tmp_path / "sample.csv")
        assert header == ["x0", "x1", "x2"] and X.shape == (1024, 3)

    def test_matches_library(self, tmp_path):
        run(tmp_path, "sample", clayton(tmp_path, n=50))
        _, X = cli.read_csv(tmp_path / "sample.csv")
        U = cf.sample(cf.make_spec("clayton", -0.5), 50, cf.RngStream(42)).data
        np.testing.assert_array_equal(X, U)

    def test_seed_and_output_override(self, tmp_path):
        other = tmp_path / "other.csv"
        run(tmp_path, "sample", clayton(tmp_path, n=20), "--seed", "7", "--output", str(other))
        _, X = cli.read_csv(other)
        np.testing.assert_array_equal(X, cf.sample(cf.make_spec("clayton", -0.5), 20, cf.RngStream(7)).data)

    def test_margins_and_plot(self, tmp_path):
        cfg = clayton(tmp_path, n=200, margins=["std_normal", "std_exponential"])
        assert run(tmp_path, "sample", cfg, "--plot")[0] == 0
        _, X = cli.read_csv(tmp_path / "sample.csv")
        assert X[:, 0].min() < 0 and X[:, 1].min() > 0
        svg = (tmp_path / "sample.svg").read_text()
        assert svg.startswith("<svg") and svg.count("<circle") == 200

    def test_unknown_family(self, tmp_path):
        code, _, err = run(tmp_path, "sample", clayton(tmp_path, family="nope"))
        assert code == 2
        assert "available families" in err and "clayton" in err and "husler_reiss" in err

    def test_constraint_named(self, tmp_path):
        code, _, err = run(tmp_path, "sample", clayton(tmp_path, params={"theta": 0.0}))
        assert code == 2 and "theta in [-1, inf) \\ {0}" in err

    def test_bad_fields(self, tmp_path):
        for bad in ({"n": -1}, {"n": "many"}, {"margins": ["std_normal"]}, {"seed": 1.5}):
            code, _, err = run(tmp_path, "sample", clayton(tmp_path, **bad))
            assert code == 2 and "config field" in err

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        err = io.StringIO()
        assert cli.main(["sample", "--config", str(path)], out=io.StringIO(), err=err) == 2
        assert "--config" in err.getvalue()

    def test_sampler_failure_exit_3(self, tmp_path, monkeypatch):
        def boom(*a, **k):
            raise cf.SamplerFailure("no bracket")

        monkeypatch.setattr(cli.api, "sample", boom)
        code, _, err = run(tmp_path, "sample", clayton(tmp_path))
        assert code == 3 and "no bracket" in err
        assert not (tmp_path / "sample.csv").exists()


class TestFiles:
    def test_csv_round_trip(self, tmp_path):
        M = cf.RngStream(3).normal((40, 3)) * 10.0 ** cf.RngStream(4).uniform((40, 3)) * 30
        M[0, 0] = 5e-324
        path = tmp_path / "m.csv"
        cli.write_atomic(path, cli.format_csv(["a", "b", "c"], M))
        header, back = cli.read_csv(path)
        assert header == ["a", "b", "c"]
        np.testing.assert_array_equal(back, M)

    def test_atomic_write_leaves_no_partial_file(self, tmp_path, monkeypatch):
        target = tmp_path / "out.csv"
        target.write_text("old\n")

        def fail(src, dst):
            raise OSError("disk full")

        monkeypatch.setattr(cli.os, "replace", fail)
        with pytest.raises(OSError):
            cli.write_atomic(target, "new\n")
        assert target.read_text() == "old\n"
        assert os.listdir(tmp_path) == ["out.csv"]


class TestMadogram:
    def test_table(self, tmp_path):
        cfg = {"family": "logistic", "params": {"theta": 0.5}, "n": 5000, "seed": 1,
               "lambda": [0.25, 0.5, 0.75], "output": str(tmp_path / "mado.csv")}
        code, out, _ = run(tmp_path, "madogram", cfg)
        assert code == 0
        header, T = cli.read_csv(tmp_path / "mado.csv")
        assert header == ["lambda", "estimate", "A_hat", "nu_true", "A_true"]
        assert T.shape == (3, 5)
        np.testing.assert_allclose(T[:, 2], T[:, 4], atol=0.05)

    def test_missing_requires_copula(self, tmp_path):
        cfg = {"family": "logistic", "params": {"theta": 0.5}, "p0": 0.9, "output": str(tmp_path / "m.csv")}
        code, _, err = run(tmp_path, "madogram", cfg)
        assert code == 2 and "miss" in err


class TestMonteCarlo:
    def config(self, tmp_path, **kw):
        cfg = {"family": "asym_neg_logistic", "params": {"theta": 10.0, "psi1": 0.1, "psi2": 1.0},
               "miss": {"family": "joe", "params": {"theta": 2.0}}, "p0": 0.9, "p1": 0.9,
               "lambda": 0.5, "n": 1024, "n_iter": 1, "seed": 42, "corrected": True,
               "margins": ["std_normal", "std_exponential"], "output": str(tmp_path / "mc.csv")}
        cfg.update(kw)
        return cfg

    def test_single_iteration(self, tmp_path):
        code, out, _ = run(tmp_path, "montecarlo", self.config(tmp_path))
        assert code == 0 and "var(scaled)" in out
        header, T = cli.read_csv(tmp_path / "mc.csv")
        assert header == ["FMado", "n", "scaled"] and T.shape == (1, 3)
        summary = json.loads((tmp_path / "mc.json").read_text())
        assert T[0, 2] == pytest.approx(np.sqrt(1024) * (T[0, 0] - summary["nu_true"]), abs=1e-12)
        assert summary["p"] == pytest.approx(0.85893, abs=1e-5)

    def test_diagnostics_and_plot(self, tmp_path):
        code, _, _ = run(tmp_path, "montecarlo", self.config(tmp_path, n=128, n_iter=100), "--plot")
        assert code == 0
        summary = json.loads((tmp_path / "mc.json").read_text())
        d = summary["diagnostics"]
        assert d["n"] == 100 and len(d["histogram"]["counts"]) == 10
        assert (tmp_path / "mc.svg").read_text().count("<rect") >= 10

    def test_bad_probability(self, tmp_path):
        code, _, err = run(tmp_path, "montecarlo", self.config(tmp_path, p0=1.5))
        assert code == 2 and "p0" in err


class _Wavy(BivariateExtreme):
    """Within the Pickands bounds but not convex."""

    name = "wavy_test_only"
    param_names = ()

    def check(self, raw, d):
        return {}

    def A1(self, t, p):
        return 1.0 - 0.25 * np.sin(2 * np.pi * t) ** 2

    def dA1(self, t, p):
        return -0.25 * np.pi * np.sin(4 * np.pi * t)


class TestValidate:
    def test_logistic_passes(self, tmp_path):
        code, out, _ = run(tmp_path, "validate", {"family": "logistic", "params": {"theta": 0.5}})
        assert code == 0
        assert "PASS  Pickands convexity" in out and "FAIL" not in out

    def test_husler_reiss_derivative(self, tmp_path):
        code, out, _ = run(tmp_path, "validate", {"family": "husler_reiss", "params": {"theta": 1.0}})
        assert code == 0
        line = next(l for l in out.splitlines() if "Pickands derivative" in l)
        worst = float(line.split("worst=")[1].split()[0])
        assert worst <= 1e-6

    def test_corrupted_pickands_fails(self, tmp_path, monkeypatch):
        core._load_catalog()
        monkeypatch.setitem(core._REGISTRY, _Wavy.name, _Wavy())
        code, out, _ = run(tmp_path, "validate", {"family": _Wavy.name, "params": {}})
        assert code == 1
        assert "FAIL  Pickands convexity" in out
        assert "convexity" in out.splitlines()[-1]

    @pytest.mark.parametrize("family,params,d", [("clayton", {"theta": 5.0}, 3), ("gaussian", {"rho": 0.71}, 2),
                                                 ("dirichlet", {"theta": [0.5, 0.5],
                                                                "sigma": [[1.0, 1.0], [1.0, 1.0]]}, 2)])
    def test_other_kinds(self, tmp_path, family, params, d):
        assert run(tmp_path, "validate", {"family": family, "params": params, "d": d})[0] == 0
