import numpy as np
import pytest

import copula_forge as cf
from copula_forge.showcase import SHOWCASE

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def record():
    """Append one PASS/FAIL line to the acceptance summary."""

    def _record(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _record


def spec_of(key):
    family, params, d = SHOWCASE[key]
    return cf.make_spec(family, params, d)


def central_diff(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2 * h)


def madogram_pickands(U, lam):
    """Full-data madogram estimate of A at the simplex point (lam, 1 - lam)."""
    est = cf.estimate_madogram(U, None, lam)
    return cf.pickands_from_madogram(est, lam)


def pickands_sup_error(spec, U, lams=np.arange(1, 10) / 10):
    return max(abs(madogram_pickands(U, l) - float(cf.pickands(spec, [l, 1 - l]))) for l in lams)


def ks_crit(n, alpha_coef=1.36):
    return alpha_coef / np.sqrt(n)
