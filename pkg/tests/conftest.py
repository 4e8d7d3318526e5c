import numpy as np
import pytest

from vgallometry import allometry

# Every exponent fitted anywhere in the suite is recorded so that the
# 1 < eta < 2 bound can be checked over all of them at the end of the run.
FITTED_ETAS: list[float] = []
_original_fit_eta = allometry.fit_eta


def _recording_fit_eta(r):
    res = _original_fit_eta(r)
    FITTED_ETAS.append(res.eta)
    return res


allometry.fit_eta = _recording_fit_eta

# (criterion, passed, detail) rows appended by the acceptance tests
ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_sessionfinish(session, exitstatus):
    bad = [eta for eta in FITTED_ETAS if not 1.0 < eta < 2.0]
    if bad:
        print(f"\n{len(bad)} of {len(FITTED_ETAS)} fitted exponents fall outside (1, 2): {bad[:10]}")
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for name, ok, detail in ACCEPTANCE:
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    if FITTED_ETAS:
        arr = np.array(FITTED_ETAS)
        ok = bool(np.all((arr > 1) & (arr < 2)))
        terminalreporter.write_line(
            f"{'PASS' if ok else 'FAIL'}  3b every fitted exponent in (1, 2): "
            f"{arr.size} fits, range [{arr.min():.4f}, {arr.max():.4f}]")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
