import numpy as np
import pytest


def random_density_matrix(rng, dim, rank=None):
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + g.conj().T)


def ket(*amps):
    v = np.asarray(amps, dtype=complex)
    return v / np.linalg.norm(v)


def proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# --- acceptance reporting ------------------------------------------------

_acceptance = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or (report.when != "call" and report.passed):
        return
    number = marker.args[0]
    detail = dict(item.user_properties).get("detail", "")
    if report.failed or number not in _acceptance:
        _acceptance[number] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        status, detail = _acceptance[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {detail}".rstrip())
