import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ngchannel", deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ngchannel")


def contour_taylor(f, x0, order, radius=0.25, nodes=64):
    """Taylor coefficients of an analytic ``f`` at ``x0`` from a circle of samples.

    Trapezoid rule for the Cauchy integral; spectrally accurate, independent
    of any jet arithmetic.
    """
    theta = 2 * np.pi * np.arange(nodes) / nodes
    vals = np.array([f(x0 + radius * np.exp(1j * t)) for t in theta])
    k = np.arange(order + 1)
    return (np.exp(-1j * np.outer(k, theta)) @ vals) / nodes / radius ** k


def central_difference(f, x0, k, h):
    """k-th derivative by the standard central stencil."""
    from math import comb
    return sum((-1) ** j * comb(k, j) * f(x0 + (k / 2 - j) * h) for j in range(k + 1)) / h ** k


def gh_plane_integral(exponent, weight_x, weight_y, order=60, poly=None):
    """``int d^2z/pi poly(z) exp(exponent(z))`` by tensor Gauss-Hermite.

    ``weight_x`` and ``weight_y`` set the Gaussian scales along the real and
    imaginary axes; the remaining part of the integrand is evaluated at the
    scaled nodes.
    """
    t, w = np.polynomial.hermite.hermgauss(order)
    x = t / np.sqrt(weight_x)
    y = t / np.sqrt(weight_y)
    X, Y = np.meshgrid(x, y, indexing="ij")
    Z = X + 1j * Y
    W = np.outer(w, w) / np.sqrt(weight_x * weight_y)
    g = np.exp(exponent(Z) + weight_x * X ** 2 + weight_y * Y ** 2)
    if poly is not None:
        g = g * poly(Z)
    return np.sum(W * g) / np.pi


_CRITERIA = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def criterion_log(pytestconfig):
    """Mapping criterion number -> (passed, detail) shown in the terminal summary."""
    return pytestconfig.stash.setdefault(_CRITERIA, {})


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(_CRITERIA, {})
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(log):
        ok, detail = log[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
