"""Closed-form building blocks shared by the phase-space and photon-statistics
readouts.

Thermal families
    Every photon-added thermal operator, before or after the channel, is a
    finite combination of normal-ordered kernels
    ``T(j, mu) = :a^dag^j exp(-mu a^dag a) a^j:``.  The channel maps one
    kernel to a finite combination of kernels with smaller ``j``, so a state
    is represented by a list of weighted kernels and each readout is a sum of
    per-kernel closed forms.

Squeezed families
    Photon addition is a derivative with respect to the normal-ordering
    coefficient ``X`` of the squeezed kernel
    ``K(X, C) = :exp(-X a^dag a + (C/2)(a^dag^2 + a^2)):``; photon
    subtraction is a derivative of a generating parameter ``u``.  Both are
    evaluated with jets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import (
    DivergentIntegralError,
    SeriesConvergenceError,
)
from .numkernel import (
    Jet1,
    Jet2,
    gaussian_moment_integral,
    jet2_inv_sqrt,
    jet_compose,
    jet_derivative_shift,
    jet_inv_sqrt,
    jet_pow,
    quadratic_integral_converges,
)
from .states import (
    SqueezeCoeffs,
    Stage,
    StateSpec,
    Variant,
    thermal_coeffs,
)

SERIES_CAP = 4000
_REL_STOP = 1e-14
_ABS_TAIL = 1e-12


# ---------------------------------------------------------------------------
# Thermal kernels


@dataclass(frozen=True)
class ThermalTerm:
    """``weight * :a^dag^j exp(-mu a^dag a) a^j:``."""

    weight: float
    j: int
    mu: float


def channel_terms(term: ThermalTerm, s: float) -> list[ThermalTerm]:
    """Image of one kernel under the noise channel with variance ``s``."""
    j, mu = term.j, term.mu
    den = mu * s + 1.0
    out = []
    for l in range(j + 1):
        w = (factorial(j) ** 2 * s ** l
             / (factorial(l) * factorial(j - l) ** 2 * den ** (2 * j - l + 1)))
        out.append(ThermalTerm(term.weight * w, j - l, mu / den))
    return out


def thermal_family_terms(spec: StateSpec, stage: Stage) -> list[ThermalTerm]:
    """Kernel expansion of the unnormalized PATS or PAKFTS operator."""
    tc = thermal_coeffs(spec.n_th)
    m = spec.m
    terms = [ThermalTerm(1.0, m, tc.A)]
    if spec.variant is Variant.PAKFTS:
        k = spec.k
        terms.append(ThermalTerm(-tc.q ** k / factorial(k), m + k, 1.0))
    if stage.noisy:
        terms = [t for base in terms for t in channel_terms(base, stage.s)]
    return terms


def term_trace(t: ThermalTerm) -> float:
    return t.weight * factorial(t.j) / t.mu ** (t.j + 1)


def term_char(t: ThermalTerm, gamma, kappa: int):
    """``Tr[exp(g a^dag) T exp(-g* a)] exp((kappa+1)|g|^2/2)`` for one kernel."""
    gamma = np.asarray(gamma, dtype=complex)
    val = gaussian_moment_integral(t.j, t.j, -t.mu, -np.conj(gamma), gamma)
    return t.weight * val * np.exp(0.5 * (kappa + 1) * np.abs(gamma) ** 2)


def _radial_fourier(c, p_max, D, alpha):
    # (1/pi) sum_p c[p] int d^2g/pi |g|^{2p} exp(-D|g|^2 + g* a - g a*)
    alpha = np.asarray(alpha, dtype=complex)
    total = np.zeros(alpha.shape, dtype=complex)
    for p in range(p_max + 1):
        if c[p] == 0:
            continue
        total = total + c[p] * gaussian_moment_integral(p, p, -D, -np.conj(alpha), alpha)
    return (total / math.pi).real


def term_quasi(t: ThermalTerm, alpha, kappa: int):
    """Quasi-probability contribution of one kernel.

    The kernel's characteristic function is a polynomial in ``|gamma|^2``
    times ``exp(-D|gamma|^2)`` with ``D = 1/mu - (kappa+1)/2``; each power
    is Fourier transformed with the Gaussian moment integral.
    """
    D = 1.0 / t.mu - 0.5 * (kappa + 1)
    if not D > 0:
        raise DivergentIntegralError(
            f"quasi-probability singular: Gaussian width {D!r} <= 0")
    j = t.j
    c = np.zeros(j + 1)
    for b in range(j + 1):
        p = j - b
        c[p] = ((-1) ** p * factorial(j) ** 2
                / (factorial(b) * factorial(p) ** 2 * t.mu ** (2 * j - b + 1)))
    return t.weight * _radial_fourier(c, j, D, alpha)


def term_pnd(t: ThermalTerm, n: int) -> float:
    """``weight * <n|T(j, mu)|n> = weight * n!/(n-j)! (1-mu)^(n-j)``."""
    if n < t.j:
        return 0.0
    return t.weight * factorial(n) / factorial(n - t.j) * (1.0 - t.mu) ** (n - t.j)


def term_pnd_tail(t: ThermalTerm, n_max: int) -> float:
    """Upper bound on ``|sum_{n > n_max} term_pnd(t, n)|``.

    The ratio of consecutive terms ``(n+1)/(n+1-j) (1-mu)`` decreases with
    ``n``, so the residual is majorized by a geometric series.
    """
    x = 1.0 - t.mu
    n = max(n_max + 1, t.j)
    first = abs(term_pnd(t, n))
    if x == 0:
        return first if n == t.j else 0.0
    ratio = (n + 1) / (n + 1 - t.j) * x
    if ratio >= 1:
        return math.inf
    return first / (1 - ratio)


def term_moment(t: ThermalTerm, r: int) -> float:
    """``Tr[T(j, mu) a^dag^r a^r]`` by adaptive summation over Fock states.

    Terms ``n!/(n-j)! n!/(n-r)! x^(n-j)`` with ``x = 1 - mu`` are summed
    until the current term is below 1e-14 of the sum and the geometric tail
    bound is below 1e-12 (relative to the sum when it exceeds one).

    Raises
    ------
    SeriesConvergenceError
        If the criterion is not met within 4000 terms.
    """
    j = t.j
    x = 1.0 - t.mu
    n = max(j, r)
    if x == 0:
        if j < r:
            return 0.0
        return t.weight * factorial(j) * factorial(j) / factorial(j - r)
    term = (factorial(n) / factorial(n - j) * factorial(n) / factorial(n - r)
            * x ** (n - j))
    total = 0.0
    for _ in range(SERIES_CAP):
        total += term
        ratio = (n + 1) ** 2 / ((n + 1 - j) * (n + 1 - r)) * x
        nxt = term * ratio
        if ratio < 1:
            tail = nxt / (1 - ratio)
            if term < _REL_STOP * total and tail < _ABS_TAIL * max(1.0, total):
                return t.weight * total
        term = nxt
        n += 1
    raise SeriesConvergenceError("factorial-moment series did not converge")


# ---------------------------------------------------------------------------
# Photon-subtracted thermal state


def psts_char_coeffs(m: int, n_th: float) -> np.ndarray:
    """Coefficients ``c[p]`` of ``|gamma|^{2p}`` in the unnormalized CF prefactor."""
    c = np.zeros(m + 1)
    for l in range(m + 1):
        p = m - l
        c[p] = ((-1) ** p * factorial(m) ** 2
                / (factorial(l) * factorial(p) ** 2 * (1.0 / n_th) ** (2 * m - l + 1)))
    return c


def psts_width(n_th: float, stage: Stage, kappa: int, sign: int = -1) -> float:
    """Gaussian width ``n_th + s - (kappa + sign)/2`` of the PSTS CF."""
    return n_th + stage.s - 0.5 * (kappa + sign)


def psts_fmgf_jet(n_th: float, m: int, s: float, u0: float, order: int) -> Jet1:
    """Normalized factorial-moment generating function of the output PSTS.

    ``M(u)/N = (1 - s u)^m (1 - (n_th + s) u)^-(m+1)``; its Taylor
    coefficients at ``u = 0`` are factorial moments over ``r!`` and at
    ``u = -1`` the photon-number probabilities.
    """
    u = Jet1.variable(u0, order)
    return (1 - s * u) ** m * jet_pow(1 - (n_th + s) * u, -(m + 1))


# ---------------------------------------------------------------------------
# Photon-added squeezed thermal state


@dataclass(frozen=True)
class PastsChain:
    """Coefficient record of the squeezed kernel behind a PASTS stage.

    ``pref`` multiplies ``K(p, c)`` and all entries are jets in the
    differentiation variable ``X`` (at the output ``Y = X + 1/s`` differs
    from it by a constant).
    """

    pref: Jet1
    p: Jet1
    c: Jet1


def pasts_chain(sq: SqueezeCoeffs, stage: Stage, order: int) -> PastsChain:
    """Effective kernel parameters ``(pref, p, c)`` as jets in ``X``.

    Input: ``K(X, C)`` with ``X = 1 - B``.  Output: with ``Y = X + 1/s`` and
    ``Delta = Y^2 - C^2`` the channel gives
    ``(1/s) Delta^(-1/2) K(Y0, C0)``, ``Y0 = 1/s - Y/(s^2 Delta)``,
    ``C0 = C/(s^2 Delta)``.  These are evaluated through ``sY = sX + 1``
    and ``s^2 Delta``, which stay finite as ``s -> 0``.
    """
    X = Jet1.variable(sq.X, order)
    if not stage.noisy:
        return PastsChain(Jet1.constant(1.0, order), X, Jet1.constant(sq.C, order))
    s = stage.s
    sY = s * X + 1.0
    s2delta = sY * sY - (s * sq.C) ** 2
    inv = 1 / s2delta
    Y0 = (X * sY - s * sq.C ** 2) * inv
    C0 = sq.C * inv
    return PastsChain(jet_inv_sqrt(s2delta), Y0, C0)


def pasts_char_parts(chain: PastsChain, kappa: int):
    """``(prefactor, X*, C*)`` jets of the kappa-ordered CF of ``K(p, c)``."""
    det = chain.p * chain.p - chain.c * chain.c
    inv = 1 / det
    xs = chain.p * inv - 0.5 * (kappa + 1)
    cs = chain.c * inv
    return chain.pref * jet_inv_sqrt(det), xs, cs


def pasts_pnd_jet(chain_p, chain_c, chain_pref, u0: float, orders) -> Jet2:
    """Bivariate jet of ``pref * [(1 - (1-p)u)^2 - c^2 u^2]^(-1/2)``."""
    u = Jet2.variable(u0, orders, 1)
    one_minus = 1 - chain_p
    return chain_pref * jet2_inv_sqrt((1 - one_minus * u) ** 2 - chain_c * chain_c * u * u)


def pasts_chain2(sq: SqueezeCoeffs, stage: Stage, orders) -> tuple[Jet2, Jet2, Jet2]:
    """Same chain as :func:`pasts_chain` with bivariate jets (``X`` on axis 0)."""
    X = Jet2.variable(sq.X, orders, 0)
    if not stage.noisy:
        return Jet2.constant(1.0, orders), X, Jet2.constant(sq.C, orders)
    s = stage.s
    sY = s * X + 1.0
    s2delta = sY * sY - (s * sq.C) ** 2
    inv = 1 / s2delta
    Y0 = (X * sY - s * sq.C ** 2) * inv
    C0 = inv * sq.C
    return jet2_inv_sqrt(s2delta), Y0, C0


def pssts_char_parts(sq: SqueezeCoeffs, stage: Stage, kappa: int, order: int):
    """Jets ``(h, A1, A2, A3)`` at ``u = 1``.

    The unnormalized CF is
    ``d^m/du^m [h(u) exp(A1 g*^2 + A2 g^2 - A3 |g|^2)]`` with
    ``h = ((1 - B u)^2 - C^2 u^2)^(-1/2)``.  The channel adds ``s`` to
    ``A3``.
    """
    B, C = sq.B, sq.C
    u = Jet1.variable(1.0, order)
    det = (1 - B * u) ** 2 - C * C * u * u
    inv = 1 / det
    h = jet_inv_sqrt(det)
    A1 = 0.5 * C * inv
    A2 = (0.5 * C * (u * u * B * B + C * C * u * u) + B * C * u * (1 - B * u)) * inv + 0.5 * C
    A3 = (B * (1 - B * u) + C * C * u) * inv - 0.5 * (kappa - 1) + stage.s
    return h, A1, A2, A3


def pssts_h_derivative_jet(sq: SqueezeCoeffs, m: int, u0: float, order: int) -> Jet1:
    """Jet of ``h^(m)(u)`` around ``u0`` of the given order."""
    u = Jet1.variable(u0, order + m)
    h = jet_inv_sqrt((1 - sq.B * u) ** 2 - sq.C ** 2 * u * u)
    return jet_derivative_shift(h, m)


def pssts_output_gf_jet(sq: SqueezeCoeffs, m: int, s: float, v0: float, order: int) -> Jet1:
    """Jet in ``v`` of ``h^(m)(u(v)) / (1 + s(1 - v))``.

    ``u(v) = v + s(1-v)^2 / (1 + s(1-v))`` is the image of the PND
    generating variable under the channel; ``u(1) = 1`` and
    ``u(0) = s/(1+s)``.
    """
    v = Jet1.variable(v0, order)
    g = 1 / (1 + s * (1 - v))
    uv = v + s * (1 - v) * (1 - v) * g
    inner = pssts_h_derivative_jet(sq, m, complex(uv.coeffs[0]).real, order)
    return g * jet_compose(inner, uv)


def quadratic_ok(zeta, f, g) -> bool:
    return quadratic_integral_converges(zeta, f, g)
