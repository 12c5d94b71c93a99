"""Kappa-ordered characteristic functions and quasi-probability distributions.

``chi(gamma, kappa) = Tr[rho D(gamma)] exp(kappa |gamma|^2 / 2)`` and

    P_kappa(alpha) = (1/pi) int d^2gamma/pi exp(gamma* alpha - gamma alpha*) chi(gamma, kappa)

so that ``kappa = -1, 0, +1`` give the Husimi Q, Wigner W and Glauber P
functions, with the vacuum Wigner function equal to ``2/pi`` at the origin.
The channel multiplies every characteristic function by
``exp(-s |gamma|^2)``.

All point functions accept scalar or array arguments.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from math import factorial

import numpy as np

from . import closedform as cf
from .errors import DivergentIntegralError, InvalidParameterError, NGChannelError
from .numkernel import jet_exp, jet_inv_sqrt, quadratic_integral_converges
from .states import (
    DEFAULT_VARIANTS,
    FormulaVariants,
    Stage,
    StateSpec,
    Variant,
    normalization,
    squeeze_coeffs,
)

__all__ = [
    "KappaOrder",
    "PhaseGrid",
    "PhaseField",
    "Admissibility",
    "char_fn",
    "quasiprob_point",
    "quasiprob_grid",
    "convergence_guard",
    "write_phasefield_csv",
]


class KappaOrder(enum.IntEnum):
    Q = -1
    W = 0
    P = 1


def _kappa(kappa) -> int:
    try:
        return int(KappaOrder(int(kappa)))
    except (ValueError, TypeError):
        raise InvalidParameterError(f"kappa must be -1, 0 or 1, got {kappa!r}") from None


@dataclass(frozen=True)
class PhaseGrid:
    """Rectangular grid of ``alpha = re + i im``."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    n_re: int
    n_im: int

    def __post_init__(self):
        if self.n_re < 2 or self.n_im < 2:
            raise InvalidParameterError("grid needs at least 2 nodes per axis")
        if not (self.re_max > self.re_min and self.im_max > self.im_min):
            raise InvalidParameterError("grid bounds must satisfy max > min")

    @classmethod
    def square(cls, lo: float, hi: float, n: int) -> "PhaseGrid":
        return cls(lo, hi, lo, hi, n, n)

    @property
    def re(self) -> np.ndarray:
        return np.linspace(self.re_min, self.re_max, self.n_re)

    @property
    def im(self) -> np.ndarray:
        return np.linspace(self.im_min, self.im_max, self.n_im)

    def alphas(self) -> np.ndarray:
        """``n_re x n_im`` array of complex nodes."""
        return self.re[:, None] + 1j * self.im[None, :]


@dataclass(frozen=True, eq=False)
class PhaseField:
    grid: PhaseGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_re, self.grid.n_im):
            raise InvalidParameterError("field shape does not match its grid")
        object.__setattr__(self, "values", v)

    def at_origin(self) -> float:
        """Value at the node closest to ``alpha = 0``."""
        i = int(np.argmin(np.abs(self.grid.re)))
        j = int(np.argmin(np.abs(self.grid.im)))
        return float(self.values[i, j])

    def integral(self) -> float:
        """Trapezoid-free Riemann sum ``sum(values) d(re) d(im)``."""
        dre = (self.grid.re_max - self.grid.re_min) / (self.grid.n_re - 1)
        dim = (self.grid.im_max - self.grid.im_min) / (self.grid.n_im - 1)
        return float(self.values.sum() * dre * dim)


@dataclass(frozen=True)
class Admissibility:
    admissible: bool
    reason: str = ""

    def __bool__(self):
        return self.admissible


def _psts_sign(stage: Stage, variants: FormulaVariants) -> int:
    return variants.psts_output_kappa_sign if stage.kind == "output" else -1


def convergence_guard(spec: StateSpec, stage: Stage, kappa,
                      variants: FormulaVariants = DEFAULT_VARIANTS) -> Admissibility:
    """Check that the Fourier transform from chi to P_kappa converges.

    Every Gaussian integral on the way from the characteristic function to
    the quasi-probability is tested at the expansion point of the jets.
    """
    kappa = _kappa(kappa)
    try:
        normalization(spec, variants)
    except NGChannelError as exc:
        return Admissibility(False, f"invalid state: {exc}")
    v = spec.variant
    if v in (Variant.PATS, Variant.PAKFTS):
        for t in cf.thermal_family_terms(spec, stage):
            D = 1.0 / t.mu - 0.5 * (kappa + 1)
            if t.weight != 0 and not D > 0:
                return Admissibility(False, f"singular P: Gaussian width {D:.6g} <= 0")
        return Admissibility(True)
    if v is Variant.PSTS:
        D = cf.psts_width(spec.n_th, stage, kappa, _psts_sign(stage, variants))
        if not D > 0:
            return Admissibility(False, f"singular P: Gaussian width {D:.6g} <= 0")
        return Admissibility(True)
    sq = squeeze_coeffs(spec.n_th, spec.lam)
    if v is Variant.PASTS:
        chain = cf.pasts_chain(sq, stage, 0)
        p, c = chain.p.value.real, chain.c.value.real
        if not p > abs(c):
            return Admissibility(False, "channel output kernel not normalizable")
        _, xs, cs = cf.pasts_char_parts(chain, kappa)
        xs, cs = xs.value.real, cs.value.real
        if not quadratic_integral_converges(-xs, cs / 2, cs / 2):
            return Admissibility(False, f"singular P: X*={xs:.6g} <= |C*|={abs(cs):.6g}")
        return Admissibility(True)
    _, A1, A2, A3 = cf.pssts_char_parts(sq, stage, kappa, 0)
    a1, a2, a3 = A1.value.real, A2.value.real, A3.value.real
    if not quadratic_integral_converges(-a3, a2, a1):
        return Admissibility(False, f"singular P: A3={a3:.6g} <= |A1+A2|={abs(a1 + a2):.6g}")
    return Admissibility(True)


def _squeezed_prefactor(spec: StateSpec, variants: FormulaVariants) -> float:
    sq = squeeze_coeffs(spec.n_th, spec.lam)
    return factorial(spec.m) / (math.sqrt(sq.A_s) * normalization(spec, variants))


def char_fn(spec: StateSpec, stage: Stage, kappa, gamma,
            variants: FormulaVariants = DEFAULT_VARIANTS):
    """Kappa-ordered characteristic function.

    The characteristic function is finite for every state in the catalog;
    no P-function admissibility is required.
    """
    kappa = _kappa(kappa)
    gamma = np.asarray(gamma, dtype=complex)
    g2 = np.abs(gamma) ** 2
    v = spec.variant
    N = normalization(spec, variants)
    if v in (Variant.PATS, Variant.PAKFTS):
        out = sum(cf.term_char(t, gamma, kappa) for t in cf.thermal_family_terms(spec, stage))
        out = out / N
    elif v is Variant.PSTS:
        c = cf.psts_char_coeffs(spec.m, spec.n_th)
        D = cf.psts_width(spec.n_th, stage, kappa, _psts_sign(stage, variants))
        poly = sum(c[p] * g2 ** p for p in range(spec.m + 1))
        out = poly * np.exp(-D * g2) / N
    elif v is Variant.PASTS:
        sq = squeeze_coeffs(spec.n_th, spec.lam)
        chain = cf.pasts_chain(sq, stage, spec.m)
        pref, xs, cs = cf.pasts_char_parts(chain, kappa)
        quad = 0.5 * (gamma ** 2 + np.conj(gamma) ** 2)
        jet = pref * jet_exp(cs * quad - xs * g2)
        out = ((-1) ** spec.m * _squeezed_prefactor(spec, variants)
               * jet.coeffs[spec.m])
    else:
        sq = squeeze_coeffs(spec.n_th, spec.lam)
        h, A1, A2, A3 = cf.pssts_char_parts(sq, stage, kappa, spec.m)
        jet = h * jet_exp(A1 * np.conj(gamma) ** 2 + A2 * gamma ** 2 - A3 * g2)
        out = _squeezed_prefactor(spec, variants) * jet.coeffs[spec.m]
    out = np.asarray(out, dtype=complex)
    return out[()] if out.ndim == 0 else out


def quasiprob_point(spec: StateSpec, stage: Stage, kappa, alpha,
                    variants: FormulaVariants = DEFAULT_VARIANTS):
    """Quasi-probability ``P_kappa(alpha)`` from the closed forms.

    Raises
    ------
    DivergentIntegralError
        If the distribution is more singular than a delta function for
        this ``kappa`` (see :func:`convergence_guard`).
    InvalidStateError
        If the state itself does not exist.
    """
    kappa = _kappa(kappa)
    normalization(spec, variants)  # invalid states raise their own error
    guard = convergence_guard(spec, stage, kappa, variants)
    if not guard:
        raise DivergentIntegralError(guard.reason)
    alpha = np.asarray(alpha, dtype=complex)
    a2 = np.abs(alpha) ** 2
    v = spec.variant
    N = normalization(spec, variants)
    if v in (Variant.PATS, Variant.PAKFTS):
        out = sum(cf.term_quasi(t, alpha, kappa) for t in cf.thermal_family_terms(spec, stage))
        out = out / N
    elif v is Variant.PSTS:
        c = cf.psts_char_coeffs(spec.m, spec.n_th)
        D = cf.psts_width(spec.n_th, stage, kappa, _psts_sign(stage, variants))
        out = cf._radial_fourier(c, spec.m, D, alpha) / N
    elif v is Variant.PASTS:
        sq = squeeze_coeffs(spec.n_th, spec.lam)
        chain = cf.pasts_chain(sq, stage, spec.m)
        pref, xs, cs = cf.pasts_char_parts(chain, kappa)
        det = xs * xs - cs * cs
        inv = 1 / det
        quad = 0.5 * (alpha ** 2 + np.conj(alpha) ** 2)
        jet = pref * jet_inv_sqrt(det) * jet_exp((cs * quad - xs * a2) * inv)
        out = ((-1) ** spec.m * _squeezed_prefactor(spec, variants)
               * jet.coeffs[spec.m] / math.pi).real
    else:
        sq = squeeze_coeffs(spec.n_th, spec.lam)
        h, A1, A2, A3 = cf.pssts_char_parts(sq, stage, kappa, spec.m)
        det = A3 * A3 - 4 * A1 * A2
        ac, aa = (np.conj(alpha) ** 2, alpha ** 2)
        if not variants.pssts_swap:
            ac, aa = aa, ac
        expo = (A1 * ac + A2 * aa - A3 * a2) / det
        jet = h * jet_inv_sqrt(det) * jet_exp(expo)
        out = (_squeezed_prefactor(spec, variants) * jet.coeffs[spec.m] / math.pi).real
    out = np.asarray(out, dtype=float)
    return out[()] if out.ndim == 0 else out


def quasiprob_grid(spec: StateSpec, stage: Stage, kappa, grid: PhaseGrid,
                   variants: FormulaVariants = DEFAULT_VARIANTS) -> PhaseField:
    """Evaluate :func:`quasiprob_point` on every node of ``grid``."""
    try:
        values = quasiprob_point(spec, stage, kappa, grid.alphas(), variants)
    except NGChannelError as exc:
        raise type(exc)(
            f"{exc} (grid re=[{grid.re_min}, {grid.re_max}], "
            f"im=[{grid.im_min}, {grid.im_max}])") from exc
    return PhaseField(grid, values)


def write_phasefield_csv(field: PhaseField, path) -> None:
    """Write ``re,im,value`` rows, real axis outermost, 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["re", "im", "value"])
        for i, re in enumerate(field.grid.re):
            for j, im in enumerate(field.grid.im):
                w.writerow(["%.17g" % re, "%.17g" % im, "%.17g" % field.values[i, j]])
