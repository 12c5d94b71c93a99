"""Photon-number distributions, factorial moments and derived statistics.

Factorial moments ``<a^dag^r a^r>`` give the mean photon number (r = 1), the
Mandel parameter ``Q_M = (<a^dag^2 a^2> - <n>^2)/<n>`` and the second-order
correlation ``g2 = <a^dag^2 a^2>/<n>^2``, related by
``Q_M = <n> (g2 - 1)``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from math import factorial

import numpy as np

from . import closedform as cf
from .errors import InvalidParameterError, UndefinedStatisticError
from .numkernel import FACTORIAL_LIMIT, Jet2
from .states import (
    DEFAULT_VARIANTS,
    MAX_PHOTONS,
    FormulaVariants,
    Stage,
    StateSpec,
    Variant,
    normalization,
    squeeze_coeffs,
)

__all__ = [
    "PndResult",
    "StatSummary",
    "pnd",
    "pnd_full",
    "pnd_converged",
    "moment",
    "mean_photon_number",
    "mandel_q",
    "g2",
    "stat_summary",
    "classify",
    "write_pnd_csv",
    "write_summary_json",
]

STAT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PndResult:
    """Probabilities for ``n = 0..n_max`` and a bound on the missing weight."""

    probabilities: np.ndarray
    tail_bound: float

    @property
    def n_max(self) -> int:
        return len(self.probabilities) - 1

    def total(self) -> float:
        return float(np.sum(self.probabilities))

    def peak(self) -> int:
        return int(np.argmax(self.probabilities))


@dataclass(frozen=True)
class StatSummary:
    mean_n: float
    second_factorial_moment: float
    mandel_q: float
    g2: float

    @property
    def classification(self) -> tuple[str, str]:
        return classify(self.mandel_q, self.g2)


def classify(q_m: float, g2_value: float, tol: float = STAT_TOL) -> tuple[str, str]:
    """Map ``(Q_M, g2)`` to ``(sub|poissonian|super, bunching|antibunching|coherent)``."""
    if q_m < -tol:
        pois = "sub"
    elif q_m > tol:
        pois = "super"
    else:
        pois = "poissonian"
    if g2_value > 1 + tol:
        bunch = "bunching"
    elif g2_value < 1 - tol:
        bunch = "antibunching"
    else:
        bunch = "coherent"
    return pois, bunch


def _check_n(n: int, extra: int = 0):
    if int(n) != n or n < 0:
        raise InvalidParameterError(f"photon number must be a non-negative integer, got {n!r}")
    if n + extra > FACTORIAL_LIMIT:
        raise InvalidParameterError(
            f"photon number {n} (+{extra}) exceeds the factorial range {FACTORIAL_LIMIT}")


def _pasts_jet2(spec: StateSpec, stage: Stage, u0: float, order: int) -> Jet2:
    sq = squeeze_coeffs(spec.n_th, spec.lam)
    orders = (spec.m, order)
    pref, p, c = cf.pasts_chain2(sq, stage, orders)
    return cf.pasts_pnd_jet(p, c, pref, u0, orders)


def _pasts_scale(spec: StateSpec, variants: FormulaVariants) -> float:
    sq = squeeze_coeffs(spec.n_th, spec.lam)
    return ((-1) ** spec.m * factorial(spec.m)
            / (math.sqrt(sq.A_s) * normalization(spec, variants)))


def _pssts_scale(spec: StateSpec, variants: FormulaVariants) -> float:
    sq = squeeze_coeffs(spec.n_th, spec.lam)
    return 1.0 / (math.sqrt(sq.A_s) * normalization(spec, variants))


def _pnd_coeffs(spec: StateSpec, stage: Stage, n_max: int,
                variants: FormulaVariants) -> np.ndarray:
    # Probabilities for 0..n_max from one jet (squeezed families, output PSTS).
    v = spec.variant
    if v is Variant.PSTS:
        jet = cf.psts_fmgf_jet(spec.n_th, spec.m, stage.s, variants.psts_output_pnd_u, n_max)
        return jet.coeffs.real.copy()
    if v is Variant.PASTS:
        jet = _pasts_jet2(spec, stage, 0.0, n_max)
        return (_pasts_scale(spec, variants) * jet.coeffs[spec.m]).real
    sq = squeeze_coeffs(spec.n_th, spec.lam)
    if stage.noisy:
        jet = cf.pssts_output_gf_jet(sq, spec.m, stage.s, 0.0, n_max)
        c = jet.coeffs
    else:
        h = cf.pssts_h_derivative_jet(sq, spec.m, 0.0, n_max)
        c = h.coeffs
    return (_pssts_scale(spec, variants) * c).real


def pnd(spec: StateSpec, stage: Stage, n: int,
        variants: FormulaVariants = DEFAULT_VARIANTS) -> float:
    """Probability of ``n`` photons.

    Raises
    ------
    InvalidParameterError
        If ``n`` is negative or beyond the factorial table.
    """
    _check_n(n, spec.m + spec.k)
    v = spec.variant
    if v in (Variant.PATS, Variant.PAKFTS):
        N = normalization(spec, variants)
        return float(sum(cf.term_pnd(t, n) for t in cf.thermal_family_terms(spec, stage)) / N)
    if v is Variant.PSTS and not stage.noisy:
        q = spec.n_th / (1.0 + spec.n_th)
        N = normalization(spec, variants)
        return float(factorial(spec.m + n) / factorial(n) * q ** (spec.m + n + 1) / N)
    return float(_pnd_coeffs(spec, stage, n, variants)[n])


def _tail_estimate(p: np.ndarray) -> float:
    # Geometric majorization from the last few probabilities, taken two
    # steps at a time so that even/odd oscillations do not fool the ratio.
    if len(p) < 6:
        return math.inf
    a = np.abs(p)
    r = max(a[-1] / a[-3] if a[-3] > 0 else 0.0,
            a[-2] / a[-4] if a[-4] > 0 else 0.0)
    if r >= 1:
        return math.inf
    return float((a[-1] + a[-2]) * r / (1 - r))


def pnd_full(spec: StateSpec, stage: Stage, n_max: int,
             variants: FormulaVariants = DEFAULT_VARIANTS) -> PndResult:
    """Probabilities for ``n = 0..n_max`` with a bound on the rest.

    For thermal kernels the bound is the rigorous geometric majorization of
    each kernel's residual series; for jet-based families it extrapolates
    the two-step ratio of the last computed probabilities.
    """
    _check_n(n_max, spec.m + spec.k)
    v = spec.variant
    if v in (Variant.PATS, Variant.PAKFTS):
        N = normalization(spec, variants)
        terms = cf.thermal_family_terms(spec, stage)
        probs = np.array([sum(cf.term_pnd(t, n) for t in terms) for n in range(n_max + 1)]) / N
        tail = sum(cf.term_pnd_tail(t, n_max) for t in terms) / N
    elif v is Variant.PSTS and not stage.noisy:
        probs = np.array([pnd(spec, stage, n, variants) for n in range(n_max + 1)])
        q = spec.n_th / (1.0 + spec.n_th)
        last = probs[-1] * (spec.m + n_max + 1) / (n_max + 1) * q
        ratio = (spec.m + n_max + 2) / (n_max + 2) * q
        tail = last / (1 - ratio) if ratio < 1 else math.inf
    else:
        probs = _pnd_coeffs(spec, stage, n_max, variants)
        tail = _tail_estimate(probs)
    return PndResult(np.asarray(probs, dtype=float), float(tail))


def pnd_converged(spec: StateSpec, stage: Stage, tail_tol: float = 1e-10,
                  start: int = 40, limit: int = FACTORIAL_LIMIT - 2 * MAX_PHOTONS,
                  variants: FormulaVariants = DEFAULT_VARIANTS) -> PndResult:
    """:func:`pnd_full` with ``n_max`` grown until the tail bound is below ``tail_tol``."""
    n_max = start
    while True:
        res = pnd_full(spec, stage, n_max, variants)
        if res.tail_bound < tail_tol or n_max >= limit:
            return res
        n_max = min(limit, 2 * n_max)


def moment(spec: StateSpec, stage: Stage, r: int,
           variants: FormulaVariants = DEFAULT_VARIANTS) -> float:
    """Normally ordered factorial moment ``<a^dag^r a^r>``."""
    if int(r) != r or r < 0:
        raise InvalidParameterError("moment order must be a non-negative integer")
    _check_n(r, spec.m + spec.k)
    v = spec.variant
    N = normalization(spec, variants)
    if v in (Variant.PATS, Variant.PAKFTS):
        return float(sum(cf.term_moment(t, r) for t in cf.thermal_family_terms(spec, stage)) / N)
    if v is Variant.PSTS:
        if not stage.noisy:
            return factorial(spec.m + r) / factorial(spec.m) * spec.n_th ** r
        jet = cf.psts_fmgf_jet(spec.n_th, spec.m, stage.s, 0.0, r)
        return float(jet.derivative(r).real)
    if v is Variant.PASTS:
        jet = _pasts_jet2(spec, stage, 1.0, r)
        return float((_pasts_scale(spec, variants) * jet.derivative(spec.m, r)
                      / factorial(spec.m)).real)
    sq = squeeze_coeffs(spec.n_th, spec.lam)
    if stage.noisy:
        jet = cf.pssts_output_gf_jet(sq, spec.m, stage.s, 1.0, r)
    else:
        jet = cf.pssts_h_derivative_jet(sq, spec.m, 1.0, r)
    return float((_pssts_scale(spec, variants) * jet.derivative(r)).real)


def mean_photon_number(spec: StateSpec, stage: Stage,
                       variants: FormulaVariants = DEFAULT_VARIANTS) -> float:
    return moment(spec, stage, 1, variants)


def stat_summary(spec: StateSpec, stage: Stage,
                 variants: FormulaVariants = DEFAULT_VARIANTS) -> StatSummary:
    """Mean, second factorial moment, Mandel Q and g2.

    Raises
    ------
    UndefinedStatisticError
        If the mean photon number vanishes.
    """
    n1 = moment(spec, stage, 1, variants)
    n2 = moment(spec, stage, 2, variants)
    if not n1 > 1e-300:
        raise UndefinedStatisticError("mean photon number is zero")
    return StatSummary(mean_n=n1, second_factorial_moment=n2,
                       mandel_q=(n2 - n1 * n1) / n1, g2=n2 / (n1 * n1))


def mandel_q(spec: StateSpec, stage: Stage,
             variants: FormulaVariants = DEFAULT_VARIANTS) -> float:
    return stat_summary(spec, stage, variants).mandel_q


def g2(spec: StateSpec, stage: Stage,
       variants: FormulaVariants = DEFAULT_VARIANTS) -> float:
    return stat_summary(spec, stage, variants).g2


def write_pnd_csv(result: PndResult, path) -> None:
    """Write ``n,probability`` rows with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "probability"])
        for n, p in enumerate(result.probabilities):
            w.writerow([n, "%.17g" % p])


def summary_record(summary: StatSummary) -> dict:
    d = asdict(summary)
    pois, bunch = summary.classification
    d["classification"] = {"poissonian": pois, "bunching": bunch}
    return d


def write_summary_json(summary: StatSummary, path) -> None:
    with open(path, "w") as fh:
        json.dump(summary_record(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")
