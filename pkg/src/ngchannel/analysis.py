"""Noise thresholds, parameter sweeps and statistics classification."""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import bisect

from .errors import InvalidParameterError, NGChannelError, NotApplicableError
from .photstat import classify, pnd_full, stat_summary
from .quasiprob import quasiprob_point
from .states import DEFAULT_VARIANTS, FormulaVariants, Stage, StateSpec

__all__ = [
    "ThresholdResult",
    "SweepTable",
    "wigner_center",
    "wigner_center_threshold",
    "sweep",
    "classify_statistics",
    "QUANTITIES",
    "AXES",
]

QUANTITIES = ("W0", "Q0", "mandel_q", "g2", "pnd_peak")
AXES = ("n_th", "lambda", "s", "m")
PRESAMPLES = 32


@dataclass(frozen=True)
class ThresholdResult:
    """Noise level at which the Wigner function at the origin turns positive.

    ``s_star`` is None when ``W(0)`` is still negative at ``s_max``.
    """

    s_star: float | None
    bracket: tuple[float, float]
    iterations: int
    w0_at_star: float
    monotone: bool = True
    sign_changes: int = 1

    @property
    def found(self) -> bool:
        return self.s_star is not None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bracket"] = list(self.bracket)
        d["found"] = self.found
        return d


def wigner_center(spec: StateSpec, s: float,
                  variants: FormulaVariants = DEFAULT_VARIANTS) -> float:
    """``W(0)`` after the channel with variance ``s``."""
    return float(quasiprob_point(spec, Stage.output(s), 0, 0.0, variants))


def wigner_center_threshold(spec: StateSpec, s_max: float = 2.0, tol: float = 1e-10,
                            max_iter: int = 60,
                            variants: FormulaVariants = DEFAULT_VARIANTS) -> ThresholdResult:
    """Smallest noise level where ``W(0)`` changes sign, by bisection.

    ``W(0)`` is first sampled at 32 equally spaced noise levels on
    ``[0, s_max]``.  Several sign changes trigger a warning and the first one
    is refined.  Bisection stops when the bracket is narrower than ``tol``.

    Raises
    ------
    NotApplicableError
        If the input Wigner function is not negative at the origin.
    """
    if not s_max > 0:
        raise InvalidParameterError("s_max must be positive")
    f0 = wigner_center(spec, 0.0, variants)
    if not f0 < 0:
        raise NotApplicableError(f"W(0) = {f0:.6g} is not negative at the input")
    grid = np.linspace(0.0, s_max, PRESAMPLES)
    vals = np.array([wigner_center(spec, s, variants) for s in grid])
    steps = np.diff(vals)
    monotone = bool(np.all(steps >= -1e-14) or np.all(steps <= 1e-14))
    signs = np.sign(vals)
    changes = np.nonzero(signs[:-1] * signs[1:] <= 0)[0]
    changes = [i for i in changes if signs[i] < 0]
    if not changes:
        return ThresholdResult(None, (0.0, s_max), 0, float(vals[-1]), monotone, 0)
    if len(changes) > 1 or not monotone:
        warnings.warn("W(0) is not monotone in s; reporting the smallest root",
                      RuntimeWarning, stacklevel=2)
    i = changes[0]
    lo, hi = float(grid[i]), float(grid[i + 1])
    if vals[i + 1] == 0:
        return ThresholdResult(hi, (lo, hi), 0, 0.0, monotone, len(changes))
    root, info = bisect(lambda s: wigner_center(spec, s, variants), lo, hi,
                        xtol=tol, maxiter=max_iter, full_output=True, disp=False)
    if not info.converged:
        raise NGChannelError(f"bisection did not converge in {max_iter} iterations")
    return ThresholdResult(float(root), (lo, hi), int(info.iterations),
                           wigner_center(spec, root, variants), monotone, len(changes))


@dataclass(frozen=True)
class SweepTable:
    axis: str
    axis_values: tuple
    quantity: str
    values: tuple
    errors: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.axis_values) != len(self.values):
            raise InvalidParameterError("axis and value columns differ in length")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([self.axis, self.quantity, "error"])
            for i, (x, y) in enumerate(zip(self.axis_values, self.values)):
                w.writerow(["%.17g" % x, "%.17g" % y, self.errors.get(i, "")])

    def to_dict(self) -> dict:
        return {"axis": self.axis, "axis_values": list(self.axis_values),
                "quantity": self.quantity,
                "values": [None if math.isnan(v) else v for v in self.values],
                "errors": {str(k): v for k, v in self.errors.items()}}

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _evaluate(quantity: str, spec: StateSpec, stage: Stage,
              variants: FormulaVariants) -> float:
    if quantity == "W0":
        return float(quasiprob_point(spec, stage, 0, 0.0, variants))
    if quantity == "Q0":
        return float(quasiprob_point(spec, stage, -1, 0.0, variants))
    if quantity == "mandel_q":
        return stat_summary(spec, stage, variants).mandel_q
    if quantity == "g2":
        return stat_summary(spec, stage, variants).g2
    n_max = 60 + 3 * spec.m
    return float(pnd_full(spec, stage, n_max, variants).peak())


def sweep(spec_template: StateSpec, axis: str, values, quantity: str,
          stage: Stage = Stage.input(),
          variants: FormulaVariants = DEFAULT_VARIANTS) -> SweepTable:
    """Tabulate ``quantity`` while one parameter runs over ``values``.

    For ``axis="s"`` each point is the channel output at that noise level;
    otherwise ``stage`` is used throughout.  A failing point is recorded as
    NaN with its error message instead of aborting the sweep.
    """
    if axis not in AXES:
        raise InvalidParameterError(f"axis must be one of {AXES}")
    if quantity not in QUANTITIES:
        raise InvalidParameterError(f"quantity must be one of {QUANTITIES}")
    out, errors = [], {}
    values = tuple(float(v) if axis != "m" else int(v) for v in values)
    for i, x in enumerate(values):
        try:
            if axis == "s":
                spec, st = spec_template, Stage.output(x)
            elif axis == "lambda":
                spec, st = spec_template.replace(lam=x), stage
            else:
                spec, st = spec_template.replace(**{axis: x}), stage
            out.append(_evaluate(quantity, spec, st, variants))
        except NGChannelError as exc:
            out.append(math.nan)
            errors[i] = f"{type(exc).__name__}: {exc}"
    return SweepTable(axis, values, quantity, tuple(out), errors)


def classify_statistics(spec: StateSpec, stage: Stage,
                        variants: FormulaVariants = DEFAULT_VARIANTS) -> tuple[str, str]:
    """``(sub|poissonian|super, bunching|antibunching|coherent)`` from Q_M and g2."""
    summ = stat_summary(spec, stage, variants)
    return classify(summ.mandel_q, summ.g2)
