"""Closed forms against the Fock oracle, and arbitration of ambiguous formulas.

The lattice runner compares every closed-form readout with its oracle
counterpart and records the largest deviation per check.  The arbitration
runner evaluates competing readings of the ambiguous expressions and keeps
the one the oracle confirms.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .fockoracle import (
    QuadratureConfig,
    oracle_char,
    oracle_moment,
    oracle_pnd,
    oracle_q,
    oracle_state,
    oracle_wigner,
    unnormalized_trace,
)
from .photstat import moment, pnd, pnd_converged, pnd_full
from .quasiprob import char_fn, quasiprob_point
from .states import (
    DEFAULT_VARIANTS,
    FormulaVariants,
    Stage,
    StateSpec,
    Variant,
    normalization,
)

__all__ = [
    "CheckRecord",
    "ArbitrationRecord",
    "ValidationReport",
    "lattice",
    "validate_state",
    "normalization_checks",
    "oracle_checks",
    "run_validation",
    "arbitrate",
    "TOLERANCES",
]

TOLERANCES = {
    "chi0": 1e-12,
    "pnd_sum": 1e-9,
    "phase": 1e-6,
    "char": 1e-6,
    "pnd": 1e-7,
    "moment": 1e-7,
}

PHASE_AXIS = np.linspace(-3.0, 3.0, 9)
CHAR_POINTS = (0.5, 0.3 + 0.4j, -0.9 + 0.6j, 1.2 - 1.1j, -1.5j, 2.0)


@dataclass
class CheckRecord:
    check: str
    label: str
    max_dev: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.max_dev <= self.tol)


@dataclass
class ArbitrationRecord:
    """Oracle evidence for one ambiguous expression."""

    item: str
    accepted: str
    rejected: str
    accepted_dev: float
    rejected_dev: float

    @property
    def separation(self) -> float:
        """Orders of magnitude between rejected and accepted deviations."""
        a = max(self.accepted_dev, 1e-300)
        return math.log10(max(self.rejected_dev, 1e-300) / a)

    @property
    def decisive(self) -> bool:
        return self.separation >= 3.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["separation_orders"] = self.separation
        d["decisive"] = self.decisive
        return d


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)
    arbitration: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and all(
            a.decisive for a in self.arbitration if a.item in DECISIVE_ITEMS)

    def worst(self) -> dict:
        """Largest deviation per check type."""
        out = {}
        for c in self.checks:
            cur = out.get(c.check)
            if cur is None or c.max_dev > cur.max_dev:
                out[c.check] = c
        return out

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "n_checks": len(self.checks),
            "failures": [asdict(c) for c in self.checks if not c.passed],
            "worst": {k: {"label": v.label, "max_dev": v.max_dev, "tol": v.tol}
                      for k, v in sorted(self.worst().items())},
            "arbitration": [a.to_dict() for a in self.arbitration],
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def to_text(self) -> str:
        lines = []
        for k, v in sorted(self.worst().items()):
            flag = "PASS" if v.max_dev <= v.tol else "FAIL"
            lines.append(f"{flag} {k:8s} max_dev={v.max_dev:.3e} tol={v.tol:.0e} at {v.label}")
        for a in self.arbitration:
            lines.append(
                f"ARBITRATION {a.item}: accepted {a.accepted} (dev {a.accepted_dev:.3e}), "
                f"rejected {a.rejected} (dev {a.rejected_dev:.3e}), "
                f"separation {a.separation:.1f} orders")
        return "\n".join(lines)


def _label(spec: StateSpec, stage: Stage) -> str:
    parts = [spec.variant.value, f"n_th={spec.n_th:g}", f"m={spec.m}"]
    if spec.variant is Variant.PAKFTS:
        parts.append(f"k={spec.k}")
    if spec.variant.squeezed:
        parts.append(f"lambda={spec.lam:g}")
    parts.append(f"{stage.kind}" + (f"(s={stage.s:g})" if stage.kind == "output" else ""))
    return " ".join(parts)


def lattice(level: str = "full"):
    """Yield ``(spec, stage)`` pairs of the validation lattice.

    ``full``: every family at the input and after channels with s = 0.3 and
    s = 1, n_th in {0.1, 0.5, 1}, m in {0, 1, 2}, lambda in {0, 0.2, 0.4}
    for squeezed families and k in {0, 1, 2} for the filtered family.
    ``spot``: one representative per family and stage.
    """
    stages = (Stage.input(), Stage.output(0.3), Stage.output(1.0))
    if level == "spot":
        specs = [StateSpec("PATS", 0.5, 1), StateSpec("PSTS", 0.5, 2),
                 StateSpec("PAKFTS", 0.5, 1, 1), StateSpec("PASTS", 0.5, 1, lam=0.2),
                 StateSpec("PSSTS", 0.1, 1, lam=0.4)]
        for spec, st in itertools.product(specs, stages):
            yield spec, st
        return
    if level != "full":
        raise ValueError(f"unknown validation level {level!r}")
    for v in Variant:
        ks = (0, 1, 2) if v is Variant.PAKFTS else (0,)
        lams = (0.0, 0.2, 0.4) if v.squeezed else (0.0,)
        for n_th, m, k, lam, st in itertools.product((0.1, 0.5, 1.0), (0, 1, 2), ks, lams, stages):
            yield StateSpec(v, n_th, m, k, lam), st


def normalization_checks(spec: StateSpec, stage: Stage,
                         variants: FormulaVariants = DEFAULT_VARIANTS) -> list:
    label = _label(spec, stage)
    chi0 = max(abs(char_fn(spec, stage, k, 0.0, variants) - 1.0) for k in (-1, 0, 1))
    res = pnd_converged(spec, stage, 1e-10, variants=variants)
    total = abs(res.total() - 1.0)
    return [CheckRecord("chi0", label, float(chi0), TOLERANCES["chi0"]),
            CheckRecord("pnd_sum", label, float(total), TOLERANCES["pnd_sum"])]


def oracle_checks(spec: StateSpec, stage: Stage,
                  variants: FormulaVariants = DEFAULT_VARIANTS,
                  cutoff: int | None = None, quad_order: int = 24) -> list:
    """Compare every closed-form readout with the Fock oracle.

    ``cutoff`` fixes the Fock basis size instead of growing it until the
    truncated weight is below 1e-12; ``quad_order`` is the starting
    Gauss-Hermite order of the channel quadrature.
    """
    label = _label(spec, stage)
    rho = oracle_state(spec, stage, cutoff=cutoff, quad=QuadratureConfig(quad_order),
                       tail_tol=1e-12)
    alphas = PHASE_AXIS[:, None] + 1j * PHASE_AXIS[None, :]
    recs = []
    w_cf = quasiprob_point(spec, stage, 0, alphas, variants)
    q_cf = quasiprob_point(spec, stage, -1, alphas, variants)
    w_or = np.array([[oracle_wigner(rho, a) for a in row] for row in alphas])
    q_or = np.array([[oracle_q(rho, a) for a in row] for row in alphas])
    recs.append(CheckRecord("wigner", label, float(np.max(np.abs(w_cf - w_or))),
                            TOLERANCES["phase"]))
    recs.append(CheckRecord("husimi", label, float(np.max(np.abs(q_cf - q_or))),
                            TOLERANCES["phase"]))
    dev = 0.0
    for k in (-1, 0, 1):
        vals = char_fn(spec, stage, k, np.array(CHAR_POINTS), variants)
        ref = np.array([oracle_char(rho, g, k) for g in CHAR_POINTS])
        dev = max(dev, float(np.max(np.abs(vals - ref))))
    recs.append(CheckRecord("char", label, dev, TOLERANCES["char"]))
    probs = pnd_full(spec, stage, 40, variants).probabilities
    ref = np.array([oracle_pnd(rho, n) for n in range(41)])
    recs.append(CheckRecord("pnd", label, float(np.max(np.abs(probs - ref))), TOLERANCES["pnd"]))
    dev = 0.0
    for r in (1, 2):
        cfm, orm = moment(spec, stage, r, variants), oracle_moment(rho, r)
        dev = max(dev, abs(cfm - orm) / max(1.0, abs(orm)))
    recs.append(CheckRecord("moment", label, dev, TOLERANCES["moment"]))
    return recs


def validate_state(spec: StateSpec, stage: Stage, with_oracle: bool = True,
                   variants: FormulaVariants = DEFAULT_VARIANTS,
                   cutoff: int | None = None, quad_order: int = 24) -> list:
    recs = normalization_checks(spec, stage, variants)
    if with_oracle:
        recs += oracle_checks(spec, stage, variants, cutoff, quad_order)
    return recs


# ---------------------------------------------------------------------------
# Arbitration

DECISIVE_ITEMS = ("normalization expansion point", "output PSTS kappa shift",
                  "output PSTS PND expansion point")

_W_POINTS = (0.0, 0.4 + 0.2j, -0.8 + 0.5j, 1.1 - 0.7j)


def _wigner_dev(spec, stage, variants, rho) -> float:
    return max(abs(quasiprob_point(spec, stage, k, a, variants)
                   - (oracle_wigner(rho, a) if k == 0 else oracle_q(rho, a)))
               for a in _W_POINTS for k in (0, -1))


def arbitrate() -> list:
    """Score each ambiguous expression against the oracle.

    Returns one :class:`ArbitrationRecord` per item with the maximal
    deviation of the accepted and rejected reading over a few states.
    """
    base = DEFAULT_VARIANTS
    out = []

    # Squeezed photon-added normalization: X = 1 - B versus v = B.
    specs = [StateSpec("PASTS", 0.5, 1, lam=0.3), StateSpec("PASTS", 0.2, 2, lam=0.2),
             StateSpec("PASTS", 1.0, 0, lam=0.4)]
    alt = replace(base, norm_point="B")
    acc = rej = 0.0
    for sp in specs:
        tr = unnormalized_trace(sp)
        acc = max(acc, abs(normalization(sp, base) - tr) / tr)
        rej = max(rej, abs(normalization(sp, alt) - tr) / tr)
    out.append(ArbitrationRecord("normalization expansion point", "X = 1 - B", "v = B",
                                 acc, rej))

    # Output PSTS quasi-probability: (kappa - 1)/2 versus (kappa + 1)/2.
    alt = replace(base, psts_output_kappa_sign=+1)
    acc = rej = 0.0
    for sp, st in ((StateSpec("PSTS", 0.5, 1), Stage.output(0.3)),
                   (StateSpec("PSTS", 1.0, 2), Stage.output(1.0))):
        rho = oracle_state(sp, st)
        acc = max(acc, _wigner_dev(sp, st, base, rho))
        rej = max(rej, _wigner_dev(sp, st, alt, rho))
    out.append(ArbitrationRecord("output PSTS kappa shift", "(kappa - 1)/2", "(kappa + 1)/2",
                                 acc, rej))

    # Output PSTS PND: generating function expanded at u = -1 versus u = 0.
    alt = replace(base, psts_output_pnd_u=0.0)
    acc = rej = 0.0
    for sp, st in ((StateSpec("PSTS", 0.5, 1), Stage.output(0.3)),
                   (StateSpec("PSTS", 0.1, 2), Stage.output(1.0))):
        rho = oracle_state(sp, st)
        for n in range(12):
            ref = oracle_pnd(rho, n)
            acc = max(acc, abs(pnd(sp, st, n, base) - ref))
            rej = max(rej, abs(pnd(sp, st, n, alt) - ref))
    out.append(ArbitrationRecord("output PSTS PND expansion point", "u = -1", "u = 0",
                                 acc, rej))

    # Photon-subtracted squeezed P: quadratic terms paired with alpha*^2 or alpha^2.
    alt = replace(base, pssts_swap=False)
    acc = rej = 0.0
    for sp, st in ((StateSpec("PSSTS", 0.2, 1, lam=0.3), Stage.input()),
                   (StateSpec("PSSTS", 0.2, 1, lam=0.3), Stage.output(0.3))):
        rho = oracle_state(sp, st)
        acc = max(acc, _wigner_dev(sp, st, base, rho))
        rej = max(rej, _wigner_dev(sp, st, alt, rho))
    out.append(ArbitrationRecord("PSSTS quadratic pairing", "A1 alpha*^2 + A2 alpha^2",
                                 "A1 alpha^2 + A2 alpha*^2", acc, rej))
    return out


def run_validation(level: str = "spot", with_arbitration: bool = True,
                   progress=None, with_oracle: bool = True,
                   cutoff: int | None = None, quad_order: int = 24) -> ValidationReport:
    """Run the lattice (``spot`` or ``full``) and optionally the arbitration.

    ``with_oracle=False`` keeps only the normalization checks.
    """
    report = ValidationReport()
    for spec, st in lattice(level):
        report.checks.extend(validate_state(spec, st, with_oracle, DEFAULT_VARIANTS,
                                            cutoff, quad_order))
        if progress is not None:
            progress(spec, st)
    if with_arbitration:
        report.arbitration = arbitrate()
    return report
