"""State catalog, derived coefficients and normalization constants.

Five non-Gaussian families are built from a thermal state with mean photon
number ``n_th``:

* ``PATS``   m photons added to a thermal state
* ``PSTS``   m photons subtracted from a thermal state
* ``PAKFTS`` m photons added to a thermal state whose Fock component k was
  removed
* ``PASTS``  m photons added to a squeezed thermal state
* ``PSSTS``  m photons subtracted from a squeezed thermal state

Normalization constants are traces of the unnormalized operators in the
conventions used by the closed forms:

* PATS / PAKFTS: ``a^dag^m :exp(-A a^dag a): a^m`` (thermal state divided by A)
* PSTS: ``a^m rho_th a^dag^m * n_th``
* PASTS / PSSTS: ``a^dag^m rho_s a^m`` and ``a^m rho_s a^dag^m``
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass


from .errors import InvalidParameterError, InvalidStateError, ZeroNormError
from .numkernel import Jet1, jet_inv_sqrt

__all__ = [
    "Variant",
    "StateSpec",
    "Stage",
    "ThermalCoeffs",
    "SqueezeCoeffs",
    "FormulaVariants",
    "DEFAULT_VARIANTS",
    "PRINTED_VARIANTS",
    "thermal_coeffs",
    "squeeze_coeffs",
    "normalization",
    "MAX_PHOTONS",
]

# Cap on m and k; keeps every factorial in the closed forms far from overflow.
MAX_PHOTONS = 20


class Variant(str, enum.Enum):
    PATS = "PATS"
    PSTS = "PSTS"
    PAKFTS = "PAKFTS"
    PASTS = "PASTS"
    PSSTS = "PSSTS"

    @classmethod
    def parse(cls, name) -> "Variant":
        if isinstance(name, Variant):
            return name
        try:
            return cls(str(name).upper())
        except ValueError:
            raise InvalidParameterError(f"unknown state variant {name!r}") from None

    @property
    def squeezed(self) -> bool:
        return self in (Variant.PASTS, Variant.PSSTS)

    @property
    def subtracted(self) -> bool:
        return self in (Variant.PSTS, Variant.PSSTS)


def _check_count(name, v):
    if isinstance(v, bool) or int(v) != v or v < 0:
        raise InvalidParameterError(f"{name} must be a non-negative integer, got {v!r}")
    if v > MAX_PHOTONS:
        raise InvalidParameterError(f"{name}={v} exceeds the cap {MAX_PHOTONS}")
    return int(v)


def _check_real(name, v):
    v = float(v)
    if not math.isfinite(v) or v < 0:
        raise InvalidParameterError(f"{name} must be finite and >= 0, got {v!r}")
    return v


@dataclass(frozen=True)
class StateSpec:
    """One member of the state catalog.

    Parameters
    ----------
    variant : Variant or str
    n_th : float
        Mean thermal photon number.
    m : int
        Number of added or subtracted photons.
    k : int
        Removed Fock component (PAKFTS only).
    lam : float
        Squeezing parameter (PASTS and PSSTS only).  Serialized as
        ``lambda``.
    """

    variant: Variant
    n_th: float
    m: int = 0
    k: int = 0
    lam: float = 0.0

    def __post_init__(self):
        v = Variant.parse(self.variant)
        object.__setattr__(self, "variant", v)
        object.__setattr__(self, "n_th", _check_real("n_th", self.n_th))
        object.__setattr__(self, "m", _check_count("m", self.m))
        object.__setattr__(self, "k", _check_count("k", self.k))
        object.__setattr__(self, "lam", _check_real("lambda", self.lam))
        if self.k and v is not Variant.PAKFTS:
            raise InvalidParameterError("k is only meaningful for PAKFTS")
        if self.lam and not v.squeezed:
            raise InvalidParameterError("lambda is only meaningful for squeezed variants")
        if v is Variant.PAKFTS and self.k > 0 and self.n_th == 0:
            raise InvalidParameterError("PAKFTS with k > 0 requires n_th > 0")

    def to_dict(self) -> dict:
        d = {"variant": self.variant.value, "n_th": self.n_th, "m": self.m}
        if self.variant is Variant.PAKFTS:
            d["k"] = self.k
        if self.variant.squeezed:
            d["lambda"] = self.lam
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "StateSpec":
        known = {"variant", "n_th", "m", "k", "lambda", "lam"}
        extra = set(d) - known
        if extra:
            raise InvalidParameterError(f"unknown state fields: {sorted(extra)}")
        lam = d.get("lambda", d.get("lam", 0.0))
        return cls(d["variant"], d.get("n_th", 0.0), d.get("m", 0), d.get("k", 0), lam)

    def replace(self, **changes) -> "StateSpec":
        d = asdict(self)
        d.update(changes)
        return StateSpec(**d)


@dataclass(frozen=True)
class Stage:
    """Where the state is observed: before the channel or after it.

    ``Stage.output(0.0)`` must reproduce the input in every readout.
    """

    kind: str = "input"
    s: float = 0.0

    def __post_init__(self):
        kind = str(self.kind).lower()
        if kind not in ("input", "output"):
            raise InvalidParameterError(f"stage kind must be input or output, got {self.kind!r}")
        s = _check_real("s", self.s)
        if kind == "input" and s != 0.0:
            raise InvalidParameterError("an input stage carries no noise parameter")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "s", s)

    @classmethod
    def input(cls) -> "Stage":
        return cls("input", 0.0)

    @classmethod
    def output(cls, s: float) -> "Stage":
        return cls("output", s)

    @property
    def noisy(self) -> bool:
        """True when the channel actually acts (output with s > 0)."""
        return self.kind == "output" and self.s > 0


@dataclass(frozen=True)
class ThermalCoeffs:
    A: float
    q: float


@dataclass(frozen=True)
class SqueezeCoeffs:
    A_s: float
    B: float
    C: float
    X: float


@dataclass(frozen=True)
class FormulaVariants:
    """Switches between printed and corrected readings of ambiguous formulas.

    Attributes
    ----------
    norm_point : {"1-B", "B"}
        Expansion point of the squeezed photon-added normalization.
    psts_output_kappa_sign : {-1, +1}
        Sign in the ``(kappa -+ 1)/2`` shift of the output photon-subtracted
        thermal quasi-probability.
    psts_output_pnd_u : float
        Expansion point of the output photon-subtracted thermal PND
        generating function.
    pssts_swap : bool
        Whether the quadratic terms of the photon-subtracted squeezed
        quasi-probability pair ``A1`` with ``alpha*^2`` (True) or with
        ``alpha^2`` as printed (False).
    """

    norm_point: str = "1-B"
    psts_output_kappa_sign: int = -1
    psts_output_pnd_u: float = -1.0
    pssts_swap: bool = True

    def __post_init__(self):
        if self.norm_point not in ("1-B", "B"):
            raise InvalidParameterError("norm_point must be '1-B' or 'B'")
        if self.psts_output_kappa_sign not in (-1, 1):
            raise InvalidParameterError("psts_output_kappa_sign must be -1 or +1")


# Oracle-validated readings (see the validation report) and the literal ones.
DEFAULT_VARIANTS = FormulaVariants()
PRINTED_VARIANTS = FormulaVariants(norm_point="B", psts_output_kappa_sign=1,
                                   psts_output_pnd_u=-1.0, pssts_swap=False)


def thermal_coeffs(n_th: float) -> ThermalCoeffs:
    """Return ``A = 1/(1+n_th)`` and ``q = n_th/(1+n_th)``."""
    n_th = float(n_th)
    if not math.isfinite(n_th) or n_th < 0:
        raise InvalidParameterError(f"n_th must be >= 0, got {n_th!r}")
    return ThermalCoeffs(A=1.0 / (1.0 + n_th), q=n_th / (1.0 + n_th))


def squeeze_coeffs(n_th: float, lam: float) -> SqueezeCoeffs:
    """Normal-ordering coefficients of the squeezed thermal state.

    The squeezed thermal state reads
    ``A_s^{-1/2} :exp(-X a^dag a + (C/2)(a^dag^2 + a^2)):`` with
    ``X = 1 - B``.
    """
    n_th = float(n_th)
    lam = float(lam)
    if not (math.isfinite(n_th) and math.isfinite(lam)) or n_th < 0 or lam < 0:
        raise InvalidParameterError("squeeze_coeffs needs n_th >= 0 and lambda >= 0")
    A_s = n_th ** 2 + (2 * n_th + 1) * math.cosh(lam) ** 2
    B = n_th * (n_th + 1) / A_s
    C = (2 * n_th + 1) * math.sinh(2 * lam) / (2 * A_s)
    X = 1.0 - B
    if not X * X - C * C > 0:
        raise InvalidStateError("degenerate squeeze coefficients (X^2 - C^2 <= 0)")
    return SqueezeCoeffs(A_s=A_s, B=B, C=C, X=X)


def pasts_norm_jet(sq: SqueezeCoeffs, m: int, variants: FormulaVariants = DEFAULT_VARIANTS):
    """Jet of ``(X^2 - C^2)^(-1/2)`` at the normalization expansion point."""
    x0 = sq.X if variants.norm_point == "1-B" else sq.B
    X = Jet1.variable(x0, m)
    return jet_inv_sqrt(X * X - sq.C ** 2)


def pssts_h_jet(sq: SqueezeCoeffs, u0, order: int) -> Jet1:
    """Jet of ``h(u) = ((1 - B u)^2 - C^2 u^2)^(-1/2)`` around ``u0``."""
    u = Jet1.variable(u0, order)
    return jet_inv_sqrt((1 - sq.B * u) ** 2 - sq.C ** 2 * u * u)


def normalization(spec: StateSpec, variants: FormulaVariants = DEFAULT_VARIANTS) -> float:
    """Trace of the unnormalized operator of ``spec``.

    Raises
    ------
    ZeroNormError
        If the unnormalized operator vanishes (photon subtraction from the
        vacuum, or a filtered state with no weight left).
    InvalidStateError
        If the printed expression gives a non-positive trace.
    """
    v = spec.variant
    m = spec.m
    if v is Variant.PATS:
        A = thermal_coeffs(spec.n_th).A
        return math.factorial(m) / A ** (m + 1)
    if v is Variant.PSTS:
        if spec.n_th == 0:
            raise ZeroNormError("photon-subtracted thermal state needs n_th > 0")
        return math.factorial(m) * spec.n_th ** (m + 1)
    if v is Variant.PAKFTS:
        tc = thermal_coeffs(spec.n_th)
        k = spec.k
        N = (math.factorial(m) / tc.A ** (m + 1)
             - tc.q ** k * math.factorial(m + k) / math.factorial(k))
        if not N > 1e-300:
            raise ZeroNormError(f"filtered state has non-positive trace N={N!r}")
        return N
    sq = squeeze_coeffs(spec.n_th, spec.lam)
    if v is Variant.PASTS:
        jet = pasts_norm_jet(sq, m, variants)
        N = (-1) ** m * jet.derivative(m).real / math.sqrt(sq.A_s)
    else:
        jet = pssts_h_jet(sq, 1.0, m)
        N = jet.derivative(m).real / math.sqrt(sq.A_s)
        if abs(N) < 1e-14 * math.factorial(m):
            raise ZeroNormError("photon subtraction from the vacuum")
    if not N > 0:
        raise InvalidStateError(f"non-positive normalization {N!r}")
    return float(N)
