"""Quasi-probabilities and photon statistics of non-Gaussian thermal-family
states before and after a Gaussian classical-noise channel.

The closed forms live in :mod:`ngchannel.quasiprob` and
:mod:`ngchannel.photstat`; :mod:`ngchannel.fockoracle` is an independent
truncated Fock-space reference used by :mod:`ngchannel.validation`.
"""

__version__ = "0.1.0"

from .analysis import (
    SweepTable,
    ThresholdResult,
    classify_statistics,
    sweep,
    wigner_center,
    wigner_center_threshold,
)
from .errors import (
    DivergentIntegralError,
    InvalidParameterError,
    InvalidStateError,
    NGChannelError,
    NotApplicableError,
    UndefinedStatisticError,
    ZeroNormError,
)
from .photstat import (
    PndResult,
    StatSummary,
    g2,
    mandel_q,
    mean_photon_number,
    moment,
    pnd,
    pnd_converged,
    pnd_full,
    stat_summary,
)
from .quasiprob import (
    KappaOrder,
    PhaseField,
    PhaseGrid,
    char_fn,
    convergence_guard,
    quasiprob_grid,
    quasiprob_point,
)
from .states import Stage, StateSpec, Variant, normalization

__all__ = [
    "__version__",
    "StateSpec",
    "Stage",
    "Variant",
    "normalization",
    "KappaOrder",
    "PhaseGrid",
    "PhaseField",
    "char_fn",
    "quasiprob_point",
    "quasiprob_grid",
    "convergence_guard",
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
    "ThresholdResult",
    "SweepTable",
    "wigner_center",
    "wigner_center_threshold",
    "sweep",
    "classify_statistics",
    "NGChannelError",
    "InvalidParameterError",
    "InvalidStateError",
    "ZeroNormError",
    "DivergentIntegralError",
    "UndefinedStatisticError",
    "NotApplicableError",
]
