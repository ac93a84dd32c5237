"""Correlation-decay classification and reference states with known order.

The classifier fits the tail of a correlation profile with both a power law
(log v = a - p log r) and an exponential (log v = a - kappa r) and applies
fixed rules, documented here because they define the artifact's behaviour:

1. If every |value| is below 1e-12 the profile is `short_range`
   (zero signal, no fits reported).
2. Fits use the tail window r >= ceil(r_max / 4); values below 1e-15 are
   dropped; fewer than 4 usable points also means `short_range` with no fits.
3. `long_range` when the fitted exponent is below 0.05 and the tail plateau
   stays above 1e-10.
4. `quasi_long_range` when the power law fits at least as well as the
   exponential (RMS log-residual) and the exponent is below 2.
5. Otherwise `short_range`.

GHZ states (symmetric long-range sigma-z order, zero transverse signal) and
truncated coherent product states (finite transverse "order" without any
entanglement) are the counterexamples separating order diagnostics from
entanglement diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Optional, Sequence

import numpy as np

from xxcrit import freefermion as ff
from xxcrit.errors import ResourceLimitError, ValidationError
from xxcrit.hilbert import QuantumState, SpinChainSpec

CLASSIFICATIONS = ("long_range", "quasi_long_range", "short_range")

_ZERO_SIGNAL = 1e-12
_FIT_FLOOR = 1e-15
_PLATEAU_FLOOR = 1e-10
_LRO_EXPONENT = 0.05
_QLRO_EXPONENT = 2.0


@dataclass
class DecayProfile:
    points: list[tuple[int, float]]
    fit_poly: Optional[tuple[float, float]]  # (exponent, rms log-residual)
    fit_exp: Optional[tuple[float, float]]   # (rate, rms log-residual)
    classification: str

    def __post_init__(self) -> None:
        if self.classification not in CLASSIFICATIONS:
            raise ValidationError(
                f"classification must be one of {CLASSIFICATIONS}, got {self.classification!r}"
            )


def _tail_fit(x: np.ndarray, logv: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(x, logv, 1)
    resid = logv - (slope * x + intercept)
    return float(-slope), float(np.sqrt(np.mean(resid**2)))


def classify_decay(points: Sequence[tuple[int, float]]) -> DecayProfile:
    """Apply the decay rules in the module docstring to (r, value) points."""
    pts = [(int(r), float(v)) for r, v in points]
    if len(pts) < 2:
        raise ValidationError("need at least two profile points")
    if any(r <= 0 for r, _ in pts):
        raise ValidationError("separations must be positive")
    r = np.array([p[0] for p in pts], dtype=float)
    v = np.abs(np.array([p[1] for p in pts]))

    if v.max() < _ZERO_SIGNAL:
        return DecayProfile(pts, None, None, "short_range")

    r_max = int(r.max())
    window = (r >= math.ceil(r_max / 4)) & (v > _FIT_FLOOR)
    if window.sum() < 4:
        return DecayProfile(pts, None, None, "short_range")

    rw, vw = r[window], v[window]
    logv = np.log(vw)
    exponent, poly_rms = _tail_fit(np.log(rw), logv)
    rate, exp_rms = _tail_fit(rw, logv)
    fit_poly = (exponent, poly_rms)
    fit_exp = (rate, exp_rms)

    tail = vw[rw >= np.quantile(rw, 0.75)]
    if exponent < _LRO_EXPONENT and tail.mean() > _PLATEAU_FLOOR:
        cls = "long_range"
    elif poly_rms <= exp_rms and -0.1 <= exponent < _QLRO_EXPONENT:
        cls = "quasi_long_range"
    else:
        cls = "short_range"
    return DecayProfile(pts, fit_poly, fit_exp, cls)


def correlation_profile(spec: SpinChainSpec, r_max: int, solver: str = "auto") -> DecayProfile:
    """Transverse correlator profile <sigma^x_0 sigma^x_r> up to r_max, classified.

    r_max >= 8 so the tail window holds enough points for the fits.
    """
    if not isinstance(r_max, (int, np.integer)) or r_max < 8:
        raise ValidationError(f"r_max must be an int >= 8 for classification, got {r_max!r}")
    corr = ff.nn_correlators(spec, solver=solver, r_max=r_max)
    return classify_decay(corr.transverse_profile)


def ghz_state(n: int) -> QuantumState:
    """(|00...0> + |11...1>)/sqrt(2) on n sites, 2 <= n <= 12."""
    if not isinstance(n, (int, np.integer)) or not 2 <= n <= 12:
        raise ValidationError(f"ghz_state supports 2 <= n <= 12, got {n!r}")
    amp = np.zeros(2**n)
    amp[0] = amp[-1] = 1.0 / math.sqrt(2.0)
    return QuantumState(kind="pure", amplitudes=amp)


def coherent_product_state(alpha: float, n_sites: int, n_max: int) -> QuantumState:
    """Product of truncated coherent states |alpha> with per-site cutoff n_max.

    Every cut of a product state has zero entanglement entropy, yet
    <b+_i b_j> = |alpha|^2 for all pairs: transverse "order" without any
    entanglement.  Truncation error stays negligible while
    |alpha|^2 <= n_max / 4 (guarded).
    """
    if not isinstance(n_sites, (int, np.integer)) or n_sites < 2:
        raise ValidationError(f"n_sites must be an int >= 2, got {n_sites!r}")
    if not isinstance(n_max, (int, np.integer)) or n_max < 1:
        raise ValidationError(f"n_max must be an int >= 1, got {n_max!r}")
    alpha = float(alpha)
    if alpha**2 > n_max / 4.0:
        raise ValidationError(
            f"|alpha|^2 = {alpha**2:.3g} exceeds n_max/4 = {n_max / 4:.3g};"
            " the truncated state would differ measurably from a coherent state"
        )
    dim = (n_max + 1) ** n_sites
    if dim > 2**20:
        raise ResourceLimitError(f"coherent product dimension {dim} exceeds 2^20")
    ns = np.arange(n_max + 1)
    local = alpha**ns / np.sqrt(
        np.array([math.factorial(int(k)) for k in ns], dtype=float)
    )
    local /= np.linalg.norm(local)
    full = reduce(np.kron, [local] * n_sites)
    return QuantumState(kind="pure", amplitudes=full)


def bose_annihilation(n_max: int) -> np.ndarray:
    """Truncated single-site annihilation operator b|n> = sqrt(n)|n-1>."""
    return np.diag(np.sqrt(np.arange(1.0, n_max + 1)), k=1)
