"""Improved Chernoff-Hoeffding machinery for bounded rewards with mean bounds.

All variance quantities are computed in normalized coordinates: with
theta = (x - a)/(b - a), the weight function is evaluated on [0, 1] and the
resulting dimensionless product B(theta) * theta * (1 - theta) is scaled by
(b - a)**2. This convention is affine-invariant and coincides with the raw
formulas on [0, 1].

The constants 0.2178 and 0.7822 delimit the regimes in which one-sided mean
bounds sharpen the sub-Gaussian variance parameter. 0.2178 is (to the printed
precision) the fixed point of t = 1/(1 + e^(1/(1-t))), the point at which the
weighted variance B(t) * t * (1-t) equals the uninformative 1/4.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import MeanBounds, Support

THETA_STAR = 0.2178

_POLE_TOL = 1e-12


class TailRegime(enum.Enum):
    LOWER_BOUND_INFORMATIVE = "lower-bound-informative"
    UPPER_BOUND_INFORMATIVE = "upper-bound-informative"
    UNINFORMATIVE = "uninformative"


def _b01(theta: float) -> float:
    """Normalized weight B(theta) = e^r / (1 - theta + theta e^r)^2, r = 1/(1-theta).

    Evaluated in log space so large r neither overflows nor loses the
    B -> e^(-r)/theta^2 decay near theta = 1.
    """
    r = 1.0 / (1.0 - theta)
    if theta == 0.0:
        return math.exp(r)
    log_denom = np.logaddexp(math.log1p(-theta), math.log(theta) + r)
    return math.exp(r - 2.0 * log_denom)


def b_factor(support: Support, x: float) -> float:
    """Weight B_{a,b}(x), the normalized B evaluated at (x-a)/(b-a), over (b-a).

    x = b is a pole of the defining expression; arguments within 1e-12 of b
    (relative to the span) are rejected. Callers inside this module only ever
    evaluate B strictly inside the support.
    """
    a, b = support.a, support.b
    span = support.span
    if x < a or x > b:
        raise ValueError(f"b_factor argument {x} outside support [{a}, {b}]")
    if b - x <= _POLE_TOL * span:
        raise ValueError(f"b_factor argument {x} too close to the pole at b = {b}")
    theta = (x - a) / span
    return _b01(theta) / span


def _check_bounds(support: Support, l: float, u: float) -> None:
    if not (support.a <= l <= u <= support.b):
        raise ValueError(
            f"invalid mean bounds [{l}, {u}] for support [{support.a}, {support.b}]"
        )


def lower_bound_informative(support: Support, l: float) -> bool:
    """True iff l >= 0.2178 a + 0.7822 b."""
    return l >= 0.2178 * support.a + 0.7822 * support.b


def upper_bound_informative(support: Support, u: float) -> bool:
    """True iff u <= 0.7822 a + 0.2178 b."""
    return u <= 0.7822 * support.a + 0.2178 * support.b


def sigma_regime(support: Support, l: float, u: float) -> TailRegime:
    """Which branch of the variance-bound formula applies to bounds (l, u)."""
    _check_bounds(support, l, u)
    if lower_bound_informative(support, l):
        return TailRegime.LOWER_BOUND_INFORMATIVE
    if upper_bound_informative(support, u):
        return TailRegime.UPPER_BOUND_INFORMATIVE
    return TailRegime.UNINFORMATIVE


def variance_bound(support: Support, l: float, u: float) -> float:
    """Sub-Gaussian variance parameter sigma^2 implied by mean bounds (l, u).

    Informative branches evaluate B(theta) * theta * (1-theta) * (b-a)^2 with
    theta = (b-l)/(b-a) (lower bound informative) or theta = (u-a)/(b-a)
    (upper bound informative); otherwise the Hoeffding value (b-a)^2 / 4.
    """
    regime = sigma_regime(support, l, u)
    span = support.span
    if regime is TailRegime.LOWER_BOUND_INFORMATIVE:
        theta = (support.b - l) / span
    elif regime is TailRegime.UPPER_BOUND_INFORMATIVE:
        theta = (u - support.a) / span
    else:
        return span * span / 4.0
    return _b01(theta) * theta * (1.0 - theta) * span * span


def global_underexplore(support: Support, l_max: float) -> bool:
    """True iff the largest lower bound pins down the best arm's variance."""
    return lower_bound_informative(support, l_max)


def pseudo_variance(support: Support, l: float, u: float, l_max: float) -> float:
    """Exploration scale c_k for an arm with bounds (l, u) given l_max.

    In the global under-exploration regime every arm shares the variance value
    implied by l_max; otherwise c_k falls back to the arm's own sigma^2.
    """
    _check_bounds(support, l, u)
    if not l <= l_max <= support.b:
        raise ValueError(f"l_max {l_max} must lie in [l, b] = [{l}, {support.b}]")
    if global_underexplore(support, l_max):
        span = support.span
        theta = (support.b - l_max) / span
        return _b01(theta) * theta * (1.0 - theta) * span * span
    return variance_bound(support, l, u)


@dataclass(frozen=True)
class VarianceProfile:
    """Per-arm sigma^2 and c_k together with the regime bookkeeping."""

    sigma_sq: tuple[float, ...]
    pseudo_var: tuple[float, ...]
    regimes: tuple[TailRegime, ...]
    l_max: float
    global_underexplore: bool


def variance_profile(support: Support, bounds: MeanBounds) -> VarianceProfile:
    """Evaluate sigma_k^2 and c_k for every arm of a (pruned) bound set."""
    l_max = bounds.l_max
    sigma = tuple(variance_bound(support, lo, hi) for lo, hi in zip(bounds.lower, bounds.upper))
    c = tuple(
        pseudo_variance(support, lo, hi, l_max) for lo, hi in zip(bounds.lower, bounds.upper)
    )
    regimes = tuple(sigma_regime(support, lo, hi) for lo, hi in zip(bounds.lower, bounds.upper))
    return VarianceProfile(
        sigma_sq=sigma,
        pseudo_var=c,
        regimes=regimes,
        l_max=l_max,
        global_underexplore=global_underexplore(support, l_max),
    )


def upper_tail_regime(support: Support, l: float, u: float) -> TailRegime:
    _check_bounds(support, l, u)
    if l >= support.midpoint:
        return TailRegime.LOWER_BOUND_INFORMATIVE
    if upper_bound_informative(support, u):
        return TailRegime.UPPER_BOUND_INFORMATIVE
    return TailRegime.UNINFORMATIVE


def lower_tail_regime(support: Support, l: float, u: float) -> TailRegime:
    _check_bounds(support, l, u)
    if u <= support.midpoint:
        return TailRegime.UPPER_BOUND_INFORMATIVE
    if lower_bound_informative(support, l):
        return TailRegime.LOWER_BOUND_INFORMATIVE
    return TailRegime.UNINFORMATIVE


def _tail_value(variance: float, n: int, eps: float) -> float:
    if n < 1:
        raise ValueError("sample count must be >= 1")
    p = math.exp(-n * eps * eps / (2.0 * variance))
    return min(1.0, max(0.0, p))


def upper_tail_bound(support: Support, l: float, u: float, n: int, eps: float) -> float:
    """Bound on P(empirical mean - mu >= eps) for any mean in [l, u].

    The informative branches require eps <= u - l; for larger eps the function
    silently falls back to the unconditionally valid uninformative bound.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    regime = upper_tail_regime(support, l, u)
    span = support.span
    a, b = support.a, support.b
    if eps <= u - l and regime is TailRegime.LOWER_BOUND_INFORMATIVE:
        variance = (l - a) * (b - l)
        if variance == 0.0:
            # degenerate l = a = midpoint cannot occur (a < b); l = b means mu = b
            return 1.0 if eps == 0.0 else 0.0
    elif eps <= u - l and regime is TailRegime.UPPER_BOUND_INFORMATIVE:
        theta = (u - a) / span
        if theta == 0.0:
            return 1.0 if eps == 0.0 else 0.0
        variance = _b01(theta) * theta * (1.0 - theta) * span * span
    else:
        variance = span * span / 4.0
    return _tail_value(variance, n, eps)


def lower_tail_bound(support: Support, l: float, u: float, n: int, eps: float) -> float:
    """Bound on P(empirical mean - mu <= -eps), mirror of the upper tail."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    regime = lower_tail_regime(support, l, u)
    span = support.span
    a, b = support.a, support.b
    if eps <= u - l and regime is TailRegime.UPPER_BOUND_INFORMATIVE:
        variance = (u - a) * (b - u)
        if variance == 0.0:
            return 1.0 if eps == 0.0 else 0.0
    elif eps <= u - l and regime is TailRegime.LOWER_BOUND_INFORMATIVE:
        theta = (b - l) / span
        if theta == 0.0:
            return 1.0 if eps == 0.0 else 0.0
        variance = _b01(theta) * theta * (1.0 - theta) * span * span
    else:
        variance = span * span / 4.0
    return _tail_value(variance, n, eps)


def hoeffding_ci_halfwidth(failure_prob: float, n: int, support: Support) -> float:
    """Symmetric Hoeffding half-width (b-a) * sqrt(ln(2/p) / (2n))."""
    if not 0.0 < failure_prob < 1.0:
        raise ValueError("failure probability must lie strictly in (0, 1)")
    if n < 1:
        raise ValueError("sample count must be >= 1")
    return support.span * math.sqrt(math.log(2.0 / failure_prob) / (2.0 * n))
