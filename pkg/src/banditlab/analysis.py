"""Closed-form evaluation of regret upper bounds.

Asymptotic coefficients (limsup R_n / ln n) for all six policies, the
explicit finite-time bound for the pseudo-variance index policy, the
two-arm bound-ratio heatmap grids, and the constant regret add-on for
uncertain mean bounds. Pure computation throughout; heatmap cells may be
evaluated in parallel with deterministic assembly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .concentration import pseudo_variance, variance_profile
from .core import BanditInstance, BoundedWithFailure, MeanBounds, Support, prune, validate_instance
from .policies import kl_bernoulli, log_exploration

ALGORITHMS = ("glue", "ucb", "b-ucb", "kl-ucb", "b-kl-ucb", "ossb")


@dataclass(frozen=True)
class ArmPartition:
    """Split of the suboptimal arms by whether mu* clears u_k by delta."""

    k1: tuple[int, ...]
    k2: tuple[int, ...]
    best: int
    delta: float


@dataclass(frozen=True)
class BoundReport:
    algorithm: str
    asymptotic: float
    finite_time: tuple[tuple[int, float], ...] = ()


def _checked(instance: BanditInstance) -> BanditInstance:
    report = validate_instance(instance)
    if not report.ok:
        raise ValueError("invalid instance: " + "; ".join(report.violations))
    return instance


def _unique_best(instance: BanditInstance) -> int:
    means = instance.means
    star = max(means)
    ties = [k for k, m in enumerate(means) if m == star]
    if len(ties) > 1:
        raise ValueError(
            f"mean tie between arms {ties[0] + 1} and {ties[1] + 1}: "
            "the bound formulas require a unique best arm"
        )
    return ties[0]


def partition(instance: BanditInstance, delta: float = 0.0) -> ArmPartition:
    """K1(delta) = suboptimal arms with mu* > u_k + delta; K2(delta) the rest.

    Operates on the instance as given (call after pruning); raises on mean
    ties since the split needs a unique best arm.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    best = _unique_best(instance)
    star = instance.mu_star
    k1, k2 = [], []
    for k, arm in enumerate(instance.arms):
        if k == best:
            continue
        (k1 if star > arm.upper + delta else k2).append(k)
    return ArmPartition(tuple(k1), tuple(k2), best, delta)


def _normalized_algorithm(algorithm) -> str:
    name = getattr(algorithm, "name", algorithm)
    name = str(name).strip().lower()
    if name not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {name!r}; expected one of {ALGORITHMS}")
    return name


def asymptotic_bound(algorithm, instance: BanditInstance) -> float:
    """Asymptotic regret coefficient limsup R_n / ln n for one algorithm.

    Pruning is applied first; meta-pruned arms (u_k below mu*) contribute
    nothing for the clipping policies. Divergence terms d = +inf contribute
    zero; mean ties are rejected.
    """
    name = _normalized_algorithm(algorithm)
    _checked(instance)
    pruned = prune(instance.bounds)
    sub = instance.subset(pruned.retained)
    best = _unique_best(sub)
    star = sub.mu_star
    gaps = sub.gaps
    span = sub.support.span
    suboptimal = [k for k in range(sub.n_arms) if k != best]
    for k in suboptimal:
        if gaps[k] == 0.0:
            raise ValueError("zero suboptimality gap on a non-best arm")
    if name in ("kl-ucb", "b-kl-ucb", "ossb") and (sub.support.a, sub.support.b) != (0.0, 1.0):
        raise ValueError("KL-based bounds require Bernoulli rewards on support [0, 1]")
    k2 = set(partition(sub, 0.0).k2)

    if name == "ucb":
        return sum(2.0 / gaps[k] * span * span / 4.0 for k in suboptimal)
    if name == "b-ucb":
        return sum(2.0 / gaps[k] * span * span / 4.0 for k in suboptimal if k in k2)
    if name in ("kl-ucb", "b-kl-ucb", "ossb"):
        arms = suboptimal if name == "kl-ucb" else [k for k in suboptimal if k in k2]
        total = 0.0
        for k in arms:
            d = kl_bernoulli(sub.means[k], star)
            if math.isfinite(d):
                total += gaps[k] / d
        return total
    profile = variance_profile(sub.support, sub.bounds)
    return sum(2.0 * profile.pseudo_var[k] / gaps[k] for k in suboptimal if k in k2)


def default_delta_grid(instance: BanditInstance, n_points: int = 64) -> tuple[float, ...]:
    """Geometric grid spanning [1e-4 * min gap, max(mu* - u_k) + max gap]."""
    best = _unique_best(instance)
    gaps = [g for k, g in enumerate(instance.gaps) if k != best]
    if not gaps:
        return (1.0,)
    lo = 1e-4 * min(gaps)
    star = instance.mu_star
    head = max((star - arm.upper for arm in instance.arms), default=0.0)
    hi = max(head, 0.0) + max(gaps)
    return tuple(float(x) for x in np.geomspace(lo, hi, num=n_points))


def _finite_time_terms(sub: BanditInstance, n: int):
    """Per-arm (g, h, expected-pull) pieces of the explicit finite-time bound."""
    profile = variance_profile(sub.support, sub.bounds)
    c = np.asarray(profile.pseudo_var)
    sigma = np.asarray(profile.sigma_sq)
    best = _unique_best(sub)
    c1 = float(c[best])
    gaps = np.asarray(sub.gaps)
    lnf = log_exploration(n)
    g = c * lnf + np.sqrt(c * sigma * math.pi * lnf) + sigma
    with np.errstate(divide="ignore"):
        gap_sq = np.where(gaps > 0, gaps * gaps, np.inf)
        h = (
            3.0 * (20.0 * c1) ** (1.0 / 3.0) * g ** (2.0 / 3.0) / gap_sq
            + 3.0 * (5.0 * math.sqrt(2.0) * c1) ** (2.0 / 3.0) * g ** (1.0 / 3.0) / gap_sq
        )
        pulls = 1.0 + 5.0 * c1 / gap_sq + 2.0 * g / gap_sq + h
    return c1, g, h, pulls, best


def finite_time_bound(
    instance: BanditInstance, n: int, delta_grid=None
) -> float:
    """Explicit any-time regret bound at horizon n, minimized over delta.

    Arms with mu* > u_k + delta contribute the constant meta-pruning term
    5 c_1 Delta_k / max(delta, mu* - u_k)^2; the others contribute
    Delta_k (1 + 5 c_1 / Delta_k^2 + 2 g_k / Delta_k^2 + h_k) with
    g_k = c_k ln f(n) + sqrt(c_k sigma_k^2 pi ln f(n)) + sigma_k^2 and
    h_k = (3 (20 c_1)^{1/3} g_k^{2/3} + 3 (5 sqrt(2) c_1)^{2/3} g_k^{1/3})
    / Delta_k^2. The bound holds for every delta > 0, so the grid minimum is
    always a valid bound.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    _checked(instance)
    pruned = prune(instance.bounds)
    sub = instance.subset(pruned.retained)
    best = _unique_best(sub)
    if sub.n_arms == 1:
        return 0.0
    gaps = sub.gaps
    for k in range(sub.n_arms):
        if k != best and gaps[k] == 0.0:
            raise ValueError("zero suboptimality gap on a non-best arm")
    if delta_grid is None:
        delta_grid = default_delta_grid(sub)
    if not len(delta_grid):
        raise ValueError("empty delta grid")
    c1, _, _, pulls, _ = _finite_time_terms(sub, n)
    star = sub.mu_star
    best_value = math.inf
    for delta in delta_grid:
        if delta <= 0:
            raise ValueError("delta grid entries must be positive")
        split = partition(sub, float(delta))
        total = 0.0
        for k in split.k1:
            head = max(delta, star - sub.arms[k].upper)
            total += 5.0 * c1 * gaps[k] / (head * head)
        for k in split.k2:
            total += gaps[k] * float(pulls[k])
        best_value = min(best_value, total)
    return best_value


def finite_time_terms(instance: BanditInstance, n: int) -> dict:
    """Constituent per-arm terms of the finite-time bound (post-pruning order)."""
    _checked(instance)
    pruned = prune(instance.bounds)
    sub = instance.subset(pruned.retained)
    c1, g, h, pulls, best = _finite_time_terms(sub, n)
    return {
        "retained": pruned.retained,
        "best": best,
        "c1": c1,
        "g": tuple(float(x) for x in g),
        "h": tuple(float(x) for x in h),
        "expected_pull_bound": tuple(float(x) for x in pulls),
    }


def uncertain_bounds_addon(failure: BoundedWithFailure, n: int) -> float:
    """Extra regret n * sum_k p_k incurred when bounds hold only w.p. 1-p_k."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return n * sum(failure.failure_prob)


def heatmap(mu1_grid, mu2_grid, bounds: MeanBounds) -> np.ndarray:
    """Ratio of the pseudo-variance policy's asymptotic bound over the
    KL-clipping one on a two-arm Bernoulli grid.

    Cell (i, j) evaluates means (mu1_grid[i], mu2_grid[j]); cells with
    mu1 <= mu2 are NaN (no unique best arm 1). Grids must respect the
    declared bounds. Cells where the KL coefficient vanishes (mu1 = 1)
    evaluate to +inf.
    """
    if bounds.n_arms != 2:
        raise ValueError("heatmap expects exactly two arms")
    mu1 = np.asarray(mu1_grid, dtype=float)
    mu2 = np.asarray(mu2_grid, dtype=float)
    (l1, u1), (l2, u2) = bounds.arm(0), bounds.arm(1)
    if np.any((mu1 < l1) | (mu1 > u1)) or np.any((mu2 < l2) | (mu2 > u2)):
        raise ValueError("grid values must lie within the declared mean bounds")
    sup = Support(0.0, 1.0)
    l_max = bounds.l_max
    c2 = pseudo_variance(sup, l2, u2, l_max)
    out = np.full((len(mu1), len(mu2)), np.nan)
    for i, m1 in enumerate(mu1):
        for j, m2 in enumerate(mu2):
            if m1 <= m2:
                continue
            delta = m1 - m2
            if u2 < l_max or m1 > u2:  # arm 2 pruned or meta-pruned: both bounds 0
                continue
            glue = 2.0 * c2 / delta
            d = kl_bernoulli(m2, m1)
            out[i, j] = math.inf if not math.isfinite(d) or d == 0.0 else glue * d / delta
    return out


def write_heatmap_csv(mu1_grid, mu2_grid, ratios: np.ndarray, path) -> None:
    """Heatmap CSV with columns mu1,mu2,ratio; empty ratio for blank cells."""
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["mu1", "mu2", "ratio"])
        for i, m1 in enumerate(mu1_grid):
            for j, m2 in enumerate(mu2_grid):
                r = ratios[i, j]
                writer.writerow(
                    [repr(float(m1)), repr(float(m2)), "" if math.isnan(r) else repr(float(r))]
                )


def bound_report(instance: BanditInstance, n_list=()) -> list[BoundReport]:
    """Asymptotic coefficients for every algorithm plus finite-time values
    for the pseudo-variance policy at the requested horizons."""
    reports = []
    finite = tuple((int(n), finite_time_bound(instance, int(n))) for n in n_list)
    for name in ALGORITHMS:
        reports.append(
            BoundReport(
                algorithm=name,
                asymptotic=asymptotic_bound(name, instance),
                finite_time=finite if name == "glue" else (),
            )
        )
    return reports
