"""Arm-selection policies behind a single sequential select/update interface.

Six policies share the interface: the bonus-index family (glue, ucb, b-ucb),
the Bernoulli-KL family (kl-ucb, b-kl-ucb), and the certainty-equivalence
allocation policy (ossb). All index policies share one exploration schedule
f(t) = 1 + t ln(t)^2 so that regret differences are attributable to index
construction alone.

A ``PolicyState`` is single-threaded: select and update must alternate on one
logical thread. Distinct states are independent and may run concurrently.

Index kernels operate on arrays whose last axis ranges over arms, so the
sequential state (shape ``(K,)``) and the batched simulation engine (shape
``(n_seeds, K)``) execute the exact same floating-point operations; replays
are bit-identical across both drivers.

Selection rule: highest clipped index wins; exact ties are broken by the
unclipped index (unplayed arms count as +inf) and then by lowest arm id. The
secondary key makes "glue with trivial bounds" reproduce the standard-UCB arm
sequence exactly, forced round-robin over unplayed arms included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .concentration import variance_profile
from .core import MeanBounds, Support

POLICY_NAMES = ("glue", "ucb", "b-ucb", "kl-ucb", "b-kl-ucb", "ossb")

# Stable small-integer registry used by the simulator's RNG stream splitting.
POLICY_CODES = {name: i + 1 for i, name in enumerate(POLICY_NAMES)}

KLUCB_BISECT_ITERS = 40  # interval shrinks below 1e-12 < the 1e-9 contract


@dataclass(frozen=True)
class PolicyKind:
    """A policy name plus the OSSB tuning parameters (ignored elsewhere)."""

    name: str
    ossb_eps: float = 0.0
    ossb_gamma: float = 0.0

    def __post_init__(self) -> None:
        if self.name not in POLICY_NAMES:
            raise ValueError(f"unknown policy {self.name!r}; expected one of {POLICY_NAMES}")
        if self.ossb_eps < 0 or self.ossb_gamma < 0:
            raise ValueError("OSSB parameters must be nonnegative")

    @classmethod
    def parse(cls, text: str, ossb_eps: float = 0.0, ossb_gamma: float = 0.0) -> "PolicyKind":
        name = text.strip().lower()
        if name == "ossb":
            return cls(name, ossb_eps=ossb_eps, ossb_gamma=ossb_gamma)
        return cls(name)

    @property
    def clips(self) -> bool:
        return self.name in ("glue", "b-ucb", "b-kl-ucb")

    @property
    def uses_kl(self) -> bool:
        return self.name in ("kl-ucb", "b-kl-ucb")


def parse_policies(spec: str, ossb_eps: float = 0.0, ossb_gamma: float = 0.0) -> tuple[PolicyKind, ...]:
    """Parse a comma-separated policy list such as ``glue,ucb,b-kl-ucb``."""
    kinds = tuple(
        PolicyKind.parse(part, ossb_eps, ossb_gamma) for part in spec.split(",") if part.strip()
    )
    if not kinds:
        raise ValueError("no policies given")
    return kinds


# ---------------------------------------------------------------------------
# Exploration schedule
# ---------------------------------------------------------------------------


def exploration_function(t: int | float) -> float:
    """f(t) = 1 + t ln(t)^2 for t >= 1, with f(0) = 1 (continuous limit)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t <= 1:
        return 1.0
    lt = math.log(t)
    return 1.0 + t * lt * lt


def log_exploration(t: int | float) -> float:
    """ln f(t), evaluated stably for arbitrarily large t."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t <= 1:
        return 0.0
    lt = math.log(t)
    if lt > 1.0:
        asymptotic = lt + 2.0 * math.log(lt)
        if asymptotic > 700.0:  # t ln(t)^2 would overflow a double
            return asymptotic
    return math.log1p(t * lt * lt)


# ---------------------------------------------------------------------------
# Scalar index operations
# ---------------------------------------------------------------------------


def glue_index(mean: float, pulls: int, c: float, u: float, t: int) -> float:
    """min(u, mean + sqrt(2 c ln f(t+1) / pulls)) for an arm pulled >= 1 times."""
    if pulls < 1:
        raise ValueError("glue_index requires pulls >= 1; unplayed arms sit at their upper bound")
    return min(u, mean + math.sqrt(2.0 * c * log_exploration(t + 1) / pulls))


def kl_bernoulli(p: float, q: float) -> float:
    """Bernoulli KL divergence d(p, q) with the 0 ln 0 = 0 convention.

    Returns +inf when q lies on the boundary and p differs.
    """
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise ValueError("kl_bernoulli arguments must lie in [0, 1]")
    if p == 0.0:
        term1 = 0.0
    elif q == 0.0:
        return math.inf
    else:
        term1 = p * math.log(p / q)
    if p == 1.0:
        term2 = 0.0
    elif q == 1.0:
        return math.inf
    else:
        term2 = (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return term1 + term2


def klucb_index(mean: float, pulls: int, t: int, u_clip: float | None = None) -> float:
    """sup{q in [mean, 1] : pulls * d(mean, q) <= ln f(t+1)}, by bisection.

    Operates on the [0, 1] Bernoulli scale; callers with a general support
    rescale first. ``u_clip`` truncates the index (the b-kl-ucb variant).
    """
    if pulls < 1:
        raise ValueError("klucb_index requires pulls >= 1")
    if not 0.0 <= mean <= 1.0:
        raise ValueError("mean must lie in [0, 1] after rescaling")
    lf = log_exploration(t + 1)
    q = float(klucb_indices01(np.array([mean]), np.array([pulls]), lf)[0])
    return q if u_clip is None else min(u_clip, q)


def ossb_allocation(theta_hat, bounds: MeanBounds) -> np.ndarray:
    """Closed-form Bernoulli exploration allocation for truncated means.

    eta(k) is zero for the empirical best arm, for arms whose upper bound lies
    below the empirical best mean (no confusing instance exists), and for
    degenerate exact ties; otherwise 1 / d(theta_k, theta_best).
    """
    theta = np.asarray(theta_hat, dtype=float)
    lower = np.asarray(bounds.lower, dtype=float)
    upper = np.asarray(bounds.upper, dtype=float)
    if theta.shape != lower.shape:
        raise ValueError("theta_hat and bounds must cover the same arms")
    if np.any((theta < lower) | (theta > upper)):
        raise ValueError("theta_hat must already be truncated into [l_k, u_k]")
    if np.any((theta < 0.0) | (theta > 1.0)):
        raise ValueError("allocation operates on the [0, 1] Bernoulli scale")
    best = int(theta.argmax())
    return _allocation_from_theta(theta, upper, best)


# ---------------------------------------------------------------------------
# Array kernels (last axis = arms); shared by PolicyState and the batch engine
# ---------------------------------------------------------------------------


def empirical_means(sums: np.ndarray, pulls: np.ndarray) -> np.ndarray:
    """Per-arm empirical means, 0.0 placeholder where an arm is unplayed."""
    return np.where(pulls > 0, sums / np.maximum(pulls, 1), 0.0)


def bonus_indices(mu_hat: np.ndarray, pulls: np.ndarray, c, lf: float) -> np.ndarray:
    """mu + sqrt(2 c ln f / T); +inf for unplayed arms."""
    with np.errstate(divide="ignore"):
        raw = mu_hat + np.sqrt(2.0 * c * lf / np.maximum(pulls, 1))
    return np.where(pulls > 0, raw, np.inf)


def kl_bernoulli_array(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Elementwise Bernoulli KL with the same edge conventions as kl_bernoulli."""
    with np.errstate(divide="ignore", invalid="ignore"):
        term1 = np.where(p > 0.0, p * np.log(p / q), 0.0)
        term2 = np.where(p < 1.0, (1.0 - p) * np.log((1.0 - p) / (1.0 - q)), 0.0)
    return term1 + term2


def klucb_indices01(mu01: np.ndarray, pulls: np.ndarray, lf: float) -> np.ndarray:
    """Vectorized KL-UCB bisection on the [0, 1] scale; +inf for unplayed arms."""
    safe_pulls = np.maximum(pulls, 1)
    lo = np.array(mu01, dtype=float, copy=True)
    hi = np.ones_like(lo)
    for _ in range(KLUCB_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        ok = safe_pulls * kl_bernoulli_array(mu01, mid) <= lf
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return np.where(pulls > 0, lo, np.inf)


def lex_argmax(primary: np.ndarray, secondary: np.ndarray) -> np.ndarray:
    """argmax of ``primary``; exact ties broken by ``secondary``, then lowest id."""
    top = primary.max(axis=-1, keepdims=True)
    masked = np.where(primary == top, secondary, -np.inf)
    return masked.argmax(axis=-1)


def _allocation_from_theta(theta: np.ndarray, upper: np.ndarray, best) -> np.ndarray:
    """eta(k) over the last axis given truncated means and the best-arm index."""
    best_idx = np.asarray(best)
    theta_star = np.take_along_axis(theta, best_idx[..., None], axis=-1)
    d = kl_bernoulli_array(theta, theta_star)
    arm_ids = np.arange(theta.shape[-1])
    eligible = (arm_ids != best_idx[..., None]) & (theta_star <= upper) & (d > 0.0)
    with np.errstate(divide="ignore"):
        return np.where(eligible, 1.0 / d, 0.0)


def ossb_step(
    mu01: np.ndarray,
    pulls: np.ndarray,
    lower01: np.ndarray,
    upper01: np.ndarray,
    eps: float,
    gamma: float,
    explore_count: np.ndarray,
    t_round: int,
) -> tuple[np.ndarray, np.ndarray]:
    """One certainty-equivalence decision; returns (choice, new explore count).

    The loop structure is the standard one for allocation-tracking policies:
    unplayed arms are served first (they are maximally under-allocated); once
    every arm has a sample, the empirical best arm is exploited whenever every
    suboptimal arm k satisfies T_k >= (1+gamma) eta(k) ln t, and otherwise an
    exploration round either forces the least-pulled arm (when its count has
    fallen to an eps fraction of the exploration rounds so far) or serves the
    most under-allocated arm.
    """
    unplayed = pulls == 0
    any_unplayed = unplayed.any(axis=-1)
    first_unplayed = unplayed.argmax(axis=-1)

    theta = np.minimum(upper01, np.maximum(lower01, mu01))
    best = theta.argmax(axis=-1)
    eta = _allocation_from_theta(theta, upper01, best)
    required = (1.0 + gamma) * eta * math.log(t_round)
    deficit = required - pulls
    exploit = (deficit <= 0.0).all(axis=-1)

    new_count = np.where(any_unplayed | exploit, explore_count, explore_count + 1)
    forced = pulls.min(axis=-1) <= eps * new_count
    choice = np.where(exploit, best, np.where(forced, pulls.argmin(axis=-1), deficit.argmax(axis=-1)))
    choice = np.where(any_unplayed, first_unplayed, choice)
    return choice, new_count


# ---------------------------------------------------------------------------
# Sequential policy state
# ---------------------------------------------------------------------------


class PolicyState:
    """Mutable per-episode state of one policy on a pruned arm set.

    Construct from the post-pruning bounds; pruning itself lives in the core
    module and is applied by the simulator before play starts.
    """

    def __init__(self, kind: PolicyKind, support: Support, bounds: MeanBounds):
        if bounds.n_arms == 0:
            raise ValueError("empty arm set")
        self.kind = kind
        self.support = support
        self.lower = np.asarray(bounds.lower, dtype=float)
        self.upper = np.asarray(bounds.upper, dtype=float)
        profile = variance_profile(support, bounds)
        self.sigma_sq = np.asarray(profile.sigma_sq)
        self.pseudo_var = np.asarray(profile.pseudo_var)
        span = support.span
        if kind.name == "glue":
            self.c = self.pseudo_var
        elif kind.name in ("ucb", "b-ucb"):
            self.c = np.full(bounds.n_arms, span * span / 4.0)
        else:
            self.c = None
        self._clip = self.upper if kind.clips else np.full(bounds.n_arms, np.inf)
        # [0, 1]-rescaled quantities for the Bernoulli-surrogate policies.
        self._lower01 = (self.lower - support.a) / span
        self._upper01 = (self.upper - support.a) / span
        self.pulls = np.zeros(bounds.n_arms, dtype=np.int64)
        self.reward_sum = np.zeros(bounds.n_arms, dtype=float)
        self.t = 0
        self._ossb_explore = np.zeros(1, dtype=np.int64)
        self.ossb_eta = np.zeros(bounds.n_arms, dtype=float)

    @property
    def n_arms(self) -> int:
        return len(self.pulls)

    @property
    def empirical_mean(self) -> np.ndarray:
        """mu_hat_k where defined (pulls >= 1), NaN elsewhere."""
        return np.where(self.pulls > 0, self.reward_sum / np.maximum(self.pulls, 1), np.nan)

    def _index_pair(self) -> tuple[np.ndarray, np.ndarray]:
        """(clipped, raw) index arrays against f(t+1)."""
        lf = log_exploration(self.t + 1)
        mu = empirical_means(self.reward_sum, self.pulls)
        if self.kind.uses_kl:
            mu01 = (mu - self.support.a) / self.support.span
            raw = self.support.a + self.support.span * klucb_indices01(mu01, self.pulls, lf)
        else:
            raw = bonus_indices(mu, self.pulls, self.c, lf)
        return np.minimum(self._clip, raw), raw

    @property
    def indices(self) -> np.ndarray:
        """Current indices U_k(t): clipped for the bound-aware policies,
        +inf on unplayed arms for the unclipped ones."""
        return self._index_pair()[0]

    def select(self) -> int:
        """Arm to play at step t+1."""
        if self.kind.name == "ossb":
            mu = empirical_means(self.reward_sum, self.pulls)
            mu01 = (mu - self.support.a) / self.support.span
            choice, self._ossb_explore = ossb_step(
                mu01[None, :],
                self.pulls[None, :],
                self._lower01,
                self._upper01,
                self.kind.ossb_eps,
                self.kind.ossb_gamma,
                self._ossb_explore,
                self.t + 1,
            )
            theta = np.minimum(self._upper01, np.maximum(self._lower01, mu01))
            self.ossb_eta = _allocation_from_theta(theta, self._upper01, int(theta.argmax()))
            return int(choice[0])
        clipped, raw = self._index_pair()
        return int(lex_argmax(clipped, raw))

    def update(self, arm: int, reward: float) -> None:
        """Record the reward of the arm just played."""
        if not self.support.contains(reward):
            raise ValueError(
                f"reward {reward} outside support [{self.support.a}, {self.support.b}]"
            )
        self.pulls[arm] += 1
        self.reward_sum[arm] += reward
        self.t += 1
