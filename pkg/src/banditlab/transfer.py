"""Knowledge transfer from confounded oracle logs.

An oracle sees the full context (z, u), always plays the best arm for it, and
logs (z, action, reward) with u omitted. Given separation gaps that hold
uniformly over the hidden context, the per-(arm, visible-context) statistics
readable off such a log pin the agent-space means mu_{k,z} into an interval
[l_{k,z}, u_{k,z}]; this module computes those intervals, their finite-log
widenings, and the extremal instances that attain them.

Statistics computation and bound derivation are pure; log sampling owns a
seeded generator per call. Everything is safe to run concurrently on
distinct inputs.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .concentration import hoeffding_ci_halfwidth
from .core import MeanBounds, Support

_UNIT = Support(0.0, 1.0)


class LogRecord(NamedTuple):
    """One row of the oracle's dataset: visible context, action, reward."""

    z: str
    k: int
    y: float


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LatentInstance:
    """The oracle's world: hidden/visible contexts and the full mean table.

    ``means`` has shape (arms, visible contexts, hidden contexts). Every
    (z, u) cell must have a strictly unique best arm.
    """

    z_labels: tuple[str, ...]
    u_labels: tuple[str, ...]
    p_u_given_z: np.ndarray
    means: np.ndarray
    z_marginal: np.ndarray | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "z_labels", tuple(str(z) for z in self.z_labels))
        object.__setattr__(self, "u_labels", tuple(str(u) for u in self.u_labels))
        p = _readonly(self.p_u_given_z)
        m = _readonly(self.means)
        object.__setattr__(self, "p_u_given_z", p)
        object.__setattr__(self, "means", m)
        nz, nu = len(self.z_labels), len(self.u_labels)
        if p.shape != (nz, nu):
            raise ValueError(f"p_u_given_z must have shape {(nz, nu)}, got {p.shape}")
        if m.ndim != 3 or m.shape[1:] != (nz, nu):
            raise ValueError(f"means must have shape (K, {nz}, {nu}), got {m.shape}")
        if m.shape[0] < 1:
            raise ValueError("instance needs at least one arm")
        if np.any(p < 0):
            raise ValueError("conditional weights must be nonnegative")
        if not np.allclose(p.sum(axis=1), 1.0, atol=1e-9):
            raise ValueError("each row of p_u_given_z must sum to 1")
        if np.any((m < 0) | (m > 1)):
            raise ValueError("all means must lie in [0, 1]")
        if self.z_marginal is None:
            marg = np.full(nz, 1.0 / nz)
        else:
            marg = np.array(self.z_marginal, dtype=float)
            if marg.shape != (nz,) or np.any(marg < 0) or not math.isclose(marg.sum(), 1.0, abs_tol=1e-9):
                raise ValueError("z_marginal must be a distribution over the visible contexts")
        object.__setattr__(self, "z_marginal", _readonly(marg))
        if m.shape[0] >= 2:
            top2 = np.sort(m, axis=0)[-2:]
            tied = top2[1] - top2[0] <= 0.0
            if np.any(tied):
                zi, ui = np.argwhere(tied)[0]
                raise ValueError(
                    f"best arm is not unique at context "
                    f"(z={self.z_labels[zi]}, u={self.u_labels[ui]})"
                )

    @property
    def n_arms(self) -> int:
        return self.means.shape[0]

    @property
    def best_arm(self) -> np.ndarray:
        """k*_{z,u}: the unique best arm per full context, shape (Z, U)."""
        return self.means.argmax(axis=0)

    @property
    def mu_star(self) -> np.ndarray:
        """mu*_{z,u}, shape (Z, U)."""
        return self.means.max(axis=0)

    @property
    def agent_means(self) -> np.ndarray:
        """mu_{k,z} = sum_u mu_{k,z,u} P(u|z), shape (K, Z)."""
        return np.einsum("kzu,zu->kz", self.means, self.p_u_given_z)

    @property
    def agent_optimum(self) -> np.ndarray:
        """mu*_z, shape (Z,)."""
        return self.agent_means.max(axis=0)

    def with_means(self, means: np.ndarray) -> "LatentInstance":
        return LatentInstance(
            self.z_labels, self.u_labels, self.p_u_given_z, means, self.z_marginal
        )


@dataclass(frozen=True)
class LogStatistics:
    """Everything an agent can read off a confounded log, per visible context.

    ``counts`` carries per-(z, k) sample counts for finite logs; ``best_arm``
    is the oracle's full-context decision table when the statistics were
    computed from ground truth (it lets admissibility checks confirm that a
    candidate instance leaves the logged decisions unchanged).
    """

    z_labels: tuple[str, ...]
    p: np.ndarray
    mu_z: np.ndarray
    mu_zk: np.ndarray
    gap_lo: np.ndarray
    gap_hi: np.ndarray
    counts: np.ndarray | None = None
    best_arm: np.ndarray | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "z_labels", tuple(str(z) for z in self.z_labels))
        p = _readonly(self.p)
        mu_z = _readonly(self.mu_z)
        mu_zk = _readonly(self.mu_zk)
        lo = _readonly(self.gap_lo)
        hi = _readonly(self.gap_hi)
        for name, arr in (("p", p), ("mu_z", mu_z), ("mu_zk", mu_zk), ("gap_lo", lo), ("gap_hi", hi)):
            object.__setattr__(self, name, arr)
        nz = len(self.z_labels)
        if p.ndim != 2 or p.shape[0] != nz or mu_zk.shape != p.shape or mu_z.shape != (nz,):
            raise ValueError("inconsistent statistic shapes")
        if np.any(p < -1e-12) or not np.allclose(p.sum(axis=1), 1.0, atol=1e-9):
            raise ValueError("action frequencies must form a distribution per context")
        if not np.allclose(mu_zk.sum(axis=1), mu_z, atol=1e-9):
            raise ValueError("per-arm reward contributions must sum to the context average")
        if np.any(mu_zk > p + 1e-9):
            raise ValueError("reward contributions cannot exceed action frequencies")
        if np.any(lo <= 0.0):
            bad = self.z_labels[int(np.argmax(lo <= 0.0))]
            raise ValueError(f"separation requires gap_lo > 0, violated at context {bad!r}")
        if np.any(lo > hi + 1e-12) or np.any(hi > 1.0 + 1e-12):
            raise ValueError("gaps must satisfy 0 < gap_lo <= gap_hi <= 1")

    @property
    def n_arms(self) -> int:
        return self.p.shape[1]

    def with_gaps(self, gap_lo, gap_hi) -> "LogStatistics":
        return LogStatistics(
            self.z_labels, self.p, self.mu_z, self.mu_zk,
            np.broadcast_to(np.asarray(gap_lo, dtype=float), self.mu_z.shape),
            np.broadcast_to(np.asarray(gap_hi, dtype=float), self.mu_z.shape),
            counts=self.counts, best_arm=self.best_arm,
        )


@dataclass(frozen=True)
class TransferredBounds:
    """Derived interval [l_{k,z}, u_{k,z}] per arm and visible context.

    ``lower``/``upper`` are clamped into [0, 1]; the raw (unclamped) values
    are kept for diagnostics. ``large_reward[z, k, k']`` marks k' as a member
    of the large-reward set used in arm k's lower bound.
    """

    z_labels: tuple[str, ...]
    lower: np.ndarray
    upper: np.ndarray
    raw_lower: np.ndarray
    raw_upper: np.ndarray
    failure_prob: np.ndarray
    large_reward: np.ndarray

    @property
    def n_arms(self) -> int:
        return self.lower.shape[1]

    def bounds_for(self, z_index: int) -> MeanBounds:
        return MeanBounds(tuple(self.lower[z_index]), tuple(self.upper[z_index]))

    def bounded_with_failure(self, z_index: int):
        """Uncertain-bounds carrier for one context: policies consume the
        bounds part, analysis adds the n * sum(p_k) regret term."""
        from .core import BoundedWithFailure

        return BoundedWithFailure(self.bounds_for(z_index), tuple(self.failure_prob[z_index]))

    def large_reward_arms(self, z_index: int, k: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.large_reward[z_index, k]))


def gaps(latent: LatentInstance) -> tuple[np.ndarray, np.ndarray]:
    """Tightest valid separation gaps (gap_lo_z, gap_hi_z) of an instance.

    gap_lo_z is the smallest best-vs-second-best margin over hidden contexts,
    gap_hi_z the largest best-vs-worst margin. Rejects instances violating
    the separation assumption (gap_lo_z <= 0) and single-arm instances.
    """
    if latent.n_arms < 2:
        raise ValueError("separation gaps need at least two arms")
    order = np.sort(latent.means, axis=0)
    second = order[-2]
    worst = order[0]
    star = latent.mu_star
    gap_lo = (star - second).min(axis=1)
    gap_hi = (star - worst).max(axis=1)
    if np.any(gap_lo <= 0.0):
        bad = latent.z_labels[int(np.argmax(gap_lo <= 0.0))]
        raise ValueError(f"separation assumption violated at context {bad!r}: gap_lo <= 0")
    return gap_lo, gap_hi


def validate_external_gaps(latent: LatentInstance, gap_lo, gap_hi) -> None:
    """Reject externally supplied gaps that are tighter than the ground truth."""
    true_lo, true_hi = gaps(latent)
    gap_lo = np.broadcast_to(np.asarray(gap_lo, dtype=float), true_lo.shape)
    gap_hi = np.broadcast_to(np.asarray(gap_hi, dtype=float), true_hi.shape)
    if np.any(gap_lo > true_lo + 1e-12):
        raise ValueError("declared gap_lo exceeds the tightest valid value")
    if np.any(gap_hi < true_hi - 1e-12):
        raise ValueError("declared gap_hi is below the tightest valid value")


def oracle_statistics(latent: LatentInstance) -> LogStatistics:
    """Exact (infinite-log) statistics: action frequencies, average rewards,
    per-arm reward contributions, and the tightest separation gaps."""
    best = latent.best_arm
    star = latent.mu_star
    weights = latent.p_u_given_z
    nz, nu = weights.shape
    k0 = latent.n_arms
    onehot = np.zeros((k0, nz, nu))
    z_idx, u_idx = np.meshgrid(np.arange(nz), np.arange(nu), indexing="ij")
    onehot[best, z_idx, u_idx] = 1.0
    p = np.einsum("kzu,zu->zk", onehot, weights)
    mu_zk = np.einsum("kzu,zu->zk", onehot, star * weights)
    mu_z = (star * weights).sum(axis=1)
    gap_lo, gap_hi = gaps(latent)
    return LogStatistics(
        latent.z_labels, p, mu_z, mu_zk, gap_lo, gap_hi, counts=None, best_arm=best
    )


def transfer_bounds(stats: LogStatistics) -> TransferredBounds:
    """Mean intervals implied by log statistics and separation gaps.

    Upper bound: u_{k,z} = mu_z - gap_lo_z (1 - p_z(k)). Lower bound:
    mu_z(k) plus the positive parts of mu_z(k') - gap_hi_z p_z(k') over the
    other arms (exactly the large-reward-arm sum). Outputs are clamped into
    [0, 1] since rewards live there; raw values are retained.
    """
    p, mu_z, mu_zk = stats.p, stats.mu_z, stats.mu_zk
    gap_lo, gap_hi = stats.gap_lo, stats.gap_hi
    nz, k0 = p.shape
    raw_upper = mu_z[:, None] - gap_lo[:, None] * (1.0 - p)
    contrib = mu_zk - gap_hi[:, None] * p
    qualifies = contrib > 0.0
    others = ~np.eye(k0, dtype=bool)
    large = qualifies[:, None, :] & others[None, :, :]
    raw_lower = mu_zk + np.einsum("zjk,zk->zj", large, np.maximum(contrib, 0.0))
    lower = np.clip(raw_lower, 0.0, 1.0)
    upper = np.clip(raw_upper, 0.0, 1.0)
    if np.any(lower > upper + 1e-12):
        zi, ki = np.argwhere(lower > upper + 1e-12)[0]
        raise ValueError(
            f"inconsistent log statistics: bounds cross for arm {ki + 1} "
            f"at context {stats.z_labels[zi]!r}"
        )
    return TransferredBounds(
        z_labels=stats.z_labels,
        lower=_readonly(lower),
        upper=_readonly(upper),
        raw_lower=_readonly(raw_lower),
        raw_upper=_readonly(raw_upper),
        failure_prob=_readonly(np.zeros_like(lower)),
        large_reward=large,
    )


def empirical_statistics(
    records: Sequence[LogRecord],
    z: str,
    n_arms: int,
    gap_lo: float,
    gap_hi: float,
) -> LogStatistics:
    """Plug-in statistics for one visible context from finite log records.

    The separation gaps are part of the log (they cannot be estimated from
    the data) and must be supplied. Sample counts are retained for widening.
    """
    rows = [r for r in records if str(r.z) == str(z)]
    if not rows:
        raise ValueError(f"no records for context {z!r}")
    counts = np.zeros((1, n_arms))
    sums = np.zeros((1, n_arms))
    for r in rows:
        if not 0 <= int(r.k) < n_arms:
            raise ValueError(f"record action {r.k} outside the arm range 0..{n_arms - 1}")
        if not 0.0 <= float(r.y) <= 1.0:
            raise ValueError(f"record reward {r.y} outside [0, 1]")
        counts[0, int(r.k)] += 1
        sums[0, int(r.k)] += float(r.y)
    n = counts.sum()
    p_hat = counts / n
    mu_zk = sums / n
    mu_z = mu_zk.sum(axis=1)
    return LogStatistics(
        (str(z),), p_hat, mu_z, mu_zk,
        np.array([gap_lo]), np.array([gap_hi]),
        counts=counts.astype(np.int64),
    )


def empirical_log_statistics(
    records: Sequence[LogRecord],
    n_arms: int,
    gap_lo,
    gap_hi,
    z_labels: Sequence[str] | None = None,
) -> LogStatistics:
    """Assemble per-context plug-in statistics for a whole log.

    Contexts default to the sorted distinct labels in the log; scalar gaps
    are broadcast to every context.
    """
    if z_labels is None:
        z_labels = sorted({str(r.z) for r in records})
    z_labels = tuple(str(z) for z in z_labels)
    gap_lo = np.broadcast_to(np.asarray(gap_lo, dtype=float), (len(z_labels),))
    gap_hi = np.broadcast_to(np.asarray(gap_hi, dtype=float), (len(z_labels),))
    parts = [
        empirical_statistics(records, z, n_arms, float(gap_lo[i]), float(gap_hi[i]))
        for i, z in enumerate(z_labels)
    ]
    return LogStatistics(
        z_labels,
        np.vstack([s.p for s in parts]),
        np.concatenate([s.mu_z for s in parts]),
        np.vstack([s.mu_zk for s in parts]),
        gap_lo,
        gap_hi,
        counts=np.vstack([s.counts for s in parts]),
    )


def finite_log_bounds(stats: LogStatistics, confidence: float) -> TransferredBounds:
    """Interval bounds from empirical statistics, widened to hold jointly
    with the requested confidence.

    The failure budget 1 - confidence is split evenly across every widened
    scalar (2K + 1 per context: the context average, and per arm the action
    frequency and reward contribution) by a union bound; each estimate is
    shifted in the direction that preserves validity of the interval
    formulas. The per-(arm, context) failure probability reported is the
    context's budget apportioned over its K arm intervals, so the
    probabilities sum to exactly 1 - confidence.
    """
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie strictly in (0, 1)")
    if stats.counts is None:
        raise ValueError("finite-log widening needs per-(z, k) sample counts")
    n_z = stats.counts.sum(axis=1)
    if np.any(n_z < 1):
        raise ValueError("every context needs at least one record")
    nz, k0 = stats.p.shape
    n_quantities = nz * (2 * k0 + 1)
    beta = (1.0 - confidence) / n_quantities
    width = np.array([hoeffding_ci_halfwidth(beta, int(n), _UNIT) for n in n_z])

    w = width[:, None]
    p_hi = np.minimum(stats.p + w, 1.0)
    mu_z_hi = np.minimum(stats.mu_z + width, 1.0)
    mu_zk_lo = np.maximum(stats.mu_zk - w, 0.0)

    raw_upper = mu_z_hi[:, None] - stats.gap_lo[:, None] * (1.0 - p_hi)
    contrib = mu_zk_lo - stats.gap_hi[:, None] * p_hi
    qualifies = contrib > 0.0
    others = ~np.eye(k0, dtype=bool)
    large = qualifies[:, None, :] & others[None, :, :]
    raw_lower = mu_zk_lo + np.einsum("zjk,zk->zj", large, np.maximum(contrib, 0.0))

    lower = np.clip(raw_lower, 0.0, 1.0)
    upper = np.clip(raw_upper, 0.0, 1.0)
    failure = np.full((nz, k0), (2 * k0 + 1) * beta / k0)
    return TransferredBounds(
        z_labels=stats.z_labels,
        lower=_readonly(lower),
        upper=_readonly(upper),
        raw_lower=_readonly(raw_lower),
        raw_upper=_readonly(raw_upper),
        failure_prob=_readonly(failure),
        large_reward=large,
    )


def tight_upper_instance(latent: LatentInstance) -> LatentInstance:
    """Admissible instance attaining every upper bound simultaneously.

    Every non-best mean is raised to mu*_{z,u} - gap_lo_z; the logged
    decisions and therefore all statistics are unchanged, and the agent-space
    means land exactly on u_{k,z}.
    """
    gap_lo, _ = gaps(latent)
    best = latent.best_arm
    star = latent.mu_star
    k0 = latent.n_arms
    new = np.broadcast_to((star - gap_lo[:, None])[None], latent.means.shape).copy()
    keep = best[None, :, :] == np.arange(k0)[:, None, None]
    new[keep] = latent.means[keep]
    return latent.with_means(new)


def tight_lower_instance(latent: LatentInstance, k: int) -> LatentInstance:
    """Admissible instance attaining arm k's lower bound in every context.

    Hidden contexts whose logged best arm is a large-reward arm get
    mu_{k,z,u} = mu*_{z,u} - gap_hi_z; the remaining ones (best arm outside
    the large-reward set) get 0; contexts where k itself is optimal are
    untouched.
    """
    stats = oracle_statistics(latent)
    tb = transfer_bounds(stats)
    best = latent.best_arm
    star = latent.mu_star
    _, gap_hi = gaps(latent)
    new = np.array(latent.means, copy=True)
    nz, nu = latent.p_u_given_z.shape
    for zi in range(nz):
        in_large = tb.large_reward[zi, k]
        for ui in range(nu):
            b = best[zi, ui]
            if b == k:
                continue
            new[k, zi, ui] = star[zi, ui] - gap_hi[zi] if in_large[b] else 0.0
    return latent.with_means(new)


def admissible_check(
    candidate: LatentInstance,
    reference_stats: LogStatistics,
    tol: float,
) -> tuple[bool, list[str]]:
    """Does a candidate instance satisfy all the reference log statistics?

    Checks the computed statistics componentwise within ``tol``, membership
    of every full-context gap in [gap_lo, gap_hi], means in [0, 1], and
    (when the reference carries the oracle's decision table) that the best
    arm per (z, u) is unchanged.
    """
    if candidate.n_arms != reference_stats.n_arms or candidate.z_labels != reference_stats.z_labels:
        raise ValueError("candidate and reference statistics have mismatched shapes")
    violations: list[str] = []
    if np.any((candidate.means < 0) | (candidate.means > 1)):
        violations.append("means outside [0, 1]")
    if reference_stats.best_arm is not None and not np.array_equal(
        candidate.best_arm, np.asarray(reference_stats.best_arm)
    ):
        violations.append("best arm changed for some full context")
    cand = oracle_statistics(candidate)
    for name in ("p", "mu_z", "mu_zk"):
        if not np.allclose(getattr(cand, name), getattr(reference_stats, name), atol=tol, rtol=0.0):
            violations.append(f"statistic {name} deviates beyond tol={tol}")
    order = np.sort(candidate.means, axis=0)
    second_gap = candidate.mu_star - order[-2]
    worst_gap = candidate.mu_star - order[0]
    if np.any(second_gap < reference_stats.gap_lo[:, None] - tol):
        violations.append("a full-context gap falls below gap_lo")
    if np.any(worst_gap > reference_stats.gap_hi[:, None] + tol):
        violations.append("a full-context gap exceeds gap_hi")
    return (not violations), violations


def sample_log(latent: LatentInstance, n: int, seed) -> list[LogRecord]:
    """Draw n i.i.d. oracle records, deterministically per seed.

    Each record consumes three uniforms in a fixed order (visible context,
    hidden context, reward); rewards are Bernoulli(mu*_{z,u}), which is
    sufficient because every downstream statistic depends only on means.
    """
    if n < 1:
        raise ValueError("log size must be >= 1")
    rng = np.random.default_rng(seed)
    z_cdf = np.cumsum(latent.z_marginal)
    u_cdf = np.cumsum(latent.p_u_given_z, axis=1)
    zs = np.searchsorted(z_cdf, rng.random(n), side="right")
    zs = np.minimum(zs, len(latent.z_labels) - 1)
    u_draw = rng.random(n)
    us = np.empty(n, dtype=np.int64)
    for zi in range(len(latent.z_labels)):
        mask = zs == zi
        us[mask] = np.minimum(
            np.searchsorted(u_cdf[zi], u_draw[mask], side="right"),
            len(latent.u_labels) - 1,
        )
    best = latent.best_arm
    star = latent.mu_star
    ys = (rng.random(n) < star[zs, us]).astype(float)
    ks = best[zs, us]
    labels = latent.z_labels
    return [LogRecord(labels[zs[i]], int(ks[i]), float(ys[i])) for i in range(n)]


# ---------------------------------------------------------------------------
# File formats.
#   Latent instance JSON: contexts_visible, contexts_hidden, p_u_given_z
#   (row-stochastic), means (arm x z x u tensor), optional z_marginal.
#   Log CSV columns: z, k, y with k a 0-based arm index.
#   Bounds JSON: {z: [{"lower", "upper", "failure_prob"}, ...]} in arm order.
# ---------------------------------------------------------------------------


def latent_from_dict(data: dict) -> LatentInstance:
    try:
        return LatentInstance(
            z_labels=tuple(str(z) for z in data["contexts_visible"]),
            u_labels=tuple(str(u) for u in data["contexts_hidden"]),
            p_u_given_z=np.asarray(data["p_u_given_z"], dtype=float),
            means=np.asarray(data["means"], dtype=float),
            z_marginal=None
            if data.get("z_marginal") is None
            else np.asarray(data["z_marginal"], dtype=float),
        )
    except KeyError as exc:
        raise ValueError(f"malformed latent instance file: missing field {exc}") from exc


def latent_to_dict(latent: LatentInstance) -> dict:
    return {
        "contexts_visible": list(latent.z_labels),
        "contexts_hidden": list(latent.u_labels),
        "p_u_given_z": latent.p_u_given_z.tolist(),
        "means": latent.means.tolist(),
        "z_marginal": latent.z_marginal.tolist(),
    }


def load_latent(path: str | Path) -> LatentInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return latent_from_dict(json.load(fh))


def save_latent(latent: LatentInstance, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(latent_to_dict(latent), fh, indent=2, sort_keys=True)
        fh.write("\n")


def bounds_to_dict(tb: TransferredBounds) -> dict:
    out: dict[str, list[dict[str, float]]] = {}
    for zi, z in enumerate(tb.z_labels):
        out[z] = [
            {
                "lower": float(tb.lower[zi, k]),
                "upper": float(tb.upper[zi, k]),
                "failure_prob": float(tb.failure_prob[zi, k]),
            }
            for k in range(tb.n_arms)
        ]
    return out


def write_log_csv(records: Iterable[LogRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["z", "k", "y"])
        for r in records:
            writer.writerow([r.z, r.k, repr(float(r.y))])


def read_log_csv(path: str | Path) -> list[LogRecord]:
    records = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(reader.fieldnames) < {"z", "k", "y"}:
            raise ValueError("log CSV must have columns z, k, y")
        for row in reader:
            records.append(LogRecord(str(row["z"]), int(row["k"]), float(row["y"])))
    if not records:
        raise ValueError("log CSV contains no records")
    return records
