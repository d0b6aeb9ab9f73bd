"""Deterministic Monte-Carlo engine for policies on reward environments.

RNG contract: a root seed expands to one independent stream per
(policy, seed index, context) via ``np.random.SeedSequence((root_seed,
policy_code, seed_index, context_index))``, so adding a policy or context to
a batch never perturbs the draws of the others. Within an episode exactly one
uniform is consumed per step and the reward is a fixed transform of that
uniform under the selected arm, so every policy sees the same underlying
randomness and replays are bit-identical.

Episodes are embarrassingly parallel. The batch runner executes all seeds of
one policy as a single array program (same kernels, same floating-point ops
as the sequential ``PolicyState`` driver, so the two agree bitwise); it may
split the seed axis across threads, which changes timing only, never bytes.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr, ndtri

from .core import BanditInstance, MeanBounds, Support, prune
from .policies import (
    POLICY_CODES,
    PolicyKind,
    PolicyState,
    bonus_indices,
    empirical_means,
    klucb_indices01,
    lex_argmax,
    log_exploration,
    ossb_step,
)
from .transfer import LatentInstance, TransferredBounds

NATURE_STREAM = 10**9  # reserved context index for the nature draws of contextual runs

TRACE_COLUMNS = ("policy", "seed", "checkpoint", "cum_regret")
AGGREGATE_COLUMNS = ("policy", "checkpoint", "mean", "stderr", "q_lo", "q_hi")


def episode_stream(
    root_seed: int, kind: PolicyKind, seed_index: int, context_index: int = 0
) -> np.random.SeedSequence:
    """The documented splitting function mapping run coordinates to a stream."""
    return np.random.SeedSequence((root_seed, POLICY_CODES[kind.name], seed_index, context_index))


def _clipped_gaussian_mean(loc: float, scale: float, a: float, b: float) -> float:
    alpha = (a - loc) / scale
    beta = (b - loc) / scale
    phi = lambda x: math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    return (
        a * ndtr(alpha)
        + b * (1.0 - ndtr(beta))
        + loc * (ndtr(beta) - ndtr(alpha))
        - scale * (phi(beta) - phi(alpha))
    )


def _solve_gaussian_loc(mean: float, scale: float, a: float, b: float) -> float:
    lo, hi = a - 50.0 * scale, b + 50.0 * scale
    return brentq(lambda m: _clipped_gaussian_mean(m, scale, a, b) - mean, lo, hi, xtol=1e-13)


@dataclass(frozen=True)
class Environment:
    """Reward samplers plus the true means used for pseudo-regret.

    Rewards are a deterministic transform of one uniform per draw. For
    clipped Gaussians the declared arm mean is the post-clipping mean; the
    pre-clip location is solved at construction so sampling is unbiased.
    """

    support: Support
    means: tuple[float, ...]
    kinds: tuple[str, ...]
    params: tuple[tuple[float, ...], ...]

    @classmethod
    def from_instance(cls, instance: BanditInstance) -> "Environment":
        sup = instance.support
        kinds, params = [], []
        for k, arm in enumerate(instance.arms):
            kind = arm.dist.kind
            if kind == "bernoulli":
                if not (sup.a <= 0.0 and sup.b >= 1.0 and 0.0 <= arm.mean <= 1.0):
                    raise ValueError(f"arm {k + 1}: bernoulli rewards need {{0,1}} inside the support")
                params.append((arm.mean,))
            elif kind == "two-point":
                params.append(((arm.mean - sup.a) / sup.span,))
            elif kind == "clipped-gaussian":
                if not sup.a < arm.mean < sup.b:
                    raise ValueError(f"arm {k + 1}: clipped-gaussian mean must be interior")
                loc = _solve_gaussian_loc(arm.mean, arm.dist.scale, sup.a, sup.b)
                params.append((loc, arm.dist.scale))
            else:
                raise ValueError(f"arm {k + 1}: unknown distribution kind {kind!r}")
            kinds.append(kind)
        return cls(sup, instance.means, tuple(kinds), tuple(params))

    @property
    def n_arms(self) -> int:
        return len(self.means)

    def subset(self, indices: Sequence[int]) -> "Environment":
        return Environment(
            self.support,
            tuple(self.means[i] for i in indices),
            tuple(self.kinds[i] for i in indices),
            tuple(self.params[i] for i in indices),
        )

    def transform(self, arm: int, unit):
        """Map uniforms in [0, 1) to rewards of one arm (scalar or array)."""
        kind = self.kinds[arm]
        if kind == "bernoulli":
            return np.where(unit < self.params[arm][0], 1.0, 0.0)
        if kind == "two-point":
            theta = self.params[arm][0]
            return np.where(unit < theta, self.support.b, self.support.a)
        loc, scale = self.params[arm]
        draw = loc + scale * ndtri(unit)
        return np.minimum(self.support.b, np.maximum(self.support.a, draw))

    def sample(self, arm: int, unit: float) -> float:
        return float(self.transform(arm, np.float64(unit)))


def default_checkpoints(horizon: int, n_points: int = 50) -> tuple[int, ...]:
    """Geometric step grid of about ``n_points`` values ending at the horizon."""
    grid = np.unique(np.round(np.geomspace(1, horizon, num=min(n_points, horizon))).astype(int))
    if grid[-1] != horizon:
        grid = np.append(grid, horizon)
    return tuple(int(t) for t in grid)


@dataclass(frozen=True)
class RunConfig:
    instance: BanditInstance
    policies: tuple[PolicyKind, ...]
    horizon: int
    seeds: tuple[int, ...]
    root_seed: int = 0
    checkpoints: tuple[int, ...] | None = None
    band: tuple[float, float] = (0.25, 0.75)
    keep_traces: bool = True

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        names = [k.name for k in self.policies]
        if not names:
            raise ValueError("at least one policy is required")
        if len(set(names)) != len(names):
            raise ValueError("policy names must be distinct within one batch")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be distinct")
        if self.checkpoints is not None:
            cps = tuple(int(t) for t in self.checkpoints)
            if list(cps) != sorted(set(cps)) or cps[-1] != self.horizon or cps[0] < 1:
                raise ValueError("checkpoints must be sorted, distinct, and end at the horizon")
            object.__setattr__(self, "checkpoints", cps)

    def resolved_checkpoints(self) -> tuple[int, ...]:
        return self.checkpoints if self.checkpoints is not None else default_checkpoints(self.horizon)


@dataclass(frozen=True)
class RegretTrace:
    """Cumulative pseudo-regret of one (policy, seed) episode at checkpoints."""

    policy: str
    seed: int
    checkpoints: tuple[int, ...]
    cum_regret: tuple[float, ...]
    pulls: tuple[int, ...]
    arms: tuple[int, ...] | None = None


def run_episode(
    env: Environment,
    kind: PolicyKind,
    bounds: MeanBounds,
    horizon: int,
    seed,
    checkpoints: tuple[int, ...] | None = None,
    record_arms: bool = False,
    seed_index: int = 0,
) -> RegretTrace:
    """Prune, initialize, then play ``horizon`` select/update rounds.

    Pseudo-regret is accumulated against the instance's true means;
    identical (env, kind, bounds, seed) runs replay bit-identically.
    ``seed`` may be an int or a ``SeedSequence`` (as produced by
    ``episode_stream``).
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if bounds.n_arms != env.n_arms:
        raise ValueError("bounds and environment disagree on the arm count")
    cps = checkpoints if checkpoints is not None else default_checkpoints(horizon)
    pruned = prune(bounds)
    sub_env = env.subset(pruned.retained)
    state = PolicyState(kind, env.support, bounds.subset(pruned.retained))
    mu_star = max(env.means)
    deltas = np.array([mu_star - m for m in sub_env.means])
    rng = np.random.default_rng(seed)
    units = rng.random(horizon)
    cum = 0.0
    out = []
    arms: list[int] = [] if record_arms else None
    cp_iter = iter(cps)
    next_cp = next(cp_iter)
    for t in range(1, horizon + 1):
        arm = state.select()
        y = sub_env.sample(arm, units[t - 1])
        state.update(arm, y)
        cum += float(deltas[arm])
        if record_arms:
            arms.append(pruned.retained[arm])
        if t == next_cp:
            out.append(cum)
            next_cp = next(cp_iter, None)
    pulls = np.zeros(env.n_arms, dtype=np.int64)
    pulls[list(pruned.retained)] = state.pulls
    return RegretTrace(
        policy=kind.name,
        seed=seed_index,
        checkpoints=tuple(cps),
        cum_regret=tuple(out),
        pulls=tuple(int(x) for x in pulls),
        arms=None if arms is None else tuple(arms),
    )


def _simulate_policy_batch(
    env: Environment,
    kind: PolicyKind,
    bounds: MeanBounds,
    horizon: int,
    streams: Sequence[np.random.SeedSequence],
    checkpoints: tuple[int, ...],
    record_arms: bool = False,
):
    """All seeds of one policy as a single array program.

    Returns (regret (S, C), pulls (S, K0), arms (S, T) or None).
    """
    pruned = prune(bounds)
    sub_env = env.subset(pruned.retained)
    template = PolicyState(kind, env.support, bounds.subset(pruned.retained))
    n_seeds, n_arms = len(streams), sub_env.n_arms
    mu_star = max(env.means)
    deltas = np.array([mu_star - m for m in sub_env.means])
    units = np.stack([np.random.default_rng(ss).random(horizon) for ss in streams])

    a, span = env.support.a, env.support.span
    pulls = np.zeros((n_seeds, n_arms), dtype=np.int64)
    sums = np.zeros((n_seeds, n_arms))
    explore = np.zeros(n_seeds, dtype=np.int64)
    cum = np.zeros(n_seeds)
    regret = np.zeros((n_seeds, len(checkpoints)))
    arms_out = np.zeros((n_seeds, horizon), dtype=np.int64) if record_arms else None
    rows = np.arange(n_seeds)
    cp_index = {t: i for i, t in enumerate(checkpoints)}

    for t in range(1, horizon + 1):
        lf = log_exploration(t)
        mu = empirical_means(sums, pulls)
        if kind.name == "ossb":
            mu01 = (mu - a) / span
            choice, explore = ossb_step(
                mu01, pulls, template._lower01, template._upper01,
                kind.ossb_eps, kind.ossb_gamma, explore, t,
            )
        else:
            if kind.uses_kl:
                mu01 = (mu - a) / span
                raw = a + span * klucb_indices01(mu01, pulls, lf)
            else:
                raw = bonus_indices(mu, pulls, template.c, lf)
            clipped = np.minimum(template._clip, raw)
            choice = lex_argmax(clipped, raw)
        y = np.empty(n_seeds)
        step_units = units[:, t - 1]
        for k in range(n_arms):
            mask = choice == k
            if mask.any():
                y[mask] = sub_env.transform(k, step_units[mask])
        pulls[rows, choice] += 1
        sums[rows, choice] += y
        cum += deltas[choice]
        ci = cp_index.get(t)
        if ci is not None:
            regret[:, ci] = cum
        if record_arms:
            arms_out[:, t - 1] = np.asarray(pruned.retained)[choice]

    full_pulls = np.zeros((n_seeds, env.n_arms), dtype=np.int64)
    full_pulls[:, list(pruned.retained)] = pulls
    return regret, full_pulls, arms_out


@dataclass(frozen=True)
class Aggregate:
    """Across-seed summary of one policy's regret curve."""

    checkpoints: tuple[int, ...]
    mean: np.ndarray
    stderr: np.ndarray
    q_lo: np.ndarray
    q_hi: np.ndarray
    band: tuple[float, float]


def _aggregate(regret: np.ndarray, checkpoints: tuple[int, ...], band) -> Aggregate:
    n = regret.shape[0]
    mean = regret.mean(axis=0)
    if n > 1:
        stderr = regret.std(axis=0, ddof=1) / math.sqrt(n)
    else:
        stderr = np.zeros_like(mean)
    q_lo = np.quantile(regret, band[0], axis=0)
    q_hi = np.quantile(regret, band[1], axis=0)
    return Aggregate(checkpoints, mean, stderr, q_lo, q_hi, tuple(band))


@dataclass
class BatchResult:
    config: RunConfig
    checkpoints: tuple[int, ...]
    aggregates: dict[str, Aggregate]
    regret: dict[str, np.ndarray] = field(default_factory=dict)
    pulls: dict[str, np.ndarray] = field(default_factory=dict)

    def traces(self) -> Iterable[RegretTrace]:
        for kind in self.config.policies:
            label = kind.name
            for i, seed in enumerate(self.config.seeds):
                yield RegretTrace(
                    policy=label,
                    seed=seed,
                    checkpoints=self.checkpoints,
                    cum_regret=tuple(float(x) for x in self.regret[label][i]),
                    pulls=tuple(int(x) for x in self.pulls[label][i]),
                )


def run_batch(config: RunConfig, threads: int = 1) -> BatchResult:
    """Run every (policy, seed) episode and aggregate the regret curves.

    ``threads`` splits the seed axis across a thread pool; it affects speed
    only, never output bytes.
    """
    env = Environment.from_instance(config.instance)
    bounds = config.instance.bounds
    cps = config.resolved_checkpoints()
    threads = max(1, int(threads))
    aggregates: dict[str, Aggregate] = {}
    regret_by: dict[str, np.ndarray] = {}
    pulls_by: dict[str, np.ndarray] = {}
    for kind in config.policies:
        streams = [episode_stream(config.root_seed, kind, s, 0) for s in config.seeds]
        if threads == 1 or len(streams) < 2 * threads:
            regret, pulls, _ = _simulate_policy_batch(env, kind, bounds, config.horizon, streams, cps)
        else:
            chunk = math.ceil(len(streams) / threads)
            parts = [streams[i : i + chunk] for i in range(0, len(streams), chunk)]
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(
                    pool.map(
                        lambda part: _simulate_policy_batch(
                            env, kind, bounds, config.horizon, part, cps
                        ),
                        parts,
                    )
                )
            regret = np.vstack([r[0] for r in results])
            pulls = np.vstack([r[1] for r in results])
        aggregates[kind.name] = _aggregate(regret, cps, config.band)
        if config.keep_traces:
            regret_by[kind.name] = regret
            pulls_by[kind.name] = pulls
    return BatchResult(config, cps, aggregates, regret_by, pulls_by)


def run_contextual(
    latent: LatentInstance,
    bounds: TransferredBounds,
    kind: PolicyKind,
    horizon: int,
    seed_index: int,
    root_seed: int = 0,
    checkpoints: tuple[int, ...] | None = None,
) -> dict[str, RegretTrace]:
    """One contextual episode: an independent policy state per visible context.

    Nature draws (z, u) from its own stream; context z's rewards come from
    the (policy, seed, z) stream, one uniform per interaction, drawn as
    Bernoulli(mu_{k,z,u}). Per-context pseudo-regret is measured against the
    agent-space optimum mu*_z and recorded on the shared checkpoint grid.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if tuple(bounds.z_labels) != tuple(latent.z_labels) or bounds.n_arms != latent.n_arms:
        raise ValueError("bounds do not cover every (arm, context) of the instance")
    cps = checkpoints if checkpoints is not None else default_checkpoints(horizon)
    sup = Support(0.0, 1.0)
    n_z = len(latent.z_labels)
    agent = latent.agent_means
    states, retained, deltas, reward_rng = [], [], [], []
    for zi in range(n_z):
        pr = prune(bounds.bounds_for(zi))
        retained.append(pr.retained)
        states.append(PolicyState(kind, sup, bounds.bounds_for(zi).subset(pr.retained)))
        star = agent[:, zi].max()
        deltas.append(np.array([star - agent[i, zi] for i in pr.retained]))
        reward_rng.append(
            np.random.default_rng(episode_stream(root_seed, kind, seed_index, zi))
        )
    nature = np.random.default_rng(episode_stream(root_seed, kind, seed_index, NATURE_STREAM))
    nature_units = nature.random((horizon, 2))
    z_cdf = np.cumsum(latent.z_marginal)
    u_cdf = np.cumsum(latent.p_u_given_z, axis=1)

    cum = np.zeros(n_z)
    out = np.zeros((n_z, len(cps)))
    cp_index = {t: i for i, t in enumerate(cps)}
    for t in range(1, horizon + 1):
        zi = min(int(np.searchsorted(z_cdf, nature_units[t - 1, 0], side="right")), n_z - 1)
        ui = min(
            int(np.searchsorted(u_cdf[zi], nature_units[t - 1, 1], side="right")),
            len(latent.u_labels) - 1,
        )
        state = states[zi]
        arm = state.select()
        orig = retained[zi][arm]
        y = 1.0 if reward_rng[zi].random() < latent.means[orig, zi, ui] else 0.0
        state.update(arm, y)
        cum[zi] += float(deltas[zi][arm])
        ci = cp_index.get(t)
        if ci is not None:
            out[:, ci] = cum
    traces = {}
    for zi, z in enumerate(latent.z_labels):
        pulls = np.zeros(latent.n_arms, dtype=np.int64)
        pulls[list(retained[zi])] = states[zi].pulls
        traces[z] = RegretTrace(
            policy=kind.name,
            seed=seed_index,
            checkpoints=tuple(cps),
            cum_regret=tuple(float(x) for x in out[zi]),
            pulls=tuple(int(x) for x in pulls),
        )
    return traces


# ---------------------------------------------------------------------------
# CSV output. Column names are fixed; contextual variants insert a ``z``
# column after ``policy``. Floats are written with shortest-roundtrip repr,
# so identical runs produce identical bytes.
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    return repr(float(x))


def write_trace_csv(result: BatchResult, path: str | Path) -> None:
    if not result.regret:
        raise ValueError("raw traces were not retained (keep_traces=False)")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for trace in result.traces():
            for t, r in zip(trace.checkpoints, trace.cum_regret):
                writer.writerow([trace.policy, trace.seed, t, _fmt(r)])


def write_aggregate_csv(result: BatchResult, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(AGGREGATE_COLUMNS)
        for kind in result.config.policies:
            agg = result.aggregates[kind.name]
            for i, t in enumerate(agg.checkpoints):
                writer.writerow(
                    [
                        kind.name,
                        t,
                        _fmt(agg.mean[i]),
                        _fmt(agg.stderr[i]),
                        _fmt(agg.q_lo[i]),
                        _fmt(agg.q_hi[i]),
                    ]
                )


def write_contextual_trace_csv(
    traces: Sequence[dict[str, RegretTrace]], path: str | Path
) -> None:
    """Traces from repeated run_contextual calls; columns policy,z,seed,checkpoint,cum_regret."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["policy", "z", "seed", "checkpoint", "cum_regret"])
        for per_z in traces:
            for z, trace in per_z.items():
                for t, r in zip(trace.checkpoints, trace.cum_regret):
                    writer.writerow([trace.policy, z, trace.seed, t, _fmt(r)])


def write_contextual_aggregate_csv(
    traces: Sequence[dict[str, RegretTrace]], path: str | Path, band=(0.25, 0.75)
) -> None:
    """Aggregate repeated contextual runs per (policy, z) on their shared grid."""
    by_key: dict[tuple[str, str], list[RegretTrace]] = {}
    for per_z in traces:
        for z, trace in per_z.items():
            by_key.setdefault((trace.policy, z), []).append(trace)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["policy", "z", "checkpoint", "mean", "stderr", "q_lo", "q_hi"])
        for (policy, z), group in by_key.items():
            regret = np.array([t.cum_regret for t in group])
            agg = _aggregate(regret, group[0].checkpoints, band)
            for i, t in enumerate(agg.checkpoints):
                writer.writerow(
                    [policy, z, t, _fmt(agg.mean[i]), _fmt(agg.stderr[i]), _fmt(agg.q_lo[i]), _fmt(agg.q_hi[i])]
                )
