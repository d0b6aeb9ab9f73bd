"""Shared builders for test instances."""

from __future__ import annotations

import numpy as np

from banditlab.core import Arm, BanditInstance, Distribution, Support
from banditlab.transfer import LatentInstance

UNIT = Support(0.0, 1.0)


def bernoulli_instance(means, lowers, uppers, support=UNIT) -> BanditInstance:
    arms = tuple(
        Arm(float(m), Distribution("bernoulli"), float(lo), float(hi))
        for m, lo, hi in zip(means, lowers, uppers)
    )
    return BanditInstance(support, arms)


def anchor_instance() -> BanditInstance:
    return bernoulli_instance([0.96, 0.2], [0.95, 0.0], [1.0, 1.0])


def tight_prior_instance() -> BanditInstance:
    return bernoulli_instance([0.985, 0.2], [0.98, 0.0], [1.0, 1.0])


def reference_latent(n_arms: int = 5) -> LatentInstance:
    means = np.full((n_arms, 1, 3), 0.3)
    means[0, 0] = [0.998, 0.99, 0.3]
    means[1, 0] = [0.997, 0.985, 1.0]
    return LatentInstance(
        z_labels=("z0",),
        u_labels=("u1", "u2", "u3"),
        p_u_given_z=np.array([[0.475, 0.475, 0.05]]),
        means=means,
    )


def random_latent(rng: np.random.Generator, max_z=3, max_u=5, max_arms=6) -> LatentInstance:
    """Instance satisfying the separation assumption, otherwise unconstrained."""
    n_z = int(rng.integers(1, max_z + 1))
    n_u = int(rng.integers(1, max_u + 1))
    k0 = int(rng.integers(2, max_arms + 1))
    means = rng.uniform(0.0, 0.7, size=(k0, n_z, n_u))
    for zi in range(n_z):
        for ui in range(n_u):
            best = int(rng.integers(0, k0))
            margin = float(rng.uniform(0.02, 0.3))
            means[best, zi, ui] = min(1.0, means[:, zi, ui].max() + margin)
    p = rng.uniform(0.1, 1.0, size=(n_z, n_u))
    p /= p.sum(axis=1, keepdims=True)
    return LatentInstance(
        z_labels=tuple(f"z{i}" for i in range(n_z)),
        u_labels=tuple(f"u{i}" for i in range(n_u)),
        p_u_given_z=p,
        means=means,
    )


def random_witness_latent(rng: np.random.Generator, max_z=3, max_u=4, max_arms=5) -> LatentInstance:
    """Instance on which both extremal constructions are exact.

    The tightness constructions are exact when every full-context optimum
    clears gap_hi and no hidden context is ruled out of the large-reward
    partition; keeping best means in [0.75, 1] and all gaps in [0.02, 0.5]
    guarantees both.
    """
    n_z = int(rng.integers(1, max_z + 1))
    n_u = int(rng.integers(1, max_u + 1))
    k0 = int(rng.integers(2, max_arms + 1))
    means = np.zeros((k0, n_z, n_u))
    for zi in range(n_z):
        for ui in range(n_u):
            best = int(rng.integers(0, k0))
            star = float(rng.uniform(0.75, 1.0))
            others = star - rng.uniform(0.02, 0.5, size=k0)
            means[:, zi, ui] = others
            means[best, zi, ui] = star
    p = rng.uniform(0.1, 1.0, size=(n_z, n_u))
    p /= p.sum(axis=1, keepdims=True)
    return LatentInstance(
        z_labels=tuple(f"z{i}" for i in range(n_z)),
        u_labels=tuple(f"u{i}" for i in range(n_u)),
        p_u_given_z=p,
        means=means,
    )


# The six Bernoulli regimes used in the qualitative simulation suite.
# Keyed by regime name; values (means, lowers, uppers).
BERNOULLI_REGIMES = {
    "global_ue_favorable": ([0.985, 0.2, 0.3], [0.98, 0.0, 0.0], [1.0, 0.99, 0.99]),
    "global_ue_adversarial": ([0.93, 0.85, 0.3], [0.85, 0.80, 0.0], [0.95, 1.0, 0.95]),
    "meta_pruning_only": ([0.7, 0.5, 0.4], [0.0, 0.0, 0.0], [1.0, 1.0, 0.6]),
    "local_ue_favorable": ([0.15, 0.1, 0.05], [0.0, 0.0, 0.0], [0.2, 0.16, 0.16]),
    "local_ue_adversarial": ([0.15, 0.1, 0.05], [0.0, 0.0, 0.0], [0.17, 0.2, 0.16]),
    "uninformative": ([0.7, 0.5, 0.3], [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]),
}


def regime_instance(name: str) -> BanditInstance:
    means, lowers, uppers = BERNOULLI_REGIMES[name]
    return bernoulli_instance(means, lowers, uppers)
