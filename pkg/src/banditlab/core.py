"""Domain types shared by every module: supports, mean bounds, instances.

All types here are immutable after construction and therefore safe to share
across threads. Arms are indexed 0-based throughout the code base; the CLI
renders 1-based positions in human-readable text (matching the order of the
``arms`` list in an instance file).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

DIST_KINDS = ("bernoulli", "clipped-gaussian", "two-point")
DEFAULT_GAUSSIAN_SCALE = 0.1


@dataclass(frozen=True)
class Support:
    """Common reward support [a, b], shared by all arms of an instance."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not float(self.a) < float(self.b):
            raise ValueError(f"support requires a < b, got [{self.a}, {self.b}]")

    @property
    def span(self) -> float:
        return self.b - self.a

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    def contains(self, x: float) -> bool:
        return self.a <= x <= self.b


@dataclass(frozen=True)
class MeanBounds:
    """Per-arm side information l_k <= mu_k <= u_k supplied before learning."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "lower", tuple(float(x) for x in self.lower))
        object.__setattr__(self, "upper", tuple(float(x) for x in self.upper))
        if len(self.lower) != len(self.upper):
            raise ValueError("lower and upper must have the same length")

    @property
    def n_arms(self) -> int:
        return len(self.lower)

    @property
    def l_max(self) -> float:
        """Largest lower bound; requires a nonempty arm set."""
        if not self.lower:
            raise ValueError("l_max is undefined for an empty arm set")
        return max(self.lower)

    def arm(self, k: int) -> tuple[float, float]:
        return self.lower[k], self.upper[k]

    def subset(self, indices: Sequence[int]) -> "MeanBounds":
        return MeanBounds(
            tuple(self.lower[i] for i in indices),
            tuple(self.upper[i] for i in indices),
        )

    def violations(self, support: Support) -> list[str]:
        """Invariant violations relative to a support, empty when valid."""
        out = []
        for k, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            if lo > hi:
                out.append(f"arm {k + 1}: lower bound {lo} > upper bound {hi}")
            if lo < support.a:
                out.append(f"arm {k + 1}: lower bound {lo} below support endpoint {support.a}")
            if hi > support.b:
                out.append(f"arm {k + 1}: upper bound {hi} above support endpoint {support.b}")
        return out


@dataclass(frozen=True)
class Distribution:
    """Reward distribution of one arm.

    ``bernoulli`` and ``two-point`` are parameter-free given the arm mean and
    the support; ``clipped-gaussian`` carries a ``scale`` (pre-clipping
    standard deviation). The arm's declared mean is always the true sampling
    mean; for clipped Gaussians the location parameter is solved so that the
    post-clipping mean equals the declared mean.
    """

    kind: str
    scale: float | None = None

    def __post_init__(self) -> None:
        if self.kind == "clipped-gaussian" and self.scale is None:
            object.__setattr__(self, "scale", DEFAULT_GAUSSIAN_SCALE)


@dataclass(frozen=True)
class Arm:
    mean: float
    dist: Distribution
    lower: float
    upper: float


@dataclass(frozen=True)
class BanditInstance:
    """Ground truth for simulation and analysis: arms plus their mean bounds."""

    support: Support
    arms: tuple[Arm, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "arms", tuple(self.arms))

    @property
    def n_arms(self) -> int:
        return len(self.arms)

    @property
    def means(self) -> tuple[float, ...]:
        return tuple(arm.mean for arm in self.arms)

    @property
    def bounds(self) -> MeanBounds:
        return MeanBounds(
            tuple(arm.lower for arm in self.arms),
            tuple(arm.upper for arm in self.arms),
        )

    @property
    def mu_star(self) -> float:
        if not self.arms:
            raise ValueError("empty arm set")
        return max(self.means)

    @property
    def best_arm(self) -> int:
        """Lowest index attaining the maximal mean (ties allowed)."""
        means = self.means
        return means.index(max(means))

    @property
    def gaps(self) -> tuple[float, ...]:
        star = self.mu_star
        return tuple(star - m for m in self.means)

    def subset(self, indices: Sequence[int]) -> "BanditInstance":
        return BanditInstance(self.support, tuple(self.arms[i] for i in indices))


@dataclass(frozen=True)
class BoundedWithFailure:
    """Mean bounds that hold per arm only with probability 1 - p_k.

    With all failure probabilities zero this is exactly ``MeanBounds``;
    policies consume only the bounds part, the analysis module adds the
    n * sum(p_k) regret term for the uncertain path.
    """

    bounds: MeanBounds
    failure_prob: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "failure_prob", tuple(float(p) for p in self.failure_prob))
        if len(self.failure_prob) != self.bounds.n_arms:
            raise ValueError("failure_prob length must match the arm count")
        for k, p in enumerate(self.failure_prob):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"arm {k + 1}: failure probability {p} outside [0, 1]")


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...] = ()


def validate_instance(instance: BanditInstance) -> ValidationReport:
    """Check every instance invariant, reporting violations instead of raising.

    Each violation names the offending arm (1-based position in the arm list)
    and the constraint; callers decide whether to abort.
    """
    sup = instance.support
    violations: list[str] = []
    if instance.n_arms == 0:
        violations.append("instance has no arms")
    violations.extend(instance.bounds.violations(sup))
    for k, arm in enumerate(instance.arms):
        name = f"arm {k + 1}"
        if not arm.lower <= arm.mean <= arm.upper:
            violations.append(f"{name}: mean {arm.mean} outside bounds [{arm.lower}, {arm.upper}]")
        if not sup.contains(arm.mean):
            violations.append(f"{name}: mean {arm.mean} outside support [{sup.a}, {sup.b}]")
        if arm.dist.kind not in DIST_KINDS:
            violations.append(f"{name}: unknown distribution kind {arm.dist.kind!r}")
        elif arm.dist.kind == "bernoulli":
            if not (sup.a <= 0.0 and sup.b >= 1.0 and 0.0 <= arm.mean <= 1.0):
                violations.append(f"{name}: bernoulli rewards need {{0, 1}} inside the support")
        elif arm.dist.kind == "clipped-gaussian":
            if arm.dist.scale is None or arm.dist.scale <= 0:
                violations.append(f"{name}: clipped-gaussian requires a positive scale")
            if not sup.a < arm.mean < sup.b:
                violations.append(
                    f"{name}: clipped-gaussian mean must lie strictly inside the support"
                )
    return ValidationReport(ok=not violations, violations=tuple(violations))


@dataclass(frozen=True)
class PruneResult:
    """Outcome of the pruning phase.

    ``retained`` holds the surviving original arm indices in their original
    order; ``mapping`` maps each surviving original index to its new index.
    """

    retained: tuple[int, ...]
    mapping: dict[int, int] = field(compare=False)
    l_max: float = 0.0

    @property
    def n_retained(self) -> int:
        return len(self.retained)


def prune(bounds: MeanBounds) -> PruneResult:
    """Discard every arm whose upper bound is strictly below max_k l_k.

    Arms with u_i exactly equal to l_max are retained (the elimination
    condition is the strict inequality u_i < l_max). At least one arm always
    survives: the arm attaining l_max has u >= l >= l_max.
    """
    if bounds.n_arms == 0:
        raise ValueError("cannot prune an empty arm set")
    l_max = bounds.l_max
    retained = tuple(k for k, u in enumerate(bounds.upper) if u >= l_max)
    mapping = {orig: new for new, orig in enumerate(retained)}
    return PruneResult(retained=retained, mapping=mapping, l_max=l_max)


# ---------------------------------------------------------------------------
# Instance file format (JSON). Field names are fixed:
#   {"support": {"a": 0.0, "b": 1.0},
#    "arms": [{"mean": 0.5, "dist": {"kind": "bernoulli"}, "lower": 0.0, "upper": 1.0}]}
# ---------------------------------------------------------------------------


def _parse_dist(obj: object) -> Distribution:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError("arm 'dist' must be an object with a 'kind' field")
    kind = obj["kind"]
    if kind not in DIST_KINDS:
        raise ValueError(f"unknown distribution kind {kind!r}; expected one of {DIST_KINDS}")
    scale = obj.get("scale")
    return Distribution(kind=kind, scale=None if scale is None else float(scale))


def instance_from_dict(data: dict) -> BanditInstance:
    try:
        sup = Support(float(data["support"]["a"]), float(data["support"]["b"]))
        arms = []
        for entry in data["arms"]:
            arms.append(
                Arm(
                    mean=float(entry["mean"]),
                    dist=_parse_dist(entry.get("dist", {"kind": "bernoulli"})),
                    lower=float(entry["lower"]),
                    upper=float(entry["upper"]),
                )
            )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed instance file: missing or bad field {exc}") from exc
    return BanditInstance(support=sup, arms=tuple(arms))


def instance_to_dict(instance: BanditInstance) -> dict:
    arms = []
    for arm in instance.arms:
        dist: dict[str, object] = {"kind": arm.dist.kind}
        if arm.dist.kind == "clipped-gaussian":
            dist["scale"] = arm.dist.scale
        arms.append({"mean": arm.mean, "dist": dist, "lower": arm.lower, "upper": arm.upper})
    return {"support": {"a": instance.support.a, "b": instance.support.b}, "arms": arms}


def load_instance(path: str | Path) -> BanditInstance:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return instance_from_dict(data)


def save_instance(instance: BanditInstance, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(instance), fh, indent=2, sort_keys=True)
        fh.write("\n")
