"""Recommendation policies over a retrieved document pool.

Every policy fills a slate one slot at a time. Per slot it either exploits
(argmax of a selection index over the remaining pool) or explores (uniform
draw from the remaining pool), governed by an exploration probability. The
selection index is the observed mean reward, optionally augmented with an
upper-confidence bonus that makes untried documents maximally attractive.

Policies differ only in how the exploration probability evolves: constant,
scheduled, tuned online by multiplicative weights, driven by value-change
feedback per situation, or mapped from the situation's estimated risk.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError
from .risk import RiskModel, ValidationError
from .situations import Situation


class InsufficientCandidatesError(ValueError):
    """The document pool is smaller than the requested slate."""


# ---------------------------------------------------------------------------
# building blocks


def ucb_index(clicks: int, recoms: int, t: int) -> float:
    """Selection index: mean reward plus sqrt(2 ln t / recoms).

    Untried documents score +inf so that each one is attempted before any
    document is repeated purely on confidence grounds.
    """
    if t < 1:
        raise ValueError(f"trial counter must be >= 1, got {t}")
    if recoms < 0 or clicks < 0 or clicks > recoms:
        raise ValueError(f"invalid counts clicks={clicks} recoms={recoms}")
    if recoms == 0:
        return math.inf
    return clicks / recoms + math.sqrt(2.0 * math.log(t) / recoms)


def risk_to_epsilon(risk: float, eps_min: float, eps_max: float) -> float:
    """Map risk in [0, 1] linearly onto [eps_max, eps_min]: full risk explores
    least, zero risk explores most."""
    if not 0.0 <= eps_min <= eps_max <= 1.0:
        raise ConfigError(f"need 0 <= eps_min <= eps_max <= 1, got ({eps_min}, {eps_max})")
    if not 0.0 <= risk <= 1.0:
        raise ValidationError(f"risk outside [0, 1]: {risk}")
    # blend of the endpoints rather than eps_max - risk * span: the products
    # with 0.0 and 1.0 are exact, so both endpoints land exactly
    return (1.0 - risk) * eps_max + risk * eps_min


def beginning_schedule(t: int, explore_fraction: float, horizon: int) -> float:
    """Explore every slot for the first explore_fraction of the horizon, then stop."""
    if not 0.0 <= explore_fraction <= 1.0:
        raise ConfigError(f"explore_fraction must lie in [0, 1], got {explore_fraction}")
    if horizon < 1:
        raise ConfigError(f"horizon must be >= 1, got {horizon}")
    return 1.0 if t <= explore_fraction * horizon else 0.0


def decreasing_schedule(t: int, eps0: float) -> float:
    """Exploration probability eps0 / t."""
    if not 0.0 < eps0 <= 1.0:
        raise ConfigError(f"eps0 must lie in (0, 1], got {eps0}")
    if t < 1:
        raise ValueError(f"trial counter must be >= 1, got {t}")
    return eps0 / t


def stepwise_schedule(t: int) -> float:
    """Exploration probability 1 - 0.01 per hundred trials, floored at 0.01."""
    if t < 1:
        raise ValueError(f"trial counter must be >= 1, got {t}")
    return max(1.0 - 0.01 * (t // 100), 0.01)


def eg_candidates() -> np.ndarray:
    """The hundred candidate exploration rates 0.99, 0.98, ..., 0.00."""
    return np.array([1.0 - 0.01 * i for i in range(1, 101)])


def eg_update(weights: np.ndarray, chosen: int, reward: float, lr: float) -> np.ndarray:
    """Multiplicative-weights step with importance weighting.

    The chosen candidate's weight is scaled by exp(lr * reward / p_chosen);
    the result is renormalized to sum to 1.
    """
    if lr <= 0.0:
        raise ConfigError(f"learning rate must be positive, got {lr}")
    if not 0.0 <= reward <= 1.0:
        raise ValidationError(f"reward outside [0, 1]: {reward}")
    if not 0 <= chosen < weights.shape[0]:
        raise IndexError(f"chosen candidate {chosen} out of range")
    total = float(weights.sum())
    if total <= 0.0:
        raise ConfigError("weights must have positive mass")
    probs = weights / total
    # cap keeps the importance-weighted exponent finite for rare candidates
    exponent = min(lr * reward / float(probs[chosen]), 50.0)
    updated = probs.copy()
    updated[chosen] = probs[chosen] * math.exp(exponent)
    return updated / updated.sum()


def vdbe_activation(delta: float, temperature: float) -> float:
    """Squashes a value change into (0, 1): (1 - e^(-d/T)) / (1 + e^(-d/T))."""
    if temperature <= 0.0:
        raise ConfigError(f"temperature must be positive, got {temperature}")
    decayed = math.exp(-abs(delta) / temperature)
    return (1.0 - decayed) / (1.0 + decayed)


def vdbe_update(eps: float, value_delta: float, step: float, temperature: float) -> float:
    """Move eps toward the activation of the observed value change."""
    if not 0.0 <= step <= 1.0:
        raise ConfigError(f"step must lie in [0, 1], got {step}")
    return step * vdbe_activation(value_delta, temperature) + (1.0 - step) * eps


def recommend_slate(clicks: np.ndarray, recoms: np.ndarray, t: int, use_bonus: bool,
                    eps: float, slate_size: int, rng: np.random.Generator,
                    allow_short: bool = False) -> tuple[np.ndarray, int]:
    """Assemble a slate of distinct documents from one pool.

    Draws two uniforms per slot up front (explore/exploit coin and explore
    position) so replays consume the generator identically on every backend.
    Returns the chosen indices and the number of exploration slots.
    """
    if t < 1:
        raise ValueError(f"trial counter must be >= 1, got {t}")
    if not 0.0 <= eps <= 1.0:
        raise ConfigError(f"exploration probability outside [0, 1]: {eps}")
    pool = int(clicks.shape[0])
    if pool < slate_size:
        if not allow_short:
            raise InsufficientCandidatesError(
                f"pool has {pool} documents, slate needs {slate_size}"
            )
        slate_size = pool
    qs = rng.random(slate_size)
    us = rng.random(slate_size)
    out = np.empty(slate_size, dtype=np.int64)
    explored = kernels.select_slate(
        np.ascontiguousarray(clicks, dtype=np.float64),
        np.ascontiguousarray(recoms, dtype=np.float64),
        math.log(t), use_bonus, eps, qs, us, out,
    )
    return out, int(explored)


# ---------------------------------------------------------------------------
# policy objects


@dataclass
class RunBinding:
    """What a policy may look at when computing its exploration rate."""

    horizon: int
    n_cases: int
    pool_size: int
    situations: list[Situation]
    risk_model: RiskModel | None = None


class Policy:
    """Base: a constant-zero exploration rate over the bonus-free index."""

    id = "exploit"
    uses_bonus = False
    needs_risk = False

    def __init__(self, label: str | None = None):
        self.label = label if label is not None else self.id

    def bind(self, binding: RunBinding) -> None:
        self.binding = binding

    def exploration_rate(self, t: int, case_index: int, rng: np.random.Generator) -> float:
        return 0.0

    def observe(self, t: int, case_index: int, slate: np.ndarray,
                clicks: np.ndarray, value_delta: float,
                rng: np.random.Generator) -> None:
        pass


class ExploitPolicy(Policy):
    """Always takes the documents with the best observed mean reward."""

    id = "exploit"
    uses_bonus = False


class EpsGreedyPolicy(Policy):
    """Constant exploration probability over the bonus-free index."""

    id = "eps-greedy"
    uses_bonus = False

    def __init__(self, eps: float = 0.1, label: str | None = None):
        super().__init__(label)
        if not 0.0 <= eps <= 1.0:
            raise ConfigError(f"eps outside [0, 1]: {eps}")
        self.eps = eps

    def exploration_rate(self, t, case_index, rng):
        return self.eps


class EpsUcbPolicy(EpsGreedyPolicy):
    """Constant exploration probability over the confidence-bonus index."""

    id = "eps-ucb"
    uses_bonus = True


class BeginningPolicy(Policy):
    """All-exploration opening phase, then pure exploitation."""

    id = "eps-beginning"
    uses_bonus = False

    def __init__(self, explore_fraction: float = 0.2, label: str | None = None):
        super().__init__(label)
        if not 0.0 <= explore_fraction <= 1.0:
            raise ConfigError(f"explore_fraction outside [0, 1]: {explore_fraction}")
        self.explore_fraction = explore_fraction

    def exploration_rate(self, t, case_index, rng):
        return beginning_schedule(t, self.explore_fraction, self.binding.horizon)


class BeginningUcbPolicy(BeginningPolicy):
    id = "beginning-ucb"
    uses_bonus = True


class DecreasingPolicy(Policy):
    """Exploration probability eps0 / t."""

    id = "eps-decreasing"
    uses_bonus = False

    def __init__(self, eps0: float = 1.0, label: str | None = None):
        super().__init__(label)
        if not 0.0 < eps0 <= 1.0:
            raise ConfigError(f"eps0 outside (0, 1]: {eps0}")
        self.eps0 = eps0

    def exploration_rate(self, t, case_index, rng):
        return decreasing_schedule(t, self.eps0)


class DecreasingUcbPolicy(Policy):
    """Stepwise-decaying exploration over the confidence-bonus index."""

    id = "decreasing-ucb"
    uses_bonus = True

    def exploration_rate(self, t, case_index, rng):
        return stepwise_schedule(t)


class EgUcbPolicy(Policy):
    """Tunes a global exploration rate online by multiplicative weights.

    Each trial samples a candidate rate from the current weights; the weight
    of the sampled candidate grows when the slate earns at least one click.
    """

    id = "eg-ucb"
    uses_bonus = True

    def __init__(self, lr: float = 0.05, label: str | None = None):
        super().__init__(label)
        if lr <= 0.0:
            raise ConfigError(f"learning rate must be positive, got {lr}")
        self.lr = lr
        self.candidates = eg_candidates()
        self.weights = np.full(self.candidates.shape[0], 1.0 / self.candidates.shape[0])
        self._chosen: int | None = None

    def bind(self, binding):
        super().bind(binding)
        self.weights = np.full(self.candidates.shape[0], 1.0 / self.candidates.shape[0])
        self._chosen = None

    def exploration_rate(self, t, case_index, rng):
        total = float(self.weights.sum())
        cumulative = np.cumsum(self.weights / total)
        self._chosen = int(np.searchsorted(cumulative, rng.random(), side="right"))
        if self._chosen >= self.candidates.shape[0]:
            self._chosen = self.candidates.shape[0] - 1
        return float(self.candidates[self._chosen])

    def observe(self, t, case_index, slate, clicks, value_delta, rng):
        assert self._chosen is not None
        reward = 1.0 if clicks.any() else 0.0
        self.weights = eg_update(self.weights, self._chosen, reward, self.lr)


class VdbeUcbPolicy(Policy):
    """Keeps one exploration rate per situation, raised while the pool's value
    estimates are still moving and lowered as they settle."""

    id = "vdbe-ucb"
    uses_bonus = True

    def __init__(self, step: float | None = None, temperature: float = 0.33,
                 initial_eps: float = 1.0, label: str | None = None):
        super().__init__(label)
        if step is not None and not 0.0 <= step <= 1.0:
            raise ConfigError(f"step outside [0, 1]: {step}")
        if temperature <= 0.0:
            raise ConfigError(f"temperature must be positive, got {temperature}")
        if not 0.0 <= initial_eps <= 1.0:
            raise ConfigError(f"initial_eps outside [0, 1]: {initial_eps}")
        self.step = step
        self.temperature = temperature
        self.initial_eps = initial_eps

    def bind(self, binding):
        super().bind(binding)
        # default step 1/|pool| follows the size of the document pool
        self._step = self.step if self.step is not None else 1.0 / binding.pool_size
        self._eps = np.full(binding.n_cases, self.initial_eps)

    def exploration_rate(self, t, case_index, rng):
        return float(self._eps[case_index])

    def observe(self, t, case_index, slate, clicks, value_delta, rng):
        self._eps[case_index] = vdbe_update(
            float(self._eps[case_index]), value_delta, self._step, self.temperature
        )


class RiskUcbPolicy(Policy):
    """Maps the situation's estimated risk onto the exploration rate and
    propagates the estimate back after each trial."""

    id = "risk-ucb"
    uses_bonus = True
    needs_risk = True

    def __init__(self, eps_min: float = 0.1, eps_max: float = 0.5,
                 label: str | None = None):
        super().__init__(label)
        if not 0.0 <= eps_min <= eps_max <= 1.0:
            raise ConfigError(f"need 0 <= eps_min <= eps_max <= 1, got ({eps_min}, {eps_max})")
        self.eps_min = eps_min
        self.eps_max = eps_max
        self._last_risk: float | None = None

    def bind(self, binding):
        super().bind(binding)
        if binding.risk_model is None:
            raise ConfigError("risk-ucb requires a risk model")
        self._last_risk = None

    def exploration_rate(self, t, case_index, rng):
        assert self.binding.risk_model is not None
        breakdown = self.binding.risk_model.evaluate(self.binding.situations[case_index])
        self._last_risk = breakdown.total
        return risk_to_epsilon(breakdown.total, self.eps_min, self.eps_max)

    def observe(self, t, case_index, slate, clicks, value_delta, rng):
        assert self.binding.risk_model is not None and self._last_risk is not None
        self.binding.risk_model.observe(self.binding.situations[case_index], self._last_risk)


POLICY_TYPES: dict[str, type[Policy]] = {
    cls.id: cls
    for cls in (
        ExploitPolicy,
        EpsGreedyPolicy,
        EpsUcbPolicy,
        BeginningPolicy,
        BeginningUcbPolicy,
        DecreasingPolicy,
        DecreasingUcbPolicy,
        EgUcbPolicy,
        VdbeUcbPolicy,
        RiskUcbPolicy,
    )
}


def build_policy(spec: dict) -> Policy:
    """Instantiate a policy from an {'id': ..., params...} mapping."""
    if "id" not in spec:
        raise ConfigError("policy spec missing field 'id'")
    spec = dict(spec)
    policy_id = spec.pop("id")
    cls = POLICY_TYPES.get(policy_id)
    if cls is None:
        raise ConfigError(
            f"unknown policy {policy_id!r}, expected one of {sorted(POLICY_TYPES)}"
        )
    try:
        return cls(**spec)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for policy {policy_id!r}: {exc}") from None
