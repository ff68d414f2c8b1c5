"""Participation game between edge devices sharing a size-dependent reward pool.

A joint outcome is a binary vector ``p`` over devices (1 = train this round).
The pool pays ``alpha * (1 - err_a * S**-err_b)`` where ``S`` is the total
data contributed by participants; each participant receives the pool times its
data share and pays a private cost ``beta * s + gamma * w``.

Outcome enumeration uses binary counting with device 0 as the least
significant bit: outcome index ``k`` has device ``i`` participating iff
``(k >> i) & 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapacityError, UsageError

# Exhaustive enumeration over 2**n outcomes; refuse above this by default.
DEFAULT_ENUMERATION_CAP = 20

Decision = tuple[int, ...]


@dataclass(frozen=True)
class DeviceProfile:
    """One edge device: its data size and private cost coefficients.

    Per-round cost when participating is ``beta * data_size + gamma * channel_cost``.
    """

    id: int
    data_size: float
    beta: float = 1e-3
    gamma: float = 1e-5
    channel_cost: float = 3.5e5

    def __post_init__(self):
        if self.data_size < 0:
            raise UsageError(f"device {self.id}: data_size must be >= 0")
        if self.beta <= 0:
            raise UsageError(f"device {self.id}: beta must be > 0")
        if self.gamma <= 0:
            raise UsageError(f"device {self.id}: gamma must be > 0")
        if self.channel_cost < 0:
            raise UsageError(f"device {self.id}: channel_cost must be >= 0")


@dataclass(frozen=True)
class GameParams:
    """Global constants of the participation game."""

    alpha: float = 10.0   # reward pool scale
    err_a: float = 13.2   # error-curve coefficient
    err_b: float = 0.7    # error-curve exponent
    delta: float = 1e-3   # share regularizer, 0 < delta << smallest positive size

    def __post_init__(self):
        if self.alpha <= 0:
            raise UsageError("alpha must be > 0")
        if self.err_a < 0 or self.err_b < 0:
            raise UsageError("err_a and err_b must be >= 0")
        if self.delta <= 0:
            raise UsageError("delta must be > 0")


def validate_devices(devices: Sequence[DeviceProfile]) -> None:
    ids = [d.id for d in devices]
    if len(set(ids)) != len(ids):
        raise UsageError("device ids must be unique within a game instance")


def validate_decision(p: Sequence[int], n: int) -> Decision:
    if len(p) != n:
        raise UsageError(f"decision vector has length {len(p)}, expected {n}")
    if any(v not in (0, 1) for v in p):
        raise UsageError("decision vector entries must be 0 or 1")
    return tuple(int(v) for v in p)


def decision_index(p: Sequence[int]) -> int:
    """Outcome index of a decision vector (device 0 = least significant bit)."""
    return sum(int(v) << i for i, v in enumerate(p))


def decision_from_index(index: int, n: int) -> Decision:
    if not 0 <= index < (1 << n):
        raise IndexError(f"outcome index {index} out of range for n={n}")
    return tuple((index >> i) & 1 for i in range(n))


def total_incentive(p: Sequence[int], devices: Sequence[DeviceProfile],
                    game: GameParams) -> float:
    """Reward pool for outcome ``p``: 0 with no participants, else the literal
    formula (which can go negative when the contributed data is scarce)."""
    if len(p) != len(devices):
        raise UsageError("decision vector and device list lengths differ")
    if not any(p):
        return 0.0
    total = sum(pi * d.data_size for pi, d in zip(p, devices))
    if total > 0:
        err = game.err_a * math.exp(-game.err_b * math.log(total))
    elif game.err_b == 0:
        err = game.err_a
    else:
        err = math.inf
    return game.alpha * (1.0 - err)


def device_cost(i: int, devices: Sequence[DeviceProfile]) -> float:
    d = devices[i]
    return d.beta * d.data_size + d.gamma * d.channel_cost


def device_reward(i: int, p: Sequence[int], devices: Sequence[DeviceProfile],
                  game: GameParams) -> float:
    """Device i's data-proportional share of the pool; 0 when it sits out
    or contributes no data."""
    if p[i] == 0 or devices[i].data_size == 0:
        return 0.0
    total = sum(pj * d.data_size for pj, d in zip(p, devices))
    return devices[i].data_size / (game.delta + total) * total_incentive(p, devices, game)


def device_profit(i: int, p: Sequence[int], devices: Sequence[DeviceProfile],
                  game: GameParams) -> float:
    return device_reward(i, p, devices, game) - p[i] * device_cost(i, devices)


def total_profit(p: Sequence[int], devices: Sequence[DeviceProfile],
                 game: GameParams) -> float:
    """Sum of all device profits at outcome ``p`` (no enumeration involved)."""
    return sum(device_profit(i, p, devices, game) for i in range(len(devices)))


def outcome_bits(n: int) -> np.ndarray:
    """(2**n, n) 0/1 matrix; row k is the decision vector of outcome k."""
    outcomes = np.arange(1 << n, dtype=np.int64)
    return (outcomes[:, None] >> np.arange(n)) & 1


def profit_tensor(devices: Sequence[DeviceProfile], game: GameParams,
                  cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
    """(2**n, n) table of device profits over every joint outcome.

    Row k column i equals ``device_profit(i, decision_from_index(k, n), ...)``.
    """
    validate_devices(devices)
    n = len(devices)
    if n > cap:
        raise CapacityError(f"n={n} exceeds enumeration cap {cap} (2**n outcomes)")
    if n == 0:
        return np.zeros((1, 0))

    sizes = np.array([d.data_size for d in devices], dtype=float)
    costs = np.array([device_cost(i, devices) for i in range(n)], dtype=float)
    bits = outcome_bits(n).astype(float)

    totals = bits @ sizes
    participating = bits.sum(axis=1) > 0
    with np.errstate(divide="ignore"):
        err = np.where(totals > 0,
                       game.err_a * np.exp(-game.err_b * np.log(np.where(totals > 0, totals, 1.0))),
                       np.inf if game.err_b > 0 else game.err_a)
    pool = np.where(participating, game.alpha * (1.0 - err), 0.0)

    share_num = bits * sizes  # p_i * s_i, zero for non-participants
    with np.errstate(invalid="ignore"):
        rewards = np.where(share_num > 0,
                           share_num / (game.delta + totals)[:, None] * pool[:, None],
                           0.0)
    return rewards - bits * costs


def outcome_totals(profits: np.ndarray) -> np.ndarray:
    """Total profit per outcome given a profit tensor."""
    return profits.sum(axis=1)


def random_devices(n: int, seed: int,
                   size_choices: Sequence[float] = (50.0, 500.0),
                   probabilities: Sequence[float] | None = None,
                   **device_kwargs) -> list[DeviceProfile]:
    """n devices with sizes drawn from ``size_choices`` (equiprobable by default).

    Sizes come from the dedicated size stream of the seeded generator via
    inverse-CDF lookup, so draws are stable across platforms and runs.
    """
    from .rng import SIZE_STREAM, SplitMix64

    if n < 0:
        raise UsageError("n must be >= 0")
    if not size_choices:
        raise UsageError("size_choices must be nonempty")
    if probabilities is None:
        weights = np.full(len(size_choices), 1.0 / len(size_choices))
    else:
        weights = np.asarray(probabilities, dtype=float)
        if weights.shape != (len(size_choices),):
            raise UsageError("probabilities must match size_choices in length")
        if (weights < 0).any() or abs(weights.sum() - 1.0) > 1e-9:
            raise UsageError("probabilities must be nonnegative and sum to 1")
    cdf = np.cumsum(weights)
    gen = SplitMix64(seed ^ SIZE_STREAM)
    choices = list(size_choices)
    out = []
    for i in range(n):
        u = gen.uniform()
        k = min(int(np.searchsorted(cdf, u, side="right")), len(choices) - 1)
        out.append(DeviceProfile(id=i, data_size=float(choices[k]), **device_kwargs))
    return out
