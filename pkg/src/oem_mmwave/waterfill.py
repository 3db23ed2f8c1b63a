"""Water-filling power allocation over the per-stream, per-mode SNR grid.

Channels are indexed (i, l): spatial stream i of OAM mode l.  Grids are
stored as (streams, modes) arrays and flattened mode-major (all streams
of mode 0, then mode 1, ...) wherever a linear channel order is needed;
the same order keys the per-channel random substreams so that configs
sharing a channel layout see identical fading draws.

``log 2`` below always means the natural logarithm of 2: the water
level is 1 / (mu* ln 2).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import BisectionError, DomainError, InvalidConfigError

LN2 = math.log(2.0)

GridLike = Union["SnrGrid", np.ndarray]


@dataclass(frozen=True)
class SnrGrid:
    """Nonnegative SNR weights gamma_{i,l}, shape (streams, modes).

    ``mean_values`` optionally carries the average SNRs of the ergodic
    problem alongside an instantaneous realization.
    """

    values: np.ndarray
    mean_values: Optional[np.ndarray] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if not np.all(np.isfinite(v)) or np.any(v < 0.0):
            raise InvalidConfigError("SNR grid entries must be finite and nonnegative")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class PowerPolicy:
    """Result of one water-filling solve.

    allocations : nonnegative powers, same shape as the input grid.
    water_level : common value of P + 1/gamma on active channels,
        equal to 1/(mu* ln 2); 0 for the outage (all-off) policy.
    active_set : sorted (i, l) index pairs with positive power.
    total_power : the power budget the solve was run against.
    """

    allocations: np.ndarray
    water_level: float
    active_set: tuple[tuple[int, int], ...]
    total_power: float

    @property
    def mu_star(self) -> float:
        """Optimal multiplier of the power constraint."""
        if self.water_level <= 0.0:
            return math.inf
        return 1.0 / (self.water_level * LN2)

    @property
    def is_outage(self) -> bool:
        return not self.active_set


def _grid_values(snr: GridLike) -> np.ndarray:
    values = snr.values if isinstance(snr, SnrGrid) else np.asarray(snr, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    return values


def flatten_mode_major(grid: np.ndarray) -> np.ndarray:
    """Flatten (streams, modes) to a vector ordered mode-major."""
    return np.asarray(grid).flatten(order="F")


def waterfill_instantaneous(snr: GridLike, total_power: float) -> PowerPolicy:
    """Iterative active-set water filling over one SNR realization.

    Starts from all channels with positive SNR, solves the water level
    from the budget over the current candidate set, drops every channel
    whose tentative power is not strictly positive, and repeats until
    the set stabilizes.  Channels at the threshold exactly count as
    inactive.  If no channel has positive SNR the outage (all-zero)
    policy is returned.
    """
    if total_power <= 0.0:
        raise InvalidConfigError(f"total power must be positive, got {total_power}")
    gamma = _grid_values(snr)
    active = gamma > 0.0
    if not np.any(active):
        return PowerPolicy(
            allocations=np.zeros_like(gamma), water_level=0.0,
            active_set=(), total_power=total_power,
        )
    inv = np.zeros_like(gamma)
    inv[active] = 1.0 / gamma[active]
    while True:
        count = int(np.count_nonzero(active))
        water = (total_power + inv[active].sum()) / count
        # The best channel always survives: water > 1/gamma_max whenever
        # the budget is positive, so the loop cannot empty the set.
        keep = active & (water - inv > 0.0)
        if keep.sum() == count:
            break
        active = keep
    allocations = np.where(active, water - inv, 0.0)
    pairs = tuple(sorted((int(i), int(l)) for i, l in zip(*np.nonzero(active))))
    return PowerPolicy(
        allocations=allocations, water_level=float(water),
        active_set=pairs, total_power=total_power,
    )


def sample_snr_realizations(mean_flat: np.ndarray, count: int, seed: int,
                            stage: int = 0) -> np.ndarray:
    """Draw (count, K) i.i.d. exponential SNRs, one substream per channel.

    Each channel k uses its own generator keyed by (seed, stage, k), so
    two configurations sharing a channel order see identical draws for
    the channels they have in common.
    """
    mean_flat = np.asarray(mean_flat, dtype=float)
    out = np.empty((count, mean_flat.size))
    for k, mean in enumerate(mean_flat):
        rng = np.random.default_rng([int(seed), int(stage), k])
        out[:, k] = rng.exponential(mean, count) if mean > 0.0 else 0.0
    return out


def _allocation_rule(mu: float) -> Callable[[np.ndarray], np.ndarray]:
    water = 1.0 / (mu * LN2)

    def rule(gamma: np.ndarray) -> np.ndarray:
        gamma = np.asarray(gamma, dtype=float)
        out = np.zeros_like(gamma)
        mask = gamma > 0.0
        out[mask] = np.maximum(water - 1.0 / gamma[mask], 0.0)
        return out

    return rule


def waterfill_ergodic(mean_snr: GridLike, total_power: float, samples: int = 10_000,
                      seed: int = 0) -> tuple[float, Callable[[np.ndarray], np.ndarray]]:
    """Solve the expectation-constrained water-filling multiplier.

    Draws ``samples`` exponential SNR realizations per channel with the
    given means and bisects mu until the sample-average allocated power
    of the rule P(gamma) = max(0, 1/(mu ln 2) - 1/gamma) meets the
    budget to 1e-6 relative.  Returns (mu_star, rule).
    """
    if total_power <= 0.0:
        raise InvalidConfigError(f"total power must be positive, got {total_power}")
    if samples < 1_000:
        raise InvalidConfigError(f"need at least 1000 samples, got {samples}")
    means = flatten_mode_major(_grid_values(mean_snr))
    if not np.any(means > 0.0):
        raise InvalidConfigError("at least one channel must have positive mean SNR")
    gammas = sample_snr_realizations(means, samples, seed)

    def mean_alloc(mu: float) -> float:
        return float(_allocation_rule(mu)(gammas).sum(axis=1).mean())

    # mean_alloc is strictly decreasing in mu; bracket the budget first.
    lo = hi = 1.0 / (total_power * LN2)
    for _ in range(200):
        if mean_alloc(lo) > total_power:
            break
        lo /= 2.0
    for _ in range(200):
        if mean_alloc(hi) < total_power:
            break
        hi *= 2.0
    residual = lambda mu: abs(mean_alloc(mu) - total_power) / total_power
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if residual(mid) <= 1e-6:
            return mid, _allocation_rule(mid)
        if mean_alloc(mid) > total_power:
            lo = mid
        else:
            hi = mid
    mid = 0.5 * (lo + hi)
    if residual(mid) <= 1e-6:
        return mid, _allocation_rule(mid)
    raise BisectionError("multiplier bisection did not meet the power budget", residual(mid))


def classify_region(gamma_0: float, gamma_1: float, mu_star: float) -> str:
    """Region of the two-channel SNR plane under a fixed multiplier.

    R1: both channels above the activation threshold mu* ln 2.
    R2: only gamma_0 above.  R3: only gamma_1 above.  R4: outage.
    """
    if mu_star <= 0.0:
        raise DomainError(f"mu_star must be positive, got {mu_star}")
    threshold = mu_star * LN2
    first, second = gamma_0 > threshold, gamma_1 > threshold
    if first and second:
        return "R1"
    if first:
        return "R2"
    if second:
        return "R3"
    return "R4"


def brute_force_oracle(snr: GridLike, total_power: float) -> PowerPolicy:
    """Exhaustive active-set search; independent check of the iterative solver.

    Enumerates every nonempty candidate set (at most 2^6 - 1 channels
    supported), solves the equal-water-level system on it, keeps
    candidates whose powers are all strictly positive, and returns the
    feasible candidate with the highest sum rate.
    """
    if total_power <= 0.0:
        raise InvalidConfigError(f"total power must be positive, got {total_power}")
    gamma = _grid_values(snr)
    indices = [tuple(map(int, idx)) for idx in zip(*np.nonzero(gamma > 0.0))]
    if len(indices) > 6:
        raise DomainError(f"exhaustive search supports at most 6 channels, got {len(indices)}")
    if not indices:
        return PowerPolicy(
            allocations=np.zeros_like(gamma), water_level=0.0,
            active_set=(), total_power=total_power,
        )
    best = None
    for size in range(1, len(indices) + 1):
        for subset in itertools.combinations(indices, size):
            g = np.array([gamma[idx] for idx in subset])
            water = (total_power + (1.0 / g).sum()) / size
            powers = water - 1.0 / g
            if np.any(powers <= 0.0):
                continue
            rate = float(np.log2(1.0 + powers * g).sum())
            if best is None or rate > best[0]:
                best = (rate, subset, powers, water)
    rate, subset, powers, water = best
    allocations = np.zeros_like(gamma)
    for idx, p in zip(subset, powers):
        allocations[idx] = p
    return PowerPolicy(
        allocations=allocations, water_level=float(water),
        active_set=tuple(sorted(subset)), total_power=total_power,
    )
