"""Primary-user occupancy model and energy-detector abstraction.

Each channel is an independent two-state ON/OFF process in continuous time:
sojourns in the busy state are Exponential(rate_on), sojourns in the idle
state are Exponential(rate_off).  Sensing happens once per slot, so slot to
slot evolution uses the exact two-state Markov discretization of the chain
over one slot_period.  Detectors are abstracted to per-channel false-alarm
and miss probabilities; no physical-layer signal model is simulated.

States are 1 = busy (primary user transmitting), 0 = idle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import as_bits


def _per_channel(value, num_channels: int, name: str) -> np.ndarray:
    """Broadcast a scalar or per-channel sequence to shape (num_channels,)."""
    a = np.asarray(value, dtype=float)
    if a.ndim == 0:
        a = np.full(num_channels, float(a))
    if a.shape != (num_channels,):
        raise ValueError(f"{name} must be scalar or length {num_channels}, got shape {a.shape}")
    return a


@dataclass(frozen=True, eq=False)
class ChannelModel:
    """ON/OFF occupancy model for a band of `num_channels` channels.

    Args:
        num_channels: number of channels M, >= 1.
        rate_on: exponential rate of leaving the busy state (scalar or per
            channel); mean busy sojourn is 1/rate_on.
        rate_off: exponential rate of leaving the idle state; mean idle
            sojourn is 1/rate_off.
        slot_period: sensing period in the sojourn time unit, > 0.
    """

    num_channels: int
    rate_on: np.ndarray
    rate_off: np.ndarray
    slot_period: float = 1.0

    def __init__(self, num_channels, rate_on, rate_off, slot_period=1.0):
        if num_channels < 1:
            raise ValueError(f"num_channels must be >= 1, got {num_channels}")
        rate_on = _per_channel(rate_on, num_channels, "rate_on")
        rate_off = _per_channel(rate_off, num_channels, "rate_off")
        if (rate_on <= 0).any() or (rate_off <= 0).any():
            raise ValueError("sojourn rates must be positive")
        if not slot_period > 0:
            raise ValueError(f"slot_period must be positive, got {slot_period}")
        object.__setattr__(self, "num_channels", int(num_channels))
        object.__setattr__(self, "rate_on", rate_on)
        object.__setattr__(self, "rate_off", rate_off)
        object.__setattr__(self, "slot_period", float(slot_period))


def stationary_occupancy(model: ChannelModel) -> np.ndarray:
    """Long-run probability that each channel is busy.

    Time share of the busy state is mean_on / (mean_on + mean_off) with
    mean_on = 1/rate_on and mean_off = 1/rate_off.
    """
    return model.rate_off / (model.rate_on + model.rate_off)


def persistence(model: ChannelModel) -> np.ndarray:
    """Per-channel probability that the state observed one slot later is
    unchanged, starting from the stationary distribution.

    For a two-state chain with relaxation rate r = rate_on + rate_off the
    one-slot transition kernel is P(stay busy) = p1 + p0*exp(-r*T) and
    P(stay idle) = p0 + p1*exp(-r*T); averaging over the stationary law
    gives 1 - 2*p0*p1*(1 - exp(-r*T)).  Monotone decreasing in slot_period.
    """
    r = model.rate_on + model.rate_off
    p1 = stationary_occupancy(model)
    decay = np.exp(-r * model.slot_period)
    return 1.0 - 2.0 * p1 * (1.0 - p1) * (1.0 - decay)


def sample_states(
    model: ChannelModel,
    rng: np.random.Generator,
    previous: np.ndarray | None = None,
) -> np.ndarray:
    """Draw the channel state vector for one slot.

    Without `previous` the draw is stationary: independent Bernoulli(p1) per
    channel.  With `previous` the exact one-slot transition kernel of the
    ON/OFF chain is applied, so consecutive slots are correlated (the history
    attack depends on this).

    Returns:
        uint8 vector of shape (num_channels,), 1 = busy.
    """
    p1 = stationary_occupancy(model)
    if previous is None:
        return (rng.random(model.num_channels) < p1).astype(np.uint8)
    previous = as_bits(previous)
    if previous.size != model.num_channels:
        raise ValueError(f"previous has {previous.size} channels, model has {model.num_channels}")
    decay = np.exp(-(model.rate_on + model.rate_off) * model.slot_period)
    # P(next=1 | prev) = p1 + (prev - p1) * exp(-r*T)
    prob_busy = p1 + (previous - p1) * decay
    return (rng.random(model.num_channels) < prob_busy).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class DetectorProfile:
    """Per-channel detector error rates of one sensing user.

    false_alarm[i] = P(report 1 | channel i idle), miss[i] = P(report 0 |
    channel i busy).  Both in [0, 1].
    """

    false_alarm: np.ndarray
    miss: np.ndarray

    def __init__(self, false_alarm, miss):
        fa = np.atleast_1d(np.asarray(false_alarm, dtype=float))
        ms = np.atleast_1d(np.asarray(miss, dtype=float))
        if fa.shape != ms.shape or fa.ndim != 1:
            raise ValueError(f"false_alarm/miss shapes differ: {fa.shape} vs {ms.shape}")
        for name, a in (("false_alarm", fa), ("miss", ms)):
            if ((a < 0) | (a > 1)).any():
                raise ValueError(f"{name} entries must lie in [0, 1]")
        object.__setattr__(self, "false_alarm", fa)
        object.__setattr__(self, "miss", ms)

    @classmethod
    def homogeneous(cls, num_channels: int, false_alarm: float, miss: float) -> "DetectorProfile":
        return cls(np.full(num_channels, false_alarm), np.full(num_channels, miss))

    @property
    def num_channels(self) -> int:
        return self.false_alarm.size


def sense(
    states: np.ndarray,
    profile: DetectorProfile,
    rng: np.random.Generator,
) -> np.ndarray:
    """One user's noisy sensing report for a true state vector.

    Busy channels are missed with probability miss[i]; idle channels raise a
    false alarm with probability false_alarm[i].
    """
    states = as_bits(states)
    if states.size != profile.num_channels:
        raise ValueError(f"states has {states.size} channels, profile has {profile.num_channels}")
    flip = np.where(states == 1, profile.miss, profile.false_alarm)
    errors = rng.random(states.size) < flip
    return np.bitwise_xor(states, errors.astype(np.uint8))
