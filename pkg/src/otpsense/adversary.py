"""Selfish-user strategies against pad-protected report sharing.

Three free-rider strategies, each a pure function of what the attacker can
actually observe:

* entropy selfishness (`ees_act`, `ees_decode_attempt`): sense nothing, copy
  someone else's published ciphertext as your own contribution, and if you
  want the content, guess a pad.  Against a complement-closed subset the
  ciphertext carries zero information, so guessing is all there is: success
  rate 1/size.
* partial sensing (`pes_act`): sense a few channels honestly and vote
  per block with whatever positions you covered; blocks with no covered
  position are coin flips between their alternatives.
* stale report (`history_act`): sense in one round, free-ride in the next
  using the outdated report; channel memory decays with the slot period, so
  the vote quality drops below an honest receiver's.

Ops fill `AttackOutcome.pad_recovered` only when the caller passes the
ground-truth pad; attackers themselves never see it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import as_bits
from .protocol import PadSubset, decrypt, recover_pad


@dataclass(frozen=True, eq=False)
class AttackOutcome:
    """What one attack attempt produced.

    Attributes:
        guessed_states: the attacker's best guess at the sender's report
            (ciphertext decrypted with the guessed pad).
        recovered_pad: the pad the attacker settled on.
        pad_recovered: True/False when ground truth was supplied to the op,
            None otherwise.
        channels_sensed: how many channels the attacker actually sensed.
    """

    guessed_states: np.ndarray
    recovered_pad: np.ndarray
    pad_recovered: bool | None
    channels_sensed: int


def _outcome(ciphertext, pad, sensed: int, true_pad) -> AttackOutcome:
    recovered = None if true_pad is None else bool(np.array_equal(pad, as_bits(true_pad)))
    return AttackOutcome(decrypt(ciphertext, pad), pad, recovered, sensed)


def ees_act(
    observed: list[np.ndarray],
    rng: np.random.Generator,
    modification: float = 0.0,
) -> np.ndarray:
    """Forge a contribution by replaying an observed ciphertext.

    Picks uniformly among the ciphertexts observed this round and flips each
    bit independently with probability `modification` (0 = verbatim copy).
    Call once per recipient to forward possibly different copies.
    """
    if not observed:
        raise ValueError("nothing observed to copy")
    if not 0 <= modification <= 1:
        raise ValueError(f"modification must lie in [0, 1], got {modification}")
    rows = [as_bits(c) for c in observed]
    if len({r.size for r in rows}) != 1:
        raise ValueError("observed ciphertexts must share one length")
    copy = rows[rng.integers(len(rows))].copy()
    if modification > 0:
        flips = (rng.random(copy.size) < modification).astype(np.uint8)
        copy ^= flips
    return copy


def ees_decode_attempt(
    ciphertext: np.ndarray,
    subset: PadSubset,
    rng: np.random.Generator,
    true_pad: np.ndarray | None = None,
) -> AttackOutcome:
    """Reportless decode: with no sensing there is no vote signal, so the
    best available pad is a uniform draw.  Succeeds with probability
    1/subset.size per ciphertext."""
    ciphertext = as_bits(ciphertext)
    if ciphertext.size != subset.length:
        raise ValueError(f"ciphertext has {ciphertext.size} bits, subset pads {subset.length}")
    pad = subset.pads[rng.integers(subset.size)].copy()
    return _outcome(ciphertext, pad, 0, true_pad)


def pes_act(
    sensed_channels: np.ndarray,
    partial_report: np.ndarray,
    ciphertext: np.ndarray,
    subset: PadSubset,
    rng: np.random.Generator,
    true_pad: np.ndarray | None = None,
) -> AttackOutcome:
    """Partial-sensing crack: vote per block on the covered positions.

    Args:
        sensed_channels: indices of channels the attacker sensed.
        partial_report: full-length report vector; only the entries at
            `sensed_channels` are read.
        ciphertext: the target's published ciphertext.
        subset: public pad subset (per-block alternatives must combine
            freely, which holds for both generators).
        rng: vote tie-breaks and uncovered-block guesses.
        true_pad: optional ground truth for `pad_recovered`.

    A block with no covered position is guessed uniformly among its
    alternatives, so with b uncovered blocks the full-pad success rate is
    bounded by 2**-b times the covered blocks' vote success.
    """
    ciphertext = as_bits(ciphertext)
    partial_report = as_bits(partial_report)
    if ciphertext.size != subset.length or partial_report.size != subset.length:
        raise ValueError("ciphertext and partial_report must match the subset length")
    sensed = np.unique(np.asarray(sensed_channels, dtype=np.int64))
    if sensed.size and (sensed[0] < 0 or sensed[-1] >= subset.length):
        raise ValueError("sensed channel indices out of range")
    covered = np.zeros(subset.length, dtype=bool)
    covered[sensed] = True
    target = np.bitwise_xor(partial_report, ciphertext)

    pad = np.empty(subset.length, dtype=np.uint8)
    for block in range(subset.num_blocks):
        positions = subset.block_positions(block)
        patterns = np.unique(subset.pads[:, positions], axis=0)
        voting = positions[covered[positions]]
        if voting.size == 0:
            choice = rng.integers(patterns.shape[0])
        else:
            votes = (patterns[:, covered[positions]] == target[voting]).sum(axis=1)
            best = np.flatnonzero(votes == votes.max())
            choice = best[0] if best.size == 1 else rng.choice(best)
        pad[positions] = patterns[choice]
    if not (subset.pads == pad).all(axis=1).any():
        raise ValueError("block choices did not assemble to a subset member")
    return _outcome(ciphertext, pad, int(sensed.size), true_pad)


def history_act(
    stale_report: np.ndarray,
    ciphertext: np.ndarray,
    subset: PadSubset,
    rng: np.random.Generator,
    true_pad: np.ndarray | None = None,
) -> AttackOutcome:
    """Free-ride on last round's sensing: run the ordinary vote recovery
    with the outdated report as if it were current."""
    pad = recover_pad(stale_report, ciphertext, subset, rng)
    return _outcome(as_bits(ciphertext), pad, as_bits(stale_report).size, true_pad)
