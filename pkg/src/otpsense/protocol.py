"""One-time-pad report protection with votable pad subsets.

A sender encrypts its length-M sensing report R as E = R xor K, drawing the
pad K uniformly from a public subset of pads.  A receiver that sensed the
same spectrum recovers K by weighted voting: candidate pads that agree with
own_report xor E on many positions are likely, because honest reports agree
per channel with probability eta_i > 1/2.  An eavesdropper without a report
of its own learns nothing (see leakage.py), so the pad subset acts as a
trapdoor: sensing effort is the key.

Subsets come in two flavours:

* `generate_subset`: a random base pad and its bitwise complement, interleaved
  over contiguous blocks of `block_length` bits.  The subset is every pad that
  picks, per block, either the base block or its complement; cardinality
  2**num_blocks.  Any two members differ in at least block_length positions
  (block_length sized votes), and the per-block recovery success rate is
  `predict_success_rate(block_length, eta)`.
* `generate_pairs`: independent random complement pairs, no block structure.

Both are closed under bitwise complement, which is what makes the published
ciphertext carry zero information about the channel states (every bit of a
uniformly drawn pad is marginally Bernoulli(1/2)).

When block_length does not divide M, blocks are laid out on a virtual report
of length padded_length = block_length * num_blocks whose tail repeats the
leading report bits.  Pads are truncated back to M bits; a receiver that
replays the tail convention finds that each virtual tail vote reduces to the
vote on the leading position it mirrors, so `recover_pad` simply counts the
leading padded_length - M positions twice.  The final partial block is then
decided by its surviving M mod block_length real positions.

Binary vectors are numpy uint8 arrays (see bits.py).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bits import as_bits, complement, random_bits, xor
from .spectrum import DetectorProfile

# generate_subset materializes all 2**num_blocks pads; block counts past this
# would not fit in memory and the large-M experiments use pair subsets anyway.
MAX_BLOCKS = 16


def generate_pad(length: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random pad of `length` bits."""
    return random_bits(length, rng)


def _sort_rows(pads: np.ndarray) -> np.ndarray:
    """Canonical subset order: rows sorted as big-endian bit strings."""
    order = np.lexsort(pads.T[::-1])
    return pads[order]


@dataclass(frozen=True, eq=False)
class PadSubset:
    """Public pad subset plus its block geometry.

    Attributes:
        pads: uint8 array of shape (size, length), rows distinct and in
            canonical sorted order.
        block_length: vote-block width the subset was built for.
        num_blocks: number of blocks; block_length * num_blocks is the
            virtual (padded) report length, >= length.
    """

    pads: np.ndarray
    block_length: int
    num_blocks: int

    def __init__(self, pads, block_length: int | None = None, num_blocks: int = 1):
        pads = np.atleast_2d(np.asarray(pads, dtype=np.uint8))
        if pads.ndim != 2 or pads.shape[0] < 1 or pads.shape[1] < 1:
            raise ValueError(f"pads must be a non-empty 2-D bit array, got shape {pads.shape}")
        if pads.max(initial=0) > 1:
            raise ValueError("pad entries must be 0 or 1")
        if block_length is None:
            block_length = pads.shape[1]
        if not 1 <= block_length <= pads.shape[1]:
            raise ValueError(f"block_length {block_length} out of range for length {pads.shape[1]}")
        if num_blocks < 1 or block_length * num_blocks < pads.shape[1]:
            raise ValueError("num_blocks * block_length must cover the pad length")
        pads = _sort_rows(pads)
        if pads.shape[0] > 1 and (pads[1:] == pads[:-1]).all(axis=1).any():
            raise ValueError("subset pads must be distinct")
        object.__setattr__(self, "pads", pads)
        object.__setattr__(self, "block_length", int(block_length))
        object.__setattr__(self, "num_blocks", int(num_blocks))

    @property
    def size(self) -> int:
        return self.pads.shape[0]

    @property
    def length(self) -> int:
        return self.pads.shape[1]

    @property
    def padded_length(self) -> int:
        return self.block_length * self.num_blocks

    def block_positions(self, block: int) -> np.ndarray:
        """Original bit positions owned by `block` (0-based), after the
        virtual tail is folded away.  All blocks except possibly the last own
        exactly block_length positions."""
        if not 0 <= block < self.num_blocks:
            raise ValueError(f"block {block} out of range")
        lo = block * self.block_length
        hi = min(lo + self.block_length, self.length)
        return np.arange(lo, hi)


def is_secure_pair_closed(subset: PadSubset) -> bool:
    """True when every pad's bitwise complement is also in the subset."""
    rows = {row.tobytes() for row in subset.pads}
    return all(complement(row).tobytes() in rows for row in subset.pads)


def generate_subset(
    length: int,
    block_length: int,
    rng: np.random.Generator,
    base_pad: np.ndarray | None = None,
) -> PadSubset:
    """Block-interleaved complement-pair subset (the protocol's default).

    Starts from a random base pad and its complement and takes every per-block
    mix of the two.  `base_pad`, when given, must already have the padded
    length block_length * ceil(length / block_length); pads are truncated back
    to `length` bits.

    Raises:
        ValueError: block_length outside [1, length], or more than MAX_BLOCKS
            blocks (the subset would have > 2**MAX_BLOCKS members).
    """
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    if not 1 <= block_length <= length:
        raise ValueError(f"block_length must be in [1, {length}], got {block_length}")
    num_blocks = -(-length // block_length)
    if num_blocks > MAX_BLOCKS:
        raise ValueError(
            f"{num_blocks} blocks would give 2**{num_blocks} pads; refusing past {MAX_BLOCKS}"
        )
    padded = block_length * num_blocks
    if base_pad is None:
        base_pad = random_bits(padded, rng)
    else:
        base_pad = as_bits(base_pad)
        if base_pad.size != padded:
            raise ValueError(f"base_pad must have padded length {padded}, got {base_pad.size}")
    choices = np.stack([base_pad, complement(base_pad)])
    # every pad picks, per block, the base block or the complement block
    pads = np.empty((1 << num_blocks, padded), dtype=np.uint8)
    for i in range(1 << num_blocks):
        for b in range(num_blocks):
            lo = b * block_length
            pads[i, lo:lo + block_length] = choices[(i >> b) & 1, lo:lo + block_length]
    return PadSubset(pads[:, :length], block_length, num_blocks)


def generate_pairs(length: int, pairs: int, rng: np.random.Generator) -> PadSubset:
    """Subset of `pairs` independent random complement pairs (no block
    structure; block_length = length, a single vote block)."""
    if pairs < 1:
        raise ValueError(f"pairs must be >= 1, got {pairs}")
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    if 2 * pairs > 2 ** min(length, 62):
        raise ValueError(f"cannot fit {pairs} distinct pairs in {length} bits")
    seen: set[bytes] = set()
    rows = []
    attempts = 0
    while len(rows) < 2 * pairs:
        attempts += 1
        if attempts > 1000 * pairs + 100:
            raise ValueError("could not draw distinct pairs; length too small")
        base = random_bits(length, rng)
        comp = complement(base)
        if base.tobytes() in seen or comp.tobytes() in seen:
            continue
        seen.add(base.tobytes())
        seen.add(comp.tobytes())
        rows.append(base)
        rows.append(comp)
    return PadSubset(np.stack(rows), length, 1)


def encrypt_report(
    report: np.ndarray,
    subset: PadSubset,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Encrypt one report with a fresh uniformly drawn pad.

    Returns:
        (ciphertext, pad): both length-M uint8 vectors; ciphertext is
        report xor pad.
    """
    report = as_bits(report)
    if report.size != subset.length:
        raise ValueError(f"report has {report.size} bits, subset pads have {subset.length}")
    pad = subset.pads[rng.integers(subset.size)]
    return xor(report, pad), pad.copy()


def decrypt(ciphertext: np.ndarray, pad: np.ndarray) -> np.ndarray:
    """Invert `encrypt_report` given the pad actually used."""
    return xor(ciphertext, pad)


def _vote_weights(subset: PadSubset, eta: np.ndarray | None) -> np.ndarray:
    """Per-position vote weight: log odds when eta is given, else unit, with
    the leading positions mirrored by the virtual tail counted twice."""
    if eta is None:
        w = np.ones(subset.length)
    else:
        eta = np.asarray(eta, dtype=float)
        if eta.shape != (subset.length,):
            raise ValueError(f"eta must have shape ({subset.length},), got {eta.shape}")
        if ((eta <= 0) | (eta >= 1)).any():
            raise ValueError("eta entries must lie strictly between 0 and 1")
        w = np.log(eta / (1.0 - eta))
    tail = subset.padded_length - subset.length
    if tail:
        w[:tail] *= 2.0
    return w


def recover_pad(
    own_report: np.ndarray,
    ciphertext: np.ndarray,
    subset: PadSubset,
    rng: np.random.Generator,
    eta: np.ndarray | None = None,
) -> np.ndarray:
    """Known-plaintext pad recovery by weighted voting.

    Each candidate pad scores one vote per position where it agrees with
    own_report xor ciphertext; the best-scoring pad wins, ties broken
    uniformly at random.  With `eta` given, votes are weighted by the
    per-channel log odds log(eta/(1-eta)) instead of counted.

    Args:
        own_report: the receiver's own sensing report for the same slot.
        ciphertext: the sender's published ciphertext.
        subset: the public pad subset the sender drew from.
        rng: tie-break source.
        eta: optional per-channel agreement probabilities in (0, 1).

    Returns:
        The winning pad (copy, length M).
    """
    own_report = as_bits(own_report)
    ciphertext = as_bits(ciphertext)
    if own_report.size != subset.length or ciphertext.size != subset.length:
        raise ValueError(
            f"report/ciphertext lengths ({own_report.size}, {ciphertext.size}) "
            f"must equal subset length {subset.length}"
        )
    target = np.bitwise_xor(own_report, ciphertext)
    agree = subset.pads == target
    scores = agree @ _vote_weights(subset, eta)
    best = scores.max()
    winners = np.flatnonzero(scores == best)
    pick = winners[0] if winners.size == 1 else rng.choice(winners)
    return subset.pads[pick].copy()


def pad_posterior(
    own_report: np.ndarray,
    ciphertext: np.ndarray,
    eta: np.ndarray,
    candidate: np.ndarray,
) -> float:
    """Likelihood of a candidate pad given the receiver's own report.

    Product over positions of eta_i when candidate_i == own_i xor cipher_i
    and 1 - eta_i otherwise.  Maximized over all binary vectors by
    own_report xor ciphertext whenever every eta_i > 1/2; `recover_pad`
    restricts that maximization to the subset.
    """
    own_report = as_bits(own_report)
    ciphertext = as_bits(ciphertext)
    candidate = as_bits(candidate)
    eta = np.asarray(eta, dtype=float)
    if not (own_report.size == ciphertext.size == candidate.size == eta.size):
        raise ValueError("own_report, ciphertext, eta and candidate must share one length")
    if ((eta < 0) | (eta > 1)).any():
        raise ValueError("eta entries must lie in [0, 1]")
    target = np.bitwise_xor(own_report, ciphertext)
    factors = np.where(candidate == target, eta, 1.0 - eta)
    return float(factors.prod())


def agreement_probability(
    profile_x: DetectorProfile,
    profile_y: DetectorProfile,
    occupancy,
) -> np.ndarray:
    """Per-channel probability that two honest users' reports agree.

    Conditioning on the channel state: both users err or neither does.

    Args:
        profile_x, profile_y: the two users' detector profiles.
        occupancy: per-channel busy probability (scalar or length-M vector).

    Returns:
        eta vector of shape (M,).  Values above 1/2 are what recovery
        voting relies on; nothing here enforces that.
    """
    if profile_x.num_channels != profile_y.num_channels:
        raise ValueError("profiles must cover the same number of channels")
    p1 = np.broadcast_to(np.asarray(occupancy, dtype=float), (profile_x.num_channels,))
    if ((p1 < 0) | (p1 > 1)).any():
        raise ValueError("occupancy entries must lie in [0, 1]")
    fx, mx = profile_x.false_alarm, profile_x.miss
    fy, my = profile_y.false_alarm, profile_y.miss
    idle = (1 - fx) * (1 - fy) + fx * fy
    busy = (1 - mx) * (1 - my) + mx * my
    return (1 - p1) * idle + p1 * busy


def predict_success_rate(block_length: int, eta) -> float:
    """Probability that majority voting over a block recovers it.

    The number of agreeing positions is Poisson binomial over the block's
    eta values; success is at least ceil(n/2) agreements (exact ties, which
    only exist for even n, are counted as success here; `recover_pad`
    resolves them by coin flip, which is why block sizing sticks to odd n).

    Args:
        block_length: number of voting positions n >= 1.
        eta: scalar or length-n vector of agreement probabilities in [0, 1].

    Returns:
        P(#agreements >= ceil(n/2)) as a float.
    """
    n = int(block_length)
    if n < 1:
        raise ValueError(f"block_length must be >= 1, got {block_length}")
    eta = np.asarray(eta, dtype=float)
    if eta.ndim == 0:
        eta = np.full(n, float(eta))
    if eta.shape != (n,):
        raise ValueError(f"eta must be scalar or shape ({n},), got {eta.shape}")
    if ((eta < 0) | (eta > 1)).any():
        raise ValueError("eta entries must lie in [0, 1]")
    pmf = np.zeros(n + 1)
    pmf[0] = 1.0
    for i, p in enumerate(eta):
        pmf[1:i + 2] = pmf[1:i + 2] * (1.0 - p) + pmf[:i + 1] * p
        pmf[0] *= 1.0 - p
    return float(pmf[math.ceil(n / 2):].sum())


def invert_success_rate(p_target: float, eta: float, max_block: int = 10001) -> int:
    """Smallest odd block length whose predicted recovery rate reaches
    p_target.

    Odd lengths only: even lengths admit exact voting ties, so the closed
    form above and the coin-flip tie break would disagree.

    Raises:
        ValueError: p_target outside (0, 1), eta outside (0, 1), or
            eta <= 1/2 while p_target > eta (no block length can help a
            coin-or-worse agreement rate), or max_block exceeded.
    """
    if not 0 < p_target < 1:
        raise ValueError(f"p_target must lie in (0, 1), got {p_target}")
    if not 0 < eta < 1:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    if p_target <= eta:
        return 1
    if eta <= 0.5:
        raise ValueError(f"eta={eta} <= 0.5 cannot reach p_target={p_target}")
    n = 1
    while n <= max_block:
        if predict_success_rate(n, eta) >= p_target:
            return n
        n += 2
    raise ValueError(f"no odd block length <= {max_block} reaches {p_target} at eta={eta}")
