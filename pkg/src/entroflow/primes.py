"""Segmented sieve of Eratosthenes and prime-gap statistics.

Gap statistics are accumulated from per-block gap-value histograms, which
are exact integer tallies, so nothing of size n_primes is ever held.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import DegenerateSampleError, DomainError, ResourceLimitError
from .gamma import GammaParams, gamma_cdf, gamma_mle_from_moments

SEGMENT_SIZE = 1 << 22
DEFAULT_MAX_PRIMES = 10**8
MAX_PRIMES_ENV = "ENTROFLOW_MAX_PRIMES"


def max_primes() -> int:
    raw = os.environ.get(MAX_PRIMES_ENV)
    return int(raw) if raw else DEFAULT_MAX_PRIMES


def nth_prime_upper_bound(n: int) -> int:
    """Rosser's bound p_n < n (ln n + ln ln n), valid for n >= 6."""
    if n < 6:
        return 13
    ln = math.log(n)
    return int(n * (ln + math.log(ln))) + 3


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit with a plain (unsegmented) sieve."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p::p] = False
    return np.flatnonzero(flags).astype(np.int64)


def iter_prime_segments(n: int, segment_size: int = SEGMENT_SIZE) -> Iterator[np.ndarray]:
    """Yield the first ``n`` primes as consecutive int64 arrays.

    Each segment covers ``segment_size`` odd candidates, so peak memory is
    one boolean mask of that length plus the base primes.
    """
    if n < 1:
        raise DomainError(f"need at least one prime, got n={n}")
    cap = max_primes()
    if n > cap:
        raise ResourceLimitError(f"n={n} exceeds the prime cap {cap} ({MAX_PRIMES_ENV})")
    limit = nth_prime_upper_bound(n)
    base = simple_sieve(math.isqrt(limit) + 1)[1:]  # odd base primes
    yield np.array([2], dtype=np.int64)
    remaining = n - 1
    low = 3  # odd, first candidate of the segment
    while remaining > 0:
        high = low + 2 * segment_size  # exclusive
        mask = np.ones(segment_size, dtype=bool)
        for p in base:
            p = int(p)
            sq = p * p
            if sq >= high:
                break
            start = max(sq, ((low + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            mask[(start - low) // 2::p] = False
        seg = low + 2 * np.flatnonzero(mask).astype(np.int64)
        if seg.size > remaining:
            seg = seg[:remaining]
        remaining -= seg.size
        yield seg
        low = high


def generate_primes(n: int, segment_size: int = SEGMENT_SIZE) -> np.ndarray:
    """The first ``n`` primes."""
    return np.concatenate(list(iter_prime_segments(n, segment_size)))


def gaps(primes: Sequence[int]) -> np.ndarray:
    arr = np.asarray(primes, dtype=np.int64)
    if arr.size < 2:
        raise DomainError("need at least two primes to form a gap")
    d = np.diff(arr)
    if np.any(d <= 0):
        raise DomainError("primes must be strictly increasing")
    return d


@dataclass(frozen=True)
class SpacingStats:
    label: str
    count: int
    mean: float
    sd: float
    cv: float
    kappa: float
    error: Optional[str] = None


def _stats_from_counts(label: str, counts: np.ndarray) -> SpacingStats:
    """Statistics of a gap sample given counts[g] = occurrences of gap g."""
    values = np.flatnonzero(counts)
    c = counts[values].astype(np.int64)
    n = int(c.sum())
    if n < 2:
        raise DomainError(f"{label}: need at least two gaps, got {n}")
    s1 = int((c * values).sum())
    s2 = int((c * values * values).sum())
    mean = s1 / n
    # population variance from exact integer moments
    sd = math.sqrt((n * s2 - s1 * s1) / (n * n))
    mean_log = math.fsum(c * np.log(values.astype(float))) / n
    try:
        kappa = gamma_mle_from_moments(mean, mean_log, n).params.kappa
        err = None
    except DegenerateSampleError as exc:
        kappa = math.nan
        err = str(exc)
    return SpacingStats(label, n, mean, sd, sd / mean, kappa, err)


def stats_from_gaps(label: str, gap_values: Sequence[int]) -> SpacingStats:
    g = np.asarray(gap_values, dtype=np.int64)
    if np.any(g <= 0):
        raise DomainError("gaps must be positive")
    return _stats_from_counts(label, np.bincount(g))


def block_gap_counts(n_primes: int, block_size: int,
                     segment_size: int = SEGMENT_SIZE) -> list[np.ndarray]:
    """Gap histograms for consecutive blocks of ``block_size`` primes.

    Only the block_size - 1 gaps between primes of the same block count;
    a trailing partial block is dropped.
    """
    if block_size < 2:
        raise DomainError(f"block_size must be >= 2, got {block_size}")
    if n_primes < block_size:
        raise DomainError(f"n_primes={n_primes} is smaller than block_size={block_size}")
    n_blocks = n_primes // block_size
    used = n_blocks * block_size
    counts = [np.zeros(0, dtype=np.int64) for _ in range(n_blocks)]
    prev = None
    index = 0  # index of the first prime of the current segment
    for seg in iter_prime_segments(used, segment_size):
        if prev is None:
            g = np.diff(seg)
            j = np.arange(index + 1, index + seg.size)
        else:
            g = np.diff(np.concatenate([[prev], seg]))
            j = np.arange(index, index + seg.size)
        # gap ending at prime j lies inside a block iff j is not a block start
        keep = (j % block_size) != 0
        g, j = g[keep], j[keep]
        blocks = j // block_size
        for b in np.unique(blocks):
            sel = g[blocks == b]
            bc = np.bincount(sel)
            acc = counts[b]
            if acc.size < bc.size:
                acc = np.pad(acc, (0, bc.size - acc.size))
            acc[: bc.size] += bc
            counts[b] = acc
        index += seg.size
        prev = int(seg[-1])
    return counts


def _block_label(b: int, block_size: int) -> str:
    lo = 1 if b == 0 else b * block_size
    return f"{lo}-{(b + 1) * block_size}"


def block_stats(n_primes: int, block_size: int,
                segment_size: int = SEGMENT_SIZE) -> list[SpacingStats]:
    counts = block_gap_counts(n_primes, block_size, segment_size)
    return [_stats_from_counts(_block_label(b, block_size), c) for b, c in enumerate(counts)]


def range_stats(n_primes: int, segment_size: int = SEGMENT_SIZE) -> SpacingStats:
    if n_primes < 3:
        raise DomainError(f"need at least three primes for two gaps, got {n_primes}")
    (counts,) = block_gap_counts(n_primes, n_primes, segment_size)
    return _stats_from_counts(f"1-{n_primes}", counts)


@dataclass
class GapHistogram:
    """Observed gap frequencies against the fitted gamma model.

    ``entries`` rows are (gap, observed, model) for gap 1 and every even gap
    up to the largest observed one. Gap 1 takes the model mass on (0, 1]
    and an even gap d the mass on (d - 1, d + 1], so the bins tile
    (0, max_gap + 1].
    """

    entries: list[tuple[int, int, float]]
    total: int
    fit: GammaParams
    mean: float
    ranked: list[int] = field(default_factory=list)

    @property
    def max_gap(self) -> int:
        return self.entries[-1][0]

    def rank_of(self, gap: int) -> int:
        return self.ranked.index(gap) + 1

    @property
    def mean_rank(self) -> int:
        """Rank-order position of the even gap nearest the mean spacing."""
        nearest = 2 * int(round(self.mean / 2.0))
        return self.rank_of(nearest)

    def model_tail(self) -> float:
        return 1.0 - gamma_cdf(self.max_gap + 1.0, self.fit)


def histogram_from_counts(counts: np.ndarray) -> GapHistogram:
    stats = _stats_from_counts("histogram", counts)
    if stats.error:
        raise DegenerateSampleError(stats.error)
    fit = GammaParams(stats.mean, stats.kappa)
    total = stats.count
    max_gap = int(np.flatnonzero(counts)[-1])
    observed = np.zeros(max(max_gap, 2) + 1, dtype=np.int64)
    observed[: counts.size] = counts
    entries = []
    if observed[1]:
        entries.append((1, int(observed[1]), total * gamma_cdf(1.0, fit)))
    for d in range(2, max_gap + 1, 2):
        model = total * (gamma_cdf(d + 1.0, fit) - gamma_cdf(d - 1.0, fit))
        entries.append((d, int(observed[d]), model))
    present = [(obs, gap) for gap, obs, _ in entries if obs > 0]
    ranked = [gap for obs, gap in sorted(present, key=lambda t: (-t[0], t[1]))]
    return GapHistogram(entries, total, fit, stats.mean, ranked)


def gap_histogram(n_primes: int, segment_size: int = SEGMENT_SIZE) -> GapHistogram:
    if n_primes < 3:
        raise DomainError(f"need at least three primes, got {n_primes}")
    (counts,) = block_gap_counts(n_primes, n_primes, segment_size)
    return histogram_from_counts(counts)
