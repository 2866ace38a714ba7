"""Sorting-network construction, analysis, validation, and text round-trip.

A network is an ordered sequence of comparators over ``size`` channels.
Applying comparator ``(lo, hi)`` leaves the smaller value on channel ``lo``
and the larger on ``hi``; applying all comparators in order sorts every
input.  Two families are provided: embedded best-known length-optimal
networks for 2..16 channels, and generated Bose-Nelson networks in either
locality order (sort first half, sort second half, merge) or parallelism
order (independent comparators grouped level by level).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

__all__ = [
    "BEST_NETWORK_SIZES",
    "BoseNelsonOrder",
    "Comparator",
    "LevelDecomposition",
    "Network",
    "NetworkCapacityError",
    "NetworkOrigin",
    "NetworkParseError",
    "NetworkSizeError",
    "VALIDATION_SIZE_CAP",
    "best_network",
    "compute_levels",
    "emit_network",
    "generate_bose_nelson",
    "parse_network",
    "validate_network",
]

# Exhaustive 0-1 validation enumerates 2^n inputs; beyond this it refuses.
VALIDATION_SIZE_CAP = 24

BEST_NETWORK_SIZES = range(2, 17)


class NetworkSizeError(ValueError):
    """Requested channel count is outside the supported range."""


class NetworkCapacityError(ValueError):
    """Operation would exceed its enumeration capacity."""


class NetworkParseError(ValueError):
    """Network text is malformed."""


class Comparator(NamedTuple):
    lo: int
    hi: int


class NetworkOrigin(enum.Enum):
    BEST_KNOWN = "best"
    BOSE_NELSON_LOCALITY = "bose-nelson-locality"
    BOSE_NELSON_PARALLELISM = "bose-nelson-parallelism"


class BoseNelsonOrder(enum.Enum):
    LOCALITY = "locality"
    PARALLELISM = "parallelism"


@dataclass(frozen=True)
class Network:
    """A fixed comparator sequence over ``size`` channels.

    ``origin`` is bookkeeping only and does not participate in equality;
    parsed networks carry ``origin=None``.
    """

    size: int
    comparators: tuple[Comparator, ...]
    origin: NetworkOrigin | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.size < 1:
            raise NetworkSizeError(f"network size must be >= 1, got {self.size}")
        for c in self.comparators:
            if not (0 <= c.lo < c.hi < self.size):
                raise ValueError(
                    f"comparator {c} out of range for size {self.size}"
                )

    def __len__(self) -> int:
        return len(self.comparators)


@dataclass(frozen=True)
class LevelDecomposition:
    """Comparators grouped into channel-disjoint levels, dependency order kept."""

    levels: tuple[tuple[Comparator, ...], ...]

    def __len__(self) -> int:
        return len(self.levels)


def _network(size: int, pairs: Iterable[tuple[int, int]], origin: NetworkOrigin) -> Network:
    return Network(size, tuple(Comparator(lo, hi) for lo, hi in pairs), origin)


# Best-known length-optimal networks, transcribed from the classic public
# comparator listings (Knuth's diagrams for n <= 10, Green's 60-comparator
# construction and its channel deletions for 11..16).  Every entry is gated
# by validate_network in the test suite, so a transcription slip cannot
# survive unnoticed.
_BEST: dict[int, tuple[tuple[int, int], ...]] = {
    2: ((0, 1),),
    3: ((0, 1), (0, 2), (1, 2)),
    4: ((0, 1), (2, 3), (0, 2), (1, 3), (1, 2)),
    5: (
        (0, 1), (3, 4), (2, 4), (2, 3), (1, 4),
        (0, 3), (0, 2), (1, 3), (1, 2),
    ),
    6: (
        (1, 2), (4, 5), (0, 2), (3, 5), (0, 1), (3, 4),
        (2, 5), (0, 3), (1, 4), (2, 4), (1, 3), (2, 3),
    ),
    7: (
        (1, 2), (3, 4), (5, 6), (0, 2), (3, 5), (4, 6),
        (0, 1), (4, 5), (2, 6), (0, 4), (1, 5), (0, 3),
        (2, 5), (1, 3), (2, 4), (2, 3),
    ),
    8: (
        (0, 1), (2, 3), (4, 5), (6, 7), (0, 2), (1, 3),
        (4, 6), (5, 7), (1, 2), (5, 6), (0, 4), (3, 7),
        (1, 5), (2, 6), (1, 4), (3, 6), (2, 4), (3, 5),
        (3, 4),
    ),
    9: (
        (0, 1), (3, 4), (6, 7), (1, 2), (4, 5), (7, 8),
        (0, 1), (3, 4), (6, 7), (2, 5), (0, 3), (1, 4),
        (5, 8), (3, 6), (4, 7), (2, 5), (0, 3), (1, 4),
        (5, 7), (2, 6), (1, 3), (4, 6), (2, 4), (5, 6),
        (2, 3),
    ),
    10: (
        (4, 9), (3, 8), (2, 7), (1, 6), (0, 5),
        (1, 4), (6, 9), (0, 3), (5, 8),
        (0, 2), (3, 6), (7, 9),
        (0, 1), (2, 4), (5, 7), (8, 9),
        (1, 2), (4, 6), (7, 8), (3, 5),
        (2, 5), (6, 8), (1, 3), (4, 7),
        (2, 3), (6, 7),
        (3, 4), (5, 6),
        (4, 5),
    ),
    11: (
        (0, 1), (2, 3), (4, 5), (6, 7), (8, 9),
        (1, 3), (5, 7), (0, 2), (4, 6), (8, 10),
        (1, 2), (5, 6), (9, 10), (0, 4), (3, 7),
        (1, 5), (6, 10), (4, 8),
        (5, 9), (2, 6), (0, 4),
        (3, 8), (1, 5), (6, 10),
        (2, 3), (8, 9),
        (1, 4), (7, 10),
        (3, 5), (6, 8),
        (2, 4), (7, 9),
        (5, 6),
        (3, 4), (7, 8),
    ),
    12: (
        (0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11),
        (1, 3), (5, 7), (9, 11), (0, 2), (4, 6), (8, 10),
        (1, 2), (5, 6), (9, 10), (0, 4), (7, 11),
        (1, 5), (6, 10), (3, 7), (4, 8),
        (5, 9), (2, 6), (0, 4), (7, 11),
        (3, 8), (1, 5), (6, 10),
        (2, 3), (8, 9),
        (1, 4), (7, 10),
        (3, 5), (6, 8),
        (2, 4), (7, 9),
        (5, 6),
        (3, 4), (7, 8),
    ),
    13: (
        (1, 7), (9, 11), (3, 4), (5, 8), (0, 12), (2, 6),
        (0, 1), (2, 3), (4, 6), (8, 11), (7, 12), (5, 9),
        (0, 2), (3, 7), (10, 11), (1, 4), (6, 12),
        (7, 8), (11, 12), (4, 9), (6, 10),
        (3, 4), (5, 6), (8, 9), (10, 11), (1, 7),
        (2, 6), (9, 11), (1, 3), (4, 7), (8, 10), (0, 5),
        (2, 5), (6, 8), (9, 10),
        (1, 2), (3, 5), (7, 8), (4, 6),
        (2, 3), (4, 5), (6, 7), (8, 9),
        (3, 4), (5, 6),
    ),
    14: (
        (0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11), (12, 13),
        (0, 2), (4, 6), (8, 10), (1, 3), (5, 7), (9, 11),
        (0, 4), (8, 12), (1, 5), (9, 13), (2, 6), (3, 7),
        (0, 8), (1, 9), (2, 10), (3, 11), (4, 12), (5, 13),
        (5, 10), (6, 9), (3, 12), (7, 11), (1, 2), (4, 8),
        (1, 4), (7, 13), (2, 8),
        (2, 4), (5, 6), (9, 10), (11, 13), (3, 8), (7, 12),
        (6, 8), (10, 12), (3, 5), (7, 9),
        (3, 4), (5, 6), (7, 8), (9, 10), (11, 12),
        (6, 7), (8, 9),
    ),
    15: (
        (0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11), (12, 13),
        (0, 2), (4, 6), (8, 10), (12, 14), (1, 3), (5, 7), (9, 11),
        (0, 4), (8, 12), (1, 5), (9, 13), (2, 6), (10, 14), (3, 7),
        (0, 8), (1, 9), (2, 10), (3, 11), (4, 12), (5, 13), (6, 14),
        (5, 10), (6, 9), (3, 12), (13, 14), (7, 11), (1, 2), (4, 8),
        (1, 4), (7, 13), (2, 8), (11, 14),
        (2, 4), (5, 6), (9, 10), (11, 13), (3, 8), (7, 12),
        (6, 8), (10, 12), (3, 5), (7, 9),
        (3, 4), (5, 6), (7, 8), (9, 10), (11, 12),
        (6, 7), (8, 9),
    ),
    16: (
        (0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11), (12, 13), (14, 15),
        (0, 2), (4, 6), (8, 10), (12, 14), (1, 3), (5, 7), (9, 11), (13, 15),
        (0, 4), (8, 12), (1, 5), (9, 13), (2, 6), (10, 14), (3, 7), (11, 15),
        (0, 8), (1, 9), (2, 10), (3, 11), (4, 12), (5, 13), (6, 14), (7, 15),
        (5, 10), (6, 9), (3, 12), (13, 14), (7, 11), (1, 2), (4, 8),
        (1, 4), (7, 13), (2, 8), (11, 14),
        (2, 4), (5, 6), (9, 10), (11, 13), (3, 8), (7, 12),
        (6, 8), (10, 12), (3, 5), (7, 9),
        (3, 4), (5, 6), (7, 8), (9, 10), (11, 12),
        (6, 7), (8, 9),
    ),
}


def best_network(n: int) -> Network:
    """Return the embedded best-known length-optimal network for ``n`` channels."""
    if n not in BEST_NETWORK_SIZES:
        raise NetworkSizeError(
            f"best networks are embedded for sizes 2..16, got {n}"
        )
    return _network(n, _BEST[n], NetworkOrigin.BEST_KNOWN)


def _bose_nelson_locality(n: int) -> list[Comparator]:
    """First-half/second-half recursion, merge emitted after both halves."""
    out: list[Comparator] = []

    def sort_range(i: int, m: int) -> None:
        if m > 1:
            a = m // 2
            sort_range(i, a)
            sort_range(i + a, m - a)
            merge(i, a, i + a, m - a)

    def merge(i: int, x: int, j: int, y: int) -> None:
        # Merge x sorted items starting at i with y sorted items starting at j.
        if x == 1 and y == 1:
            out.append(Comparator(i, j))
        elif x == 1 and y == 2:
            out.append(Comparator(i, j + 1))
            out.append(Comparator(i, j))
        elif x == 2 and y == 1:
            out.append(Comparator(i, j))
            out.append(Comparator(i + 1, j))
        else:
            a = x // 2
            b = y // 2 if x % 2 == 1 else (y + 1) // 2
            merge(i, a, j, b)
            merge(i + a, x - a, j + b, y - b)
            merge(i + a, x - a, j, b)

    sort_range(0, n)
    return out


def generate_bose_nelson(n: int, order: BoseNelsonOrder) -> Network:
    """Generate the Bose-Nelson network for ``n`` channels in the given order.

    Locality order is the raw recursion output.  Parallelism order re-emits
    the same comparator multiset level by level (greedy decomposition), so
    independent comparators of different recursion branches interleave.
    """
    if n < 2:
        raise NetworkSizeError(f"Bose-Nelson generation needs n >= 2, got {n}")
    comparators = _bose_nelson_locality(n)
    if order is BoseNelsonOrder.LOCALITY:
        return Network(n, tuple(comparators), NetworkOrigin.BOSE_NELSON_LOCALITY)
    local = Network(n, tuple(comparators), NetworkOrigin.BOSE_NELSON_LOCALITY)
    reordered = [c for level in compute_levels(local).levels for c in level]
    return Network(n, tuple(reordered), NetworkOrigin.BOSE_NELSON_PARALLELISM)


def compute_levels(net: Network) -> LevelDecomposition:
    """Greedy earliest-fit level decomposition.

    Each comparator lands in the first level after the last level that
    touches either of its channels, which preserves the relative order of
    any two comparators sharing a channel.
    """
    last_level = [-1] * net.size  # most recent level using each channel
    levels: list[list[Comparator]] = []
    for c in net.comparators:
        at = max(last_level[c.lo], last_level[c.hi]) + 1
        if at == len(levels):
            levels.append([])
        levels[at].append(c)
        last_level[c.lo] = at
        last_level[c.hi] = at
    return LevelDecomposition(tuple(tuple(level) for level in levels))


def validate_network(net: Network) -> bool:
    """Exhaustive zero-one-principle check: does the network sort everything?

    Runs all 2^n binary inputs at once by giving each channel one big-int
    bit vector (bit k = channel value for input k).  A comparator is then
    min/max on bits: AND on the low channel, OR on the high one.
    """
    n = net.size
    if n > VALIDATION_SIZE_CAP:
        raise NetworkCapacityError(
            f"exhaustive validation is capped at {VALIDATION_SIZE_CAP} channels, got {n}"
        )
    total = 1 << n
    chans: list[int] = []
    for i in range(n):
        period = 1 << (i + 1)
        half = 1 << i
        chunk = ((1 << half) - 1) << half  # one period: low half 0s, high half 1s
        repeats = total // period
        multiplier = ((1 << (period * repeats)) - 1) // ((1 << period) - 1)
        chans.append(chunk * multiplier)
    for lo, hi in net.comparators:
        a, b = chans[lo], chans[hi]
        chans[lo] = a & b
        chans[hi] = a | b
    return all(chans[i] & ~chans[i + 1] == 0 for i in range(n - 1))


def emit_network(net: Network) -> str:
    """Serialize to the line format ``n <size>`` then ``<lo> <hi>`` per comparator."""
    lines = [f"n {net.size}"]
    lines.extend(f"{c.lo} {c.hi}" for c in net.comparators)
    return "\n".join(lines) + "\n"


def parse_network(text: str) -> Network:
    """Parse the text format produced by :func:`emit_network`.

    Blank lines and ``#`` comments are ignored.  Channel indices are
    0-based decimals; a comparator outside ``0 <= lo < hi < size`` is an
    error.  Parsed networks have no origin.
    """
    size: int | None = None
    comparators: list[Comparator] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if size is None:
            if len(fields) != 2 or fields[0] != "n":
                raise NetworkParseError(f"line {lineno}: expected 'n <size>', got {raw!r}")
            try:
                size = int(fields[1])
            except ValueError:
                raise NetworkParseError(f"line {lineno}: bad size {fields[1]!r}") from None
            if size < 1:
                raise NetworkParseError(f"line {lineno}: size must be >= 1")
            continue
        if len(fields) != 2:
            raise NetworkParseError(f"line {lineno}: expected '<lo> <hi>', got {raw!r}")
        try:
            lo, hi = int(fields[0]), int(fields[1])
        except ValueError:
            raise NetworkParseError(f"line {lineno}: bad channel index in {raw!r}") from None
        if not (0 <= lo < hi < size):
            raise NetworkParseError(
                f"line {lineno}: comparator ({lo}, {hi}) out of range for size {size}"
            )
        comparators.append(Comparator(lo, hi))
    if size is None:
        raise NetworkParseError("no 'n <size>' header found")
    return Network(size, tuple(comparators), None)
