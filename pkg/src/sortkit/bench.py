"""Measurement harness: seeded data generation, cost measurement with
baseline subtraction, correctness side-effects, and result aggregation.

The single-array benchmark times ``iterations`` rounds of (generate, sort,
check) and subtracts a second timed loop of (generate, simulated check)
run from the same seed, isolating the sort cost; negative per-iteration
costs are legal data because both loops carry their own jitter.  The
in-row benchmark sorts many adjacent blocks of one large region so every
block access misses the cache.  All timed loops are compiled code; the
counters wrap whole loop calls.
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

__all__ = [
    "BlockMismatchError",
    "BoxplotStats",
    "CSV_HEADER",
    "DEFAULT_EVICT_BYTES",
    "ELEMENT_BYTES",
    "FINGERPRINT_MODULUS",
    "IncompleteDataError",
    "MINSTD_MODULUS",
    "MINSTD_MULTIPLIER",
    "MeasurementRecord",
    "MinstdRng",
    "RankRow",
    "RankTable",
    "SortCorrectnessError",
    "Sorter",
    "aggregate_ranks",
    "boxplot_stats",
    "check_sorted",
    "generate_elements",
    "measure_inrow",
    "measure_seeds",
    "measure_single",
    "minstd_next",
    "noop_sorter",
    "permutation_fingerprint",
    "read_records",
    "simulate_check_sorted",
    "write_rank_table",
    "write_records",
]

MINSTD_MULTIPLIER = 48271
MINSTD_MODULUS = 2147483647
FINGERPRINT_MODULUS = (1 << 61) - 1
ELEMENT_BYTES = 16  # 8-byte key + 8-byte reference
DEFAULT_EVICT_BYTES = 32 * 1024 * 1024

CSV_HEADER = ("sorter", "size", "measure", "cost", "unit")


class SortCorrectnessError(RuntimeError):
    """A sorted/permutation side-effect check failed during measurement."""


class BlockMismatchError(SortCorrectnessError):
    """An in-row block differs from its reference copy."""


class IncompleteDataError(ValueError):
    """A (sorter, size) cell required for aggregation has no records."""


# ---------------------------------------------------------------------------
# random number generation


def minstd_next(seed: int) -> int:
    """One step of ``seed * 48271 mod 2147483647``; the new seed is the value."""
    if not 0 < seed < MINSTD_MODULUS:
        raise ValueError(f"seed must be in (0, {MINSTD_MODULUS}), got {seed}")
    return seed * MINSTD_MULTIPLIER % MINSTD_MODULUS


class MinstdRng:
    """Stream wrapper around :func:`minstd_next`."""

    def __init__(self, seed: int):
        if not 0 < seed < MINSTD_MODULUS:
            raise ValueError(f"seed must be in (0, {MINSTD_MODULUS}), got {seed}")
        self.seed = seed

    def next(self) -> int:
        self.seed = minstd_next(self.seed)
        return self.seed


def generate_elements(n: int, seed: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Fill fresh key/ref arrays from the generator; returns the end seed.

    Keys are raw generator outputs (31-bit values in 64-bit slots);
    references are the sequential indices 0..n-1.
    """
    if not 0 < seed < MINSTD_MODULUS:
        raise ValueError(f"seed must be in (0, {MINSTD_MODULUS}), got {seed}")
    keys = np.empty(n, dtype=np.uint64)
    refs = np.empty(n, dtype=np.uint64)
    end = _kernels.minstd_fill(keys, refs, np.uint64(seed))
    return keys, refs, int(end)


def measure_seeds(seed: int, measures: int) -> list[int]:
    """Per-measure seeds derived from the master seed.

    The derivation depends only on the master seed, so every sorter sees
    the same random key sequence in measure ``m``.
    """
    rng = MinstdRng(seed)
    return [rng.next() for _ in range(measures)]


# ---------------------------------------------------------------------------
# correctness side-effects


def permutation_fingerprint(keys: Iterable[int], z: int, p: int = FINGERPRINT_MODULUS) -> int:
    """Product of ``(z - k) mod p`` over all keys, in the prime field.

    Equal multisets always produce equal fingerprints; a zero result is the
    caller's cue to retry with ``z + 1``.
    """
    v = 1
    for k in keys:
        v = v * ((z - int(k)) % p) % p
    return v


def _as_key_array(data) -> np.ndarray:
    if isinstance(data, np.ndarray):
        return data
    return np.asarray([int(k) for k in data], dtype=np.uint64)


def check_sorted(data) -> bool:
    """True iff keys are nondecreasing."""
    return bool(_kernels.sorted_pass(_as_key_array(data)))


def simulate_check_sorted(data) -> bool:
    """Cost twin of :func:`check_sorted`: tests adjacent equality instead
    of order, returning whether any adjacent equal pair exists."""
    return bool(_kernels.equal_pass(_as_key_array(data)))


# ---------------------------------------------------------------------------
# measurement


@dataclass(frozen=True)
class Sorter:
    """A named compiled range sorter ``f(keys, refs, lo, hi)``."""

    sorter_id: str
    range_sort: object

    def sort(self, keys: np.ndarray, refs: np.ndarray) -> None:
        self.range_sort(keys, refs, 0, keys.shape[0])


def noop_sorter(sorter_id: str = "empty") -> Sorter:
    """A sorter that does nothing; for harness calibration."""
    return Sorter(sorter_id, _kernels.noop_range)


@dataclass(frozen=True)
class MeasurementRecord:
    sorter_id: str
    array_size: int
    measure_index: int
    cost: float  # signed: baseline subtraction may exceed the measured loop
    unit: str


_measured_blocks: dict[object, object] = {}


def _measured_block(sorter: Sorter):
    block = _measured_blocks.get(sorter.range_sort)
    if block is None:
        block = _kernels.build_measured_block(sorter.range_sort)
        _measured_blocks[sorter.range_sort] = block
    return block


_block_passes: dict[object, object] = {}


def _block_pass(sorter: Sorter):
    bp = _block_passes.get(sorter.range_sort)
    if bp is None:
        bp = _kernels.build_block_pass(sorter.range_sort)
        _block_passes[sorter.range_sort] = bp
    return bp


def measure_single(
    sorter: Sorter,
    array_size: int,
    iterations: int,
    measures: int,
    seed: int,
    counter,
) -> list[MeasurementRecord]:
    """Single-array benchmark with baseline subtraction.

    Per measure: one untimed warm-up round, a timed loop of
    (generate, fingerprint, sort, check), then a timed loop of
    (generate, fingerprint, simulated check) restarted from the measure
    seed.  Cost is (first - second) / iterations in counter units.
    """
    if iterations < 1 or measures < 1:
        raise ValueError("iterations and measures must be >= 1")
    block = _measured_block(sorter)
    keys = np.empty(array_size, dtype=np.uint64)
    refs = np.empty(array_size, dtype=np.uint64)
    records = []
    for m, seed_m in enumerate(measure_seeds(seed, measures)):
        warm_seed, bad = block(keys, refs, np.uint64(seed_m), 1)
        counter.start()
        _, bad2 = block(keys, refs, np.uint64(warm_seed), iterations)
        t1 = counter.stop()
        counter.start()
        _, _suspicious = _kernels.baseline_block(keys, refs, np.uint64(seed_m), iterations)
        t2 = counter.stop()
        if bad or bad2:
            raise SortCorrectnessError(
                f"{sorter.sorter_id}: sorted/permutation check failed at size {array_size}"
            )
        records.append(
            MeasurementRecord(sorter.sorter_id, array_size, m, (t1 - t2) / iterations, counter.unit)
        )
    return records


def measure_inrow(
    sorter: Sorter,
    array_size: int,
    number_of_arrays: int,
    seed: int,
    counter,
    min_region_bytes: int | None = DEFAULT_EVICT_BYTES,
) -> MeasurementRecord:
    """Cache-evicting benchmark: one timed pass over adjacent blocks.

    A region of ``number_of_arrays`` blocks is generated, copied, and the
    copy block-sorted first (pushing the original out of cache).  The timed
    pass then sorts every original block in place; afterwards the blocks
    must equal the pre-sorted reference, be sorted, and the whole region
    must still be a permutation of what was generated.
    """
    if array_size < 1 or number_of_arrays < 1:
        raise ValueError("array_size and number_of_arrays must be >= 1")
    total = array_size * number_of_arrays
    region_bytes = total * ELEMENT_BYTES
    if min_region_bytes is not None and region_bytes <= min_region_bytes:
        raise ValueError(
            f"region of {region_bytes} bytes does not exceed the eviction "
            f"threshold of {min_region_bytes}; raise number_of_arrays"
        )
    keys, refs, end_seed = generate_elements(total, seed)
    z = np.uint64(minstd_next(end_seed))
    fp_before = _kernels.fingerprint61(keys, z)
    while fp_before == np.uint64(0):
        z += np.uint64(1)
        fp_before = _kernels.fingerprint61(keys, z)
    ref_keys = keys.copy()
    ref_refs = refs.copy()
    block_pass = _block_pass(sorter)
    block_pass(ref_keys, ref_refs, array_size)  # pre-sort the copy, evict original
    warm_keys = np.empty(array_size, dtype=np.uint64)
    warm_refs = np.empty(array_size, dtype=np.uint64)
    _, bad = _measured_block(sorter)(warm_keys, warm_refs, np.uint64(seed), 1)
    counter.start()
    block_pass(keys, refs, array_size)
    elapsed = counter.stop()
    mismatch = _kernels.first_mismatch_block(keys, refs, ref_keys, ref_refs, array_size)
    if mismatch >= 0:
        raise BlockMismatchError(
            f"{sorter.sorter_id}: block {mismatch} differs from the reference copy"
        )
    unsorted = _kernels.first_unsorted_block(keys, array_size)
    if unsorted >= 0 or bad:
        raise SortCorrectnessError(
            f"{sorter.sorter_id}: block {max(unsorted, 0)} is not sorted"
        )
    if _kernels.fingerprint61(keys, z) != fp_before:
        raise SortCorrectnessError(
            f"{sorter.sorter_id}: region is no longer a permutation of its input"
        )
    return MeasurementRecord(
        sorter.sorter_id, array_size, 0, elapsed / number_of_arrays, counter.unit
    )


# ---------------------------------------------------------------------------
# aggregation


@dataclass(frozen=True)
class RankRow:
    sorter_id: str
    geomean: float
    rank: int
    means: tuple[float, ...]      # aligned with RankTable.sizes
    relatives: tuple[float, ...]  # mean / column best, >= 1


@dataclass(frozen=True)
class RankTable:
    sizes: tuple[int, ...]
    rows: tuple[RankRow, ...]  # ordered by rank

    def row(self, sorter_id: str) -> RankRow:
        for r in self.rows:
            if r.sorter_id == sorter_id:
                return r
        raise KeyError(sorter_id)

    def relative(self, sorter_id: str, size: int) -> float:
        return self.row(sorter_id).relatives[self.sizes.index(size)]


def aggregate_ranks(records: Sequence[MeasurementRecord]) -> RankTable:
    """Per-size means, relatives against the column best, geometric mean of
    the relatives, and ranks ascending by geomean (ties by sorter id)."""
    if not records:
        raise IncompleteDataError("no records to aggregate")
    cells: dict[tuple[str, int], list[float]] = defaultdict(list)
    for r in records:
        cells[(r.sorter_id, r.array_size)].append(r.cost)
    sorters = sorted({r.sorter_id for r in records})
    sizes = tuple(sorted({r.array_size for r in records}))
    means: dict[tuple[str, int], float] = {}
    for s in sorters:
        for z in sizes:
            costs = cells.get((s, z))
            if not costs:
                raise IncompleteDataError(f"no records for sorter {s!r} at size {z}")
            means[(s, z)] = sum(costs) / len(costs)
    best = {z: min(means[(s, z)] for s in sorters) for z in sizes}
    for z, b in best.items():
        if b <= 0:
            raise ValueError(
                f"column best at size {z} is {b}; ranking needs positive means "
                "(more iterations or a real counter)"
            )
    rows = []
    for s in sorters:
        rel = tuple(means[(s, z)] / best[z] for z in sizes)
        geo = math.exp(sum(math.log(r) for r in rel) / len(rel))
        rows.append((geo, s, rel))
    rows.sort(key=lambda t: (t[0], t[1]))
    table_rows = tuple(
        RankRow(s, geo, rank, tuple(means[(s, z)] for z in sizes), rel)
        for rank, (geo, s, rel) in enumerate(rows, start=1)
    )
    return RankTable(sizes, table_rows)


@dataclass(frozen=True)
class BoxplotStats:
    q1: float
    median: float
    q3: float
    iqr: float
    whisker_lo: float
    whisker_hi: float
    outliers: tuple[float, ...]


def boxplot_stats(costs: Sequence[float]) -> BoxplotStats:
    """Quartiles by linear interpolation; whiskers reach the most extreme
    points within 1.5 IQR of the quartiles, the rest are outliers."""
    if len(costs) == 0:
        raise ValueError("boxplot_stats needs at least one value")
    arr = np.sort(np.asarray(costs, dtype=np.float64))
    q1, median, q3 = (float(q) for q in np.percentile(arr, [25.0, 50.0, 75.0]))
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = arr[(arr >= lo_fence) & (arr <= hi_fence)]
    outliers = arr[(arr < lo_fence) | (arr > hi_fence)]
    if inside.size:
        whisker_lo, whisker_hi = float(inside[0]), float(inside[-1])
    else:
        whisker_lo = whisker_hi = median
    return BoxplotStats(q1, median, q3, iqr, whisker_lo, whisker_hi, tuple(float(o) for o in outliers))


# ---------------------------------------------------------------------------
# CSV interchange


def _open_for(target, mode):
    if isinstance(target, (str, Path)):
        return open(target, mode, newline=""), True
    return target, False


def write_records(target, records: Iterable[MeasurementRecord]) -> None:
    """Write the record CSV (``sorter,size,measure,cost,unit``)."""
    fh, owned = _open_for(target, "w")
    try:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow([r.sorter_id, r.array_size, r.measure_index, repr(r.cost), r.unit])
    finally:
        if owned:
            fh.close()


def read_records(source) -> list[MeasurementRecord]:
    """Read a record CSV written by :func:`write_records`."""
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            text = fh.read()
    else:
        text = source.read()
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"expected header {','.join(CSV_HEADER)}")
    out = []
    for row in rows[1:]:
        if not row:
            continue
        sorter_id, size, measure, cost, unit = row
        out.append(MeasurementRecord(sorter_id, int(size), int(measure), float(cost), unit))
    return out


def write_rank_table(target, table: RankTable) -> None:
    """Write the rank CSV: ``sorter,geomean,rank`` then one mean column per size."""
    fh, owned = _open_for(target, "w")
    try:
        w = csv.writer(fh)
        w.writerow(["sorter", "geomean", "rank"] + [f"mean_{z}" for z in table.sizes])
        for row in table.rows:
            w.writerow([row.sorter_id, repr(row.geomean), row.rank] + [repr(m) for m in row.means])
    finally:
        if owned:
            fh.close()
