"""Compiled kernels: swap strategies, sorters, and harness inner loops.

Everything here operates on parallel ``uint64`` key/reference arrays and is
compiled with numba so that timed regions contain no interpreter work and
branch behaviour is real machine behaviour.  Strategy dispatch happens at
build time: each factory closes over one swap kernel, giving a monomorphic
compiled sorter per (strategy, table) combination.

Unsigned arithmetic note: mixing uint64 with signed ints promotes to
float64 under numpy rules, so every shift/mask constant below is an
explicit ``np.uint64``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numba import njit

from .networks import Network

MINSTD_MULT = np.uint64(48271)
MINSTD_MOD = np.uint64(2147483647)
M61 = np.uint64((1 << 61) - 1)

_U0 = np.uint64(0)
_U1 = np.uint64(1)


# ---------------------------------------------------------------------------
# compare-exchange kernels, one per strategy


@njit(cache=True)
def _swap_branch_if(keys, refs, i, j):
    # Def: control-flow fork, plain swap in the taken arm.
    if keys[j] < keys[i]:
        tk = keys[i]
        keys[i] = keys[j]
        keys[j] = tk
        tr = refs[i]
        refs[i] = refs[j]
        refs[j] = tr


@njit(cache=True)
def _swap_select_expr(keys, refs, i, j):
    # QMa: conditional expressions with trivial else parts.
    r = keys[i] > keys[j]
    tk = keys[i]
    tr = refs[i]
    keys[i] = keys[j] if r else keys[i]
    refs[i] = refs[j] if r else refs[i]
    keys[j] = tk if r else keys[j]
    refs[j] = tr if r else refs[j]


@njit(cache=True)
def _swap_tuple_select(keys, refs, i, j):
    # Tie: one conditional expression over whole preassembled tuples.
    lk = keys[i]
    lr = refs[i]
    rk = keys[j]
    rr = refs[j]
    nlk, nlr, nrk, nrr = (rk, rr, lk, lr) if rk < lk else (lk, lr, rk, rr)
    keys[i] = nlk
    refs[i] = nlr
    keys[j] = nrk
    refs[j] = nrr


@njit(cache=True)
def _swap_four_select(keys, refs, i, j):
    # 4Cm: one comparison, four value selects from two temporaries.
    tk = keys[i]
    tr = refs[i]
    f = keys[j] < tk
    keys[i] = keys[j] if f else keys[i]
    refs[i] = refs[j] if f else refs[i]
    keys[j] = tk if f else keys[j]
    refs[j] = tr if f else refs[j]


@njit(cache=True)
def _swap_four_select_split(keys, refs, i, j):
    # 4CS: same four selects, but each one is a separate single-assignment
    # step with no dependence on its siblings (schedulable independently).
    tk = keys[i]
    tr = refs[i]
    f = keys[j] < tk
    nlk = keys[j] if f else keys[i]
    nlr = refs[j] if f else refs[i]
    nrk = tk if f else keys[j]
    nrr = tr if f else refs[j]
    keys[i] = nlk
    refs[i] = nlr
    keys[j] = nrk
    refs[j] = nrr


@njit(cache=True)
def _swap_six_select(keys, refs, i, j):
    # 6Cm: six selects; even the temporaries are conditionally loaded.
    f = keys[j] < keys[i]
    tk = keys[i] if f else _U0
    tr = refs[i] if f else _U0
    nlk = keys[j] if f else keys[i]
    nlr = refs[j] if f else refs[i]
    nrk = tk if f else keys[j]
    nrr = tr if f else refs[j]
    keys[i] = nlk
    refs[i] = nlr
    keys[j] = nrk
    refs[j] = nrr


@njit(cache=True)
def _swap_slot_select(keys, refs, i, j):
    # Cla: the select moves a slot designator, values copy through it.
    tk = keys[i]
    tr = refs[i]
    f = keys[j] < tk
    p = j if f else i
    nlk = keys[p]
    nlr = refs[p]
    nrk = tk if f else keys[j]
    nrr = tr if f else refs[j]
    keys[i] = nlk
    refs[i] = nlr
    keys[j] = nrk
    refs[j] = nrr


@njit(cache=True)
def _flag_less(a, b):
    return np.int64(a < b)


@njit(cache=True)
def _swap_predicate_slot_select(keys, refs, i, j):
    # CPr: like Cla, but the comparison lives in an external predicate and
    # the select only tests the returned integer flag against zero.
    tk = keys[i]
    tr = refs[i]
    pred = _flag_less(keys[j], tk)
    f = pred != np.int64(0)
    p = j if f else i
    nlk = keys[p]
    nlr = refs[p]
    nrk = tk if f else keys[j]
    nrr = tr if f else refs[j]
    keys[i] = nlk
    refs[i] = nlr
    keys[j] = nrk
    refs[j] = nrr


SWAP_KERNELS = {
    "Def": _swap_branch_if,
    "QMa": _swap_select_expr,
    "Tie": _swap_tuple_select,
    "4Cm": _swap_four_select,
    "4CS": _swap_four_select_split,
    "6Cm": _swap_six_select,
    "Cla": _swap_slot_select,
    "CPr": _swap_predicate_slot_select,
}


# ---------------------------------------------------------------------------
# network execution


@lru_cache(maxsize=None)
def comparator_arrays(net: Network):
    """Network comparators as parallel int64 index arrays (treat read-only)."""
    los = np.array([c.lo for c in net.comparators], dtype=np.int64)
    his = np.array([c.hi for c in net.comparators], dtype=np.int64)
    return los, his


def _build_network_runner(swap):
    @njit
    def run(keys, refs, los, his):
        for c in range(los.shape[0]):
            swap(keys, refs, los[c], his[c])

    return run


def _build_network_rows_runner(swap):
    @njit
    def run(keys2d, refs2d, los, his):
        for r in range(keys2d.shape[0]):
            krow = keys2d[r]
            rrow = refs2d[r]
            for c in range(los.shape[0]):
                swap(krow, rrow, los[c], his[c])

    return run


_network_runners: dict[str, object] = {}
_rows_runners: dict[str, object] = {}


def network_runner(code: str):
    if code not in _network_runners:
        _network_runners[code] = _build_network_runner(SWAP_KERNELS[code])
    return _network_runners[code]


def network_rows_runner(code: str):
    if code not in _rows_runners:
        _rows_runners[code] = _build_network_rows_runner(SWAP_KERNELS[code])
    return _rows_runners[code]


# ---------------------------------------------------------------------------
# insertion sorts and heapsort (ranges are half-open [lo, hi))


@njit(cache=True)
def insertion_guarded(keys, refs, lo, hi):
    for i in range(lo + 1, hi):
        k = keys[i]
        r = refs[i]
        j = i - 1
        while j >= lo and keys[j] > k:
            keys[j + 1] = keys[j]
            refs[j + 1] = refs[j]
            j -= 1
        keys[j + 1] = k
        refs[j + 1] = r


@njit(cache=True)
def insertion_unguarded(keys, refs, lo, hi):
    # Move the minimum to the front first; it guards the scan so the inner
    # loop needs no bounds check.
    if hi - lo < 2:
        return
    m = lo
    for i in range(lo + 1, hi):
        if keys[i] < keys[m]:
            m = i
    if m != lo:
        tk = keys[lo]
        keys[lo] = keys[m]
        keys[m] = tk
        tr = refs[lo]
        refs[lo] = refs[m]
        refs[m] = tr
    for i in range(lo + 2, hi):
        k = keys[i]
        r = refs[i]
        j = i - 1
        while keys[j] > k:
            keys[j + 1] = keys[j]
            refs[j + 1] = refs[j]
            j -= 1
        keys[j + 1] = k
        refs[j + 1] = r


@njit(cache=True)
def _sift_down(keys, refs, base, root, end):
    while True:
        child = 2 * root + 1
        if child >= end:
            return
        if child + 1 < end and keys[base + child] < keys[base + child + 1]:
            child += 1
        if keys[base + root] < keys[base + child]:
            tk = keys[base + root]
            keys[base + root] = keys[base + child]
            keys[base + child] = tk
            tr = refs[base + root]
            refs[base + root] = refs[base + child]
            refs[base + child] = tr
            root = child
        else:
            return


@njit(cache=True)
def heapsort_range(keys, refs, lo, hi):
    n = hi - lo
    if n < 2:
        return
    for s in range(n // 2 - 1, -1, -1):
        _sift_down(keys, refs, lo, s, n)
    for end in range(n - 1, 0, -1):
        tk = keys[lo]
        keys[lo] = keys[lo + end]
        keys[lo + end] = tk
        tr = refs[lo]
        refs[lo] = refs[lo + end]
        refs[lo + end] = tr
        _sift_down(keys, refs, lo, 0, end)


@njit(cache=True)
def noop_range(keys, refs, lo, hi):
    # Deliberately empty "sorter" for harness calibration.
    return


# ---------------------------------------------------------------------------
# small-sort dispatcher: network for 2..16 channels, insertion above


def build_small_sorter(los, his, offs, swap):
    """Range sorter routing m <= 16 to the packed network, else insertion.

    ``offs`` holds per-size slices into the flat comparator arrays:
    size m uses ``los[offs[m]:offs[m+1]]``.
    """

    @njit
    def run(keys, refs, lo, hi):
        m = hi - lo
        if m <= 1:
            return
        if m <= 16:
            for c in range(offs[m], offs[m + 1]):
                swap(keys, refs, lo + los[c], lo + his[c])
        else:
            insertion_guarded(keys, refs, lo, hi)

    return run


# ---------------------------------------------------------------------------
# register-style sample sort


def build_sample_sort(small_sort):
    """Sample sorter with 3 splitters and 4 out-of-place buckets.

    ``a`` is the oversampling factor, ``block`` how many elements are
    classified per loop iteration, ``limit`` the base-case cutoff handed to
    ``small_sort``.  Splitters are sampled at evenly spaced positions and
    sorted with the same small sorter.
    """

    @njit
    def run(keys, refs, a, block, limit):
        work = [(np.int64(0), np.int64(keys.shape[0]))]
        while len(work) > 0:
            lo, hi = work.pop()
            n = hi - lo
            if n <= limit or n < 4 * a:
                small_sort(keys, refs, lo, hi)
                continue
            m = 4 * a
            sk = np.empty(m, np.uint64)
            sr = np.empty(m, np.uint64)
            for t in range(m):
                src = lo + (t * n) // m
                sk[t] = keys[src]
                sr[t] = refs[src]
            small_sort(sk, sr, 0, m)
            s0 = sk[a - 1]
            s1 = sk[2 * a - 1]
            s2 = sk[3 * a - 1]
            bk = np.empty((4, n), np.uint64)
            br = np.empty((4, n), np.uint64)
            cnt = np.zeros(4, np.int64)
            states = np.empty(block, np.int64)
            i = lo
            full_end = lo + (n // block) * block
            while i < full_end:
                # one independent comparison->select->shift dataflow per lane
                for t in range(block):
                    k = keys[i + t]
                    p1 = s1 < k
                    sx = s2 if p1 else s0
                    p2 = sx < k
                    states[t] = (np.int64(p1) << 1) + np.int64(p2)
                for t in range(block):
                    b = states[t]
                    bk[b, cnt[b]] = keys[i + t]
                    br[b, cnt[b]] = refs[i + t]
                    cnt[b] += 1
                i += block
            while i < hi:
                k = keys[i]
                p1 = s1 < k
                sx = s2 if p1 else s0
                p2 = sx < k
                b = (np.int64(p1) << 1) + np.int64(p2)
                bk[b, cnt[b]] = keys[i]
                br[b, cnt[b]] = refs[i]
                cnt[b] += 1
                i += 1
            made_progress = True
            for b in range(4):
                if cnt[b] == n:
                    made_progress = False
            if not made_progress:
                # duplicate-heavy input: every element in one bucket
                insertion_guarded(keys, refs, lo, hi)
                continue
            pos = lo
            for b in range(4):
                c = cnt[b]
                for t in range(c):
                    keys[pos + t] = bk[b, t]
                    refs[pos + t] = br[b, t]
                work.append((pos, pos + c))
                pos += c

    return run


# ---------------------------------------------------------------------------
# hybrid quicksort (introsort shape)


@njit(cache=True)
def _median3_key(a, b, c):
    # 3-channel network (1,2),(0,2),(0,1) on locals, value-select moves only.
    k0 = a
    k1 = b
    k2 = c
    f = k2 < k1
    t = k1
    k1 = k2 if f else k1
    k2 = t if f else k2
    f = k2 < k0
    t = k0
    k0 = k2 if f else k0
    k2 = t if f else k2
    f = k1 < k0
    t = k0
    k0 = k1 if f else k0
    k1 = t if f else k1
    return k1


@njit(cache=True)
def _hoare_partition(keys, refs, lo, hi, pivot):
    # Inclusive bounds; pivot is a key value present in the range.
    i = lo - 1
    j = hi + 1
    while True:
        i += 1
        while keys[i] < pivot:
            i += 1
        j -= 1
        while keys[j] > pivot:
            j -= 1
        if i >= j:
            return j
        tk = keys[i]
        keys[i] = keys[j]
        keys[j] = tk
        tr = refs[i]
        refs[i] = refs[j]
        refs[j] = tr


BASE_FINAL_INSERTION = 0
BASE_INSERTION_PER_PARTITION = 1
BASE_NETWORK_PER_PARTITION = 2


def build_quicksort(mode, small_sort):
    """Introsort with a 16-element cutoff and a choice of base-case policy.

    mode 0 leaves small partitions unsorted and finishes with one guarded
    insertion pass; mode 1 insertion-sorts each small partition; mode 2
    hands each small partition to ``small_sort`` (the network dispatcher).
    Past depth 2*floor(log2 n) a partition falls back to heapsort.
    """

    @njit
    def run(keys, refs):
        n = keys.shape[0]
        if n >= 2:
            if n > 16:
                depth = 0
                m = n
                while m > 1:
                    m >>= 1
                    depth += 1
                depth *= 2
                stack_lo = np.empty(96, np.int64)
                stack_hi = np.empty(96, np.int64)
                stack_d = np.empty(96, np.int64)
                top = 0
                stack_lo[0] = 0
                stack_hi[0] = n - 1
                stack_d[0] = depth
                top = 1
                while top > 0:
                    top -= 1
                    lo = stack_lo[top]
                    hi = stack_hi[top]
                    d = stack_d[top]
                    handled = False
                    while hi - lo + 1 > 16:
                        if d <= 0:
                            heapsort_range(keys, refs, lo, hi + 1)
                            handled = True
                            break
                        d -= 1
                        mid = lo + (hi - lo) // 2
                        pivot = _median3_key(keys[lo], keys[mid], keys[hi])
                        j = _hoare_partition(keys, refs, lo, hi, pivot)
                        # keep the smaller side, push the larger
                        if j - lo < hi - j:
                            stack_lo[top] = j + 1
                            stack_hi[top] = hi
                            stack_d[top] = d
                            top += 1
                            hi = j
                        else:
                            stack_lo[top] = lo
                            stack_hi[top] = j
                            stack_d[top] = d
                            top += 1
                            lo = j + 1
                    if not handled:
                        if mode == BASE_INSERTION_PER_PARTITION:
                            insertion_guarded(keys, refs, lo, hi + 1)
                        elif mode == BASE_NETWORK_PER_PARTITION:
                            small_sort(keys, refs, lo, hi + 1)
            else:
                if mode == BASE_INSERTION_PER_PARTITION:
                    insertion_guarded(keys, refs, 0, n)
                elif mode == BASE_NETWORK_PER_PARTITION:
                    small_sort(keys, refs, 0, n)
        if mode == BASE_FINAL_INSERTION:
            insertion_guarded(keys, refs, 0, n)

    return run


# ---------------------------------------------------------------------------
# harness kernels: rng, fingerprint, check passes, measured blocks


@njit(cache=True)
def minstd_next(seed):
    return seed * MINSTD_MULT % MINSTD_MOD


@njit(cache=True)
def minstd_fill(keys, refs, seed):
    # One raw generator output per key; references are sequential indices.
    s = seed
    for i in range(keys.shape[0]):
        s = s * MINSTD_MULT % MINSTD_MOD
        keys[i] = s
        refs[i] = np.uint64(i)
    return s


@njit(cache=True)
def _m61_reduce(x):
    x = (x & M61) + (x >> np.uint64(61))
    if x >= M61:
        x -= M61
    return x


@njit(cache=True)
def _m61_mul(a, b):
    # Schoolbook 64x64 split; 2^64 = 8 and 2^61 = 1 modulo M61.
    a_hi = a >> np.uint64(32)
    a_lo = a & np.uint64(0xFFFFFFFF)
    b_hi = b >> np.uint64(32)
    b_lo = b & np.uint64(0xFFFFFFFF)
    mid = a_hi * b_lo + a_lo * b_hi
    mid_lo = mid & np.uint64((1 << 29) - 1)
    mid_hi = mid >> np.uint64(29)
    acc = _m61_reduce(a_hi * b_hi * np.uint64(8))
    acc = _m61_reduce(acc + _m61_reduce((mid_lo << np.uint64(32)) + mid_hi))
    acc = _m61_reduce(acc + _m61_reduce(a_lo * b_lo))
    return acc


@njit(cache=True)
def fingerprint61(keys, z):
    # Product of (z - k) over the Mersenne-61 prime field.
    v = _U1
    zr = _m61_reduce(z)
    for i in range(keys.shape[0]):
        k = _m61_reduce(keys[i])
        d = zr - k if zr >= k else zr + M61 - k
        v = _m61_mul(v, d)
    return v


@njit(cache=True)
def sorted_pass(keys):
    for i in range(1, keys.shape[0]):
        if keys[i] < keys[i - 1]:
            return False
    return True


@njit(cache=True)
def equal_pass(keys):
    for i in range(1, keys.shape[0]):
        if keys[i] == keys[i - 1]:
            return True
    return False


def build_measured_block(sort_range):
    """Timed inner loop: generate, fingerprint, sort, check, per iteration."""

    @njit
    def block(keys, refs, seed, iterations):
        s = seed
        bad = 0
        n = keys.shape[0]
        for _ in range(iterations):
            s = minstd_fill(keys, refs, s)
            s = s * MINSTD_MULT % MINSTD_MOD
            z = s
            v = fingerprint61(keys, z)
            while v == _U0:
                z += _U1
                v = fingerprint61(keys, z)
            sort_range(keys, refs, 0, n)
            w = fingerprint61(keys, z)
            if (not sorted_pass(keys)) or w != v:
                bad += 1
        return s, bad

    return block


@njit(cache=True)
def baseline_block(keys, refs, seed, iterations):
    # Cost twin of the measured block minus the sort: the order pass is
    # replaced by an adjacent-equality pass over the unsorted data.
    s = seed
    suspicious = 0
    for _ in range(iterations):
        s = minstd_fill(keys, refs, s)
        s = s * MINSTD_MULT % MINSTD_MOD
        z = s
        v = fingerprint61(keys, z)
        while v == _U0:
            z += _U1
            v = fingerprint61(keys, z)
        w = fingerprint61(keys, z)
        if equal_pass(keys) or w != v:
            suspicious += 1
    return s, suspicious


def build_block_pass(sort_range):
    """Sort every consecutive block of ``block`` elements, in place."""

    @njit
    def run(keys, refs, block):
        n = keys.shape[0]
        i = 0
        while i < n:
            sort_range(keys, refs, i, i + block)
            i += block

    return run


@njit(cache=True)
def first_mismatch_block(keys, refs, ref_keys, ref_refs, block):
    n = keys.shape[0]
    i = 0
    b = 0
    while i < n:
        for t in range(i, i + block):
            if keys[t] != ref_keys[t] or refs[t] != ref_refs[t]:
                return b
        i += block
        b += 1
    return -1


@njit(cache=True)
def first_unsorted_block(keys, block):
    n = keys.shape[0]
    i = 0
    b = 0
    while i < n:
        for t in range(i + 1, i + block):
            if keys[t] < keys[t - 1]:
                return b
        i += block
        b += 1
    return -1
