"""Cost counters for the measurement harness.

Preferred source is the kernel performance-counter interface (CPU cycles,
optionally branch misses) opened directly via the ``perf_event_open``
syscall; when that is not permitted the harness falls back to the monotonic
nanosecond clock.  A deterministic fake counter exists so the harness
itself can be tested byte-for-byte.  Records carry the unit of whichever
counter actually ran.

Pinning the process to one core (e.g. ``taskset 0x1``) is the runner's
responsibility; nothing here sets affinity.
"""

from __future__ import annotations

import ctypes
import os
import platform
import struct
import time

__all__ = [
    "ClockCounter",
    "CounterUnavailable",
    "FakeCounter",
    "PerfEventCounter",
    "branch_miss_counter",
    "counter_preferences",
    "cycle_counter",
    "measure_event",
    "resolve_counter",
]

COUNTER_ENV_VAR = "SORTKIT_COUNTER"

PERF_TYPE_HARDWARE = 0
PERF_COUNT_HW_CPU_CYCLES = 0
PERF_COUNT_HW_BRANCH_MISSES = 5

# perf_event_open is not exposed by libc; numbers per architecture.
_PERF_EVENT_OPEN_NR = {
    "x86_64": 298,
    "i386": 336,
    "i686": 336,
    "aarch64": 241,
    "arm64": 241,
    "armv7l": 364,
    "ppc64le": 319,
    "riscv64": 241,
    "s390x": 331,
}


class CounterUnavailable(RuntimeError):
    """The requested counter cannot be opened on this system."""


class _PerfEventAttr(ctypes.Structure):
    _fields_ = [
        ("type", ctypes.c_uint32),
        ("size", ctypes.c_uint32),
        ("config", ctypes.c_uint64),
        ("sample_period", ctypes.c_uint64),
        ("sample_type", ctypes.c_uint64),
        ("read_format", ctypes.c_uint64),
        ("bits", ctypes.c_uint64),
        ("wakeup_events", ctypes.c_uint32),
        ("bp_type", ctypes.c_uint32),
        ("config1", ctypes.c_uint64),
        ("config2", ctypes.c_uint64),
        ("branch_sample_type", ctypes.c_uint64),
        ("sample_regs_user", ctypes.c_uint64),
        ("sample_stack_user", ctypes.c_uint32),
        ("clockid", ctypes.c_int32),
        ("sample_regs_intr", ctypes.c_uint64),
        ("aux_watermark", ctypes.c_uint32),
        ("sample_max_stack", ctypes.c_uint16),
        ("reserved_2", ctypes.c_uint16),
    ]


_EXCLUDE_KERNEL = 1 << 5
_EXCLUDE_HV = 1 << 6


class PerfEventCounter:
    """Hardware event counter for the calling thread (user space only)."""

    def __init__(self, config: int, unit: str):
        nr = _PERF_EVENT_OPEN_NR.get(platform.machine())
        if nr is None:
            raise CounterUnavailable(
                f"no perf_event_open syscall number known for {platform.machine()}"
            )
        attr = _PerfEventAttr()
        attr.type = PERF_TYPE_HARDWARE
        attr.size = ctypes.sizeof(_PerfEventAttr)
        attr.config = config
        attr.bits = _EXCLUDE_KERNEL | _EXCLUDE_HV
        libc = ctypes.CDLL(None, use_errno=True)
        libc.syscall.restype = ctypes.c_long
        fd = libc.syscall(nr, ctypes.byref(attr), 0, -1, -1, 0)
        if fd < 0:
            err = ctypes.get_errno()
            raise CounterUnavailable(
                f"perf_event_open failed: {os.strerror(err) if err else 'unknown error'}"
            )
        self._fd = fd
        self._t0 = 0
        self.unit = unit

    def _read(self) -> int:
        return struct.unpack("q", os.read(self._fd, 8))[0]

    def start(self) -> None:
        self._t0 = self._read()

    def stop(self) -> int:
        return self._read() - self._t0

    def close(self) -> None:
        if self._fd >= 0:
            os.close(self._fd)
            self._fd = -1

    def __del__(self):
        try:
            self.close()
        except OSError:
            pass


def cycle_counter() -> PerfEventCounter:
    return PerfEventCounter(PERF_COUNT_HW_CPU_CYCLES, "cycles")


def branch_miss_counter() -> PerfEventCounter:
    return PerfEventCounter(PERF_COUNT_HW_BRANCH_MISSES, "branch-misses")


class ClockCounter:
    """Monotonic nanosecond clock."""

    unit = "ns"

    def __init__(self):
        self._t0 = 0

    def start(self) -> None:
        self._t0 = time.perf_counter_ns()

    def stop(self) -> int:
        return time.perf_counter_ns() - self._t0


class FakeCounter:
    """Deterministic counter: every read advances by a fixed step."""

    unit = "fake"

    def __init__(self, step: int = 1):
        self._step = step
        self._value = 0
        self._t0 = 0

    def _read(self) -> int:
        v = self._value
        self._value += self._step
        return v

    def start(self) -> None:
        self._t0 = self._read()

    def stop(self) -> int:
        return self._read() - self._t0


def counter_preferences() -> tuple[str, ...]:
    return ("cycles", "clock", "fake")


def resolve_counter(preference: str | None = None, env=os.environ):
    """Pick a counter: the env var beats the flag, cycles degrade to clock."""
    pref = env.get(COUNTER_ENV_VAR) or preference or "cycles"
    if pref == "fake":
        return FakeCounter()
    if pref == "clock":
        return ClockCounter()
    if pref == "cycles":
        try:
            return cycle_counter()
        except CounterUnavailable:
            return ClockCounter()
    raise ValueError(f"unknown counter preference {pref!r}")


def measure_event(fn, counter) -> int:
    """Run ``fn()`` between counter start/stop and return the delta."""
    counter.start()
    fn()
    return counter.stop()
