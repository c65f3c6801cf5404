"""Monte Carlo oracle for the cell-under-test intensity.

Draws ``Z = |S + K G|**2`` directly from the model construction, with no
use of the integral representation, so it can validate the quadrature.

Samples are produced in fixed chunks of :data:`CHUNK_SIZE` draws.  Chunk
``i`` uses the Philox stream keyed by ``(seed, i)``, so a batch depends only
on ``(scenario, seed, n)`` and never on how many threads produced it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import _io
from ._parallel import ordered_map
from .distributions import Scenario, make_stream, sample_clutter, sample_signal
from .errors import DomainError

__all__ = [
    "CHUNK_SIZE",
    "SampleBatch",
    "EmpiricalCdf",
    "sample_cut",
    "ks_distance",
    "ks_critical_value",
    "csv_bytes",
    "write_csv",
    "write_binary",
    "read_binary",
]

CHUNK_SIZE = 1 << 16


@dataclass(frozen=True)
class SampleBatch:
    scenario: Scenario
    seed: int
    n: int
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != self.n:
            raise DomainError("batch length does not match n")

    def ecdf(self) -> "EmpiricalCdf":
        return EmpiricalCdf.from_samples(self.values)


class EmpiricalCdf:
    """Right-continuous step function ``#(values <= t) / n``."""

    def __init__(self, sorted_values):
        v = np.array(sorted_values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise DomainError("an empirical CDF needs at least one value")
        if np.any(np.diff(v) < 0):
            raise DomainError("values must be sorted")
        self.sorted_values = v
        self.sorted_values.setflags(write=False)
        self.n = v.size

    @classmethod
    def from_samples(cls, values) -> "EmpiricalCdf":
        return cls(np.sort(np.asarray(values, dtype=float)))

    def __call__(self, t):
        out = np.searchsorted(self.sorted_values, t, side="right") / self.n
        return float(out) if np.ndim(out) == 0 else out

    def left_limit(self, t):
        """``#(values < t) / n``."""
        out = np.searchsorted(self.sorted_values, t, side="left") / self.n
        return float(out) if np.ndim(out) == 0 else out


def _chunk(s: Scenario, seed: int, index: int, size: int) -> np.ndarray:
    rng = make_stream(seed, index)
    c = sample_clutter(s, rng, size)
    sig = sample_signal(s, rng, size)
    re = sig.re + c.re
    im = sig.im + c.im
    return re * re + im * im


def sample_cut(s: Scenario, seed: int, n: int, workers: int | None = None) -> SampleBatch:
    """Draw ``n`` independent cell-under-test intensities."""
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    n = int(n)
    sizes = [min(CHUNK_SIZE, n - start) for start in range(0, n, CHUNK_SIZE)]
    parts = ordered_map(lambda job: _chunk(s, seed, job[0], job[1]), enumerate(sizes), workers)
    return SampleBatch(s, int(seed), n, np.concatenate(parts))


def ks_distance(e: EmpiricalCdf, f: Callable) -> float:
    """Kolmogorov distance ``sup_t |F_emp(t) - f(t)|``.

    Both one-sided gaps are checked at every distinct jump point.  If ``f``
    is itself a step function exposing ``left_limit``, its left limits are
    used for the lower gap.
    """
    x, counts = np.unique(e.sorted_values, return_counts=True)
    cum = np.cumsum(counts)
    upper = cum / e.n
    lower = (cum - counts) / e.n
    fx = np.asarray(f(x), dtype=float)
    f_left = np.asarray(f.left_limit(x), dtype=float) if hasattr(f, "left_limit") else fx
    d_plus = np.max(np.abs(upper - fx))
    d_minus = np.max(np.abs(f_left - lower))
    return float(max(d_plus, d_minus))


def ks_critical_value(n: int, significance: float = 0.001) -> float:
    """Asymptotic one-sample critical value ``sqrt(-log(significance/2)/2)/sqrt(n)``."""
    return math.sqrt(-0.5 * math.log(significance / 2.0)) / math.sqrt(n)


def csv_bytes(batch: SampleBatch) -> bytes:
    lines = ["z"] + [_io.fmt_float(v) for v in batch.values]
    return ("\r\n".join(lines) + "\r\n").encode("ascii")


def write_csv(batch: SampleBatch, path) -> None:
    """One value per line under the header ``z``."""
    Path(path).write_bytes(csv_bytes(batch))


def write_binary(batch: SampleBatch, path) -> None:
    """Raw little-endian float64 column, ``8 * n`` bytes, no header."""
    Path(path).write_bytes(np.asarray(batch.values, dtype="<f8").tobytes())


def read_binary(path) -> np.ndarray:
    return np.frombuffer(Path(path).read_bytes(), dtype="<f8")
