"""Compound-Poisson subordinator trajectories."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Union

import numpy as np

from .exceptions import InvalidParameter, OutOfHorizon, UnsupportedLevy
from .model import CompoundPoisson, LevySpec, ZeroLevy


@dataclass(frozen=True, eq=False)
class JumpTrain:
    """Jump times and sizes of a subordinator on ``(0, horizon]``."""

    horizon: float
    times: np.ndarray
    sizes: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        sizes = np.asarray(self.sizes, dtype=float).reshape(-1)
        if times.shape != sizes.shape:
            raise InvalidParameter("times and sizes must have the same length")
        if not (math.isfinite(self.horizon) and self.horizon >= 0):
            raise InvalidParameter(f"horizon must be >= 0, got {self.horizon!r}")
        if times.size:
            if times[0] <= 0 or times[-1] > self.horizon:
                raise InvalidParameter("jump times must lie in (0, horizon]")
            if np.any(np.diff(times) <= 0):
                raise InvalidParameter("jump times must be strictly increasing")
            if np.any(sizes <= 0):
                raise InvalidParameter("jump sizes must be strictly positive")
        times.flags.writeable = False
        sizes.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "sizes", sizes)

    def __len__(self) -> int:
        return self.times.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, JumpTrain):
            return NotImplemented
        return (self.horizon == other.horizon
                and np.array_equal(self.times, other.times)
                and np.array_equal(self.sizes, other.sizes))

    @property
    def total(self) -> float:
        return math.fsum(self.sizes)

    @classmethod
    def empty(cls, horizon: float) -> "JumpTrain":
        return cls(horizon, np.empty(0), np.empty(0))

    # ---- CSV: "# horizon=<T>" then a time,size header

    def to_csv(self, dest: Union[str, FsPath, io.TextIOBase, None] = None) -> str:
        buf = io.StringIO()
        buf.write(f"# horizon={self.horizon!r}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "size"])
        for t, z in zip(self.times, self.sizes):
            w.writerow([repr(float(t)), repr(float(z))])
        text = buf.getvalue()
        if isinstance(dest, (str, FsPath)):
            FsPath(dest).write_text(text)
        elif dest is not None:
            dest.write(text)
        return text

    @classmethod
    def from_csv(cls, src: Union[str, FsPath, io.TextIOBase]) -> "JumpTrain":
        if isinstance(src, str) and "\n" in src:
            text = src
        elif isinstance(src, (str, FsPath)):
            text = FsPath(src).read_text()
        else:
            text = src.read()
        horizon = None
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                if key.strip() == "horizon":
                    horizon = float(val)
                continue
            rows.append(line)
        if horizon is None:
            raise InvalidParameter("jump train CSV lacks a '# horizon=' comment")
        reader = csv.DictReader(rows)
        if reader.fieldnames != ["time", "size"]:
            raise InvalidParameter(f"expected header time,size, got {reader.fieldnames}")
        data = [(float(r["time"]), float(r["size"])) for r in reader]
        times = np.array([d[0] for d in data])
        sizes = np.array([d[1] for d in data])
        return cls(horizon, times, sizes)


def _poisson_times(rate: float, T: float, rng: np.random.Generator) -> np.ndarray:
    # exponential inter-arrivals, drawn in blocks until the horizon is passed
    mean = rate * T
    block = max(16, int(mean + 4.0 * math.sqrt(mean) + 1))
    chunks = []
    last = 0.0
    while True:
        arr = last + np.cumsum(rng.exponential(1.0 / rate, block))
        if arr[-1] > T:
            chunks.append(arr[arr <= T])
            break
        chunks.append(arr)
        last = arr[-1]
    return np.concatenate(chunks)


def sample_jumps(levy: LevySpec, T: float, rng: np.random.Generator) -> JumpTrain:
    """Draw the jumps of the subordinator with Levy measure ``levy`` on ``(0, T]``."""
    if not (math.isfinite(T) and T > 0):
        raise InvalidParameter(f"T must be > 0, got {T!r}")
    if isinstance(levy, ZeroLevy):
        return JumpTrain.empty(T)
    if not isinstance(levy, CompoundPoisson):
        raise UnsupportedLevy(f"cannot sample jumps for {levy!r}")
    times = _poisson_times(levy.rate, T, rng)
    sizes = levy.jump_law.sample(rng, times.size)
    return JumpTrain(T, times, sizes)


def jt_at(train: JumpTrain, t: float) -> float:
    """Value ``J_t`` of the subordinator, right-continuous in ``t``."""
    if t > train.horizon:
        raise OutOfHorizon(f"t={t} exceeds the horizon {train.horizon}")
    if t < 0:
        raise OutOfHorizon(f"t={t} is negative")
    k = int(np.searchsorted(train.times, t, side="right"))
    return math.fsum(train.sizes[:k])
