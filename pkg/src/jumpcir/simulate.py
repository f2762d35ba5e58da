"""Path simulation for jump-type and diffusion CIR processes.

Two schemes are provided. :class:`ExactBetweenJumps` samples the jump train
first and moves between consecutive event times with the exact
(noncentral chi-square) CIR transition. :class:`FullTruncationEuler` is a
positivity-preserving Euler scheme, kept because it exposes the Wiener
increments, which the coupling construction needs.

Every jump time is inserted into the grid twice: the first row holds the
pre-jump value, the second (flagged ``is_jump``) the post-jump value, so
``ΔY`` at a jump is read off the path exactly.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Optional, Union

import numpy as np

from . import _kernels
from .exceptions import InvalidParameter, UnsupportedLevy
from .model import CompoundPoisson, ModelParams, ZeroLevy
from .subordinator import JumpTrain, sample_jumps


@dataclass(frozen=True)
class ExactBetweenJumps:
    steps_per_unit: int = 100

    def __post_init__(self):
        if int(self.steps_per_unit) != self.steps_per_unit or self.steps_per_unit <= 0:
            raise InvalidParameter(f"steps_per_unit must be a positive integer, got {self.steps_per_unit!r}")

    def n_steps(self, T: float) -> int:
        return max(1, math.ceil(T * self.steps_per_unit - 1e-9))


@dataclass(frozen=True)
class FullTruncationEuler:
    dt: float = 1e-3

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise InvalidParameter(f"dt must be > 0, got {self.dt!r}")

    def n_steps(self, T: float) -> int:
        return max(1, math.ceil(T / self.dt - 1e-9))


Scheme = Union[ExactBetweenJumps, FullTruncationEuler]


class Path:
    """A simulated or observed trajectory.

    Parameters
    ----------
    times : array_like
        Nondecreasing grid starting at 0. A time may repeat only at a jump,
        where the repeated row carries ``is_jump=True``.
    values : array_like
        Nonnegative process values on the grid.
    is_jump : array_like of bool, optional
        Marks rows reached by a jump. ``None`` means the path carries no jump
        annotation (externally supplied data).
    meta : dict, optional
        Free-form provenance (parameters, seed, scheme).
    """

    def __init__(self, times, values, is_jump=None, meta: Optional[dict] = None):
        times = np.ascontiguousarray(times, dtype=float).reshape(-1)
        values = np.ascontiguousarray(values, dtype=float).reshape(-1)
        if times.size == 0 or times.shape != values.shape:
            raise InvalidParameter("times and values must be nonempty and of equal length")
        if times[0] != 0.0:
            raise InvalidParameter("a path grid must start at 0")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise InvalidParameter("path values must be finite and nonnegative")
        steps = np.diff(times)
        if np.any(steps < 0):
            raise InvalidParameter("path times must be nondecreasing")
        if is_jump is not None:
            is_jump = np.asarray(is_jump, dtype=bool).reshape(-1)
            if is_jump.shape != times.shape:
                raise InvalidParameter("is_jump must match the grid length")
            if is_jump[0]:
                raise InvalidParameter("no jump is allowed at time 0")
            if np.any(steps[~is_jump[1:]] == 0):
                raise InvalidParameter("repeated grid times are only allowed at flagged jumps")
            if np.any(steps[is_jump[1:]] != 0):
                raise InvalidParameter("a jump row must repeat the time of the pre-jump row")
        for arr in (times, values, is_jump):
            if arr is not None:
                arr.flags.writeable = False
        self.times = times
        self.values = values
        self.is_jump = is_jump
        self.meta = dict(meta or {})

    def __len__(self) -> int:
        return self.times.size

    def __repr__(self) -> str:
        return f"Path(n={len(self)}, T={self.horizon}, jumps={self.n_jumps})"

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def y0(self) -> float:
        return float(self.values[0])

    @property
    def annotated(self) -> bool:
        return self.is_jump is not None

    @property
    def n_jumps(self) -> int:
        return 0 if self.is_jump is None else int(self.is_jump.sum())

    @property
    def jumps(self) -> Optional[JumpTrain]:
        """Jump train read off the annotated rows (``None`` if unannotated).

        Flagged rows with a zero increment carry no jump and are skipped.
        """
        if self.is_jump is None:
            return None
        idx = np.flatnonzero(self.is_jump)
        sizes = self.values[idx] - self.values[idx - 1]
        keep = sizes != 0
        return JumpTrain(self.horizon, self.times[idx[keep]], sizes[keep])

    def value_at(self, t: float) -> float:
        """Right-continuous value at a grid time."""
        k = int(np.searchsorted(self.times, t, side="right")) - 1
        return float(self.values[max(k, 0)])

    # ---- CSV: time,value,is_jump with "# key=value" header comments

    def to_csv(self, dest=None) -> str:
        buf = io.StringIO()
        for key, val in self.meta.items():
            buf.write(f"# {key}={json.dumps(val, sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        if self.is_jump is None:
            # no annotation column, so reading the file back gives an unannotated path
            w.writerow(["time", "value"])
            w.writerows([repr(float(t)), repr(float(v))] for t, v in zip(self.times, self.values))
        else:
            w.writerow(["time", "value", "is_jump"])
            for t, v, j in zip(self.times, self.values, self.is_jump):
                w.writerow([repr(float(t)), repr(float(v)), int(j)])
        text = buf.getvalue()
        if isinstance(dest, (str, FsPath)):
            FsPath(dest).write_text(text)
        elif dest is not None:
            dest.write(text)
        return text

    @classmethod
    def from_csv(cls, src, annotated: bool = True) -> "Path":
        """Read a path CSV; ``annotated=False`` discards the is_jump column."""
        if isinstance(src, str) and "\n" in src:
            text = src
        elif isinstance(src, (str, FsPath)):
            text = FsPath(src).read_text()
        else:
            text = src.read()
        meta, rows = {}, []
        for line in text.splitlines():
            if not line.strip():
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                try:
                    meta[key.strip()] = json.loads(val)
                except json.JSONDecodeError:
                    meta[key.strip()] = val.strip()
                continue
            rows.append(line)
        reader = csv.DictReader(rows)
        if reader.fieldnames is None or reader.fieldnames[:2] != ["time", "value"]:
            raise InvalidParameter(f"expected header time,value[,is_jump], got {reader.fieldnames}")
        times, values, flags = [], [], []
        for r in reader:
            times.append(float(r["time"]))
            values.append(float(r["value"]))
            flags.append(int(r.get("is_jump") or 0))
        has_flags = annotated and "is_jump" in reader.fieldnames
        return cls(times, values, flags if has_flags else None, meta=meta)


# --------------------------------------------------------------------------- helpers


def _check_levy(params: ModelParams) -> None:
    if not isinstance(params.levy, (ZeroLevy, CompoundPoisson)):
        raise UnsupportedLevy(f"only finite-activity Levy measures are supported, got {params.levy!r}")


def _event_grid(T: float, n_steps: int, train: JumpTrain):
    """Merge a uniform grid with the jump times (each jump time appears twice)."""
    grid = np.linspace(0.0, T, n_steps + 1)
    k = len(train)
    times = np.concatenate([grid, train.times, train.times])
    sizes = np.concatenate([np.zeros(n_steps + 1 + k), train.sizes])
    order = np.lexsort((sizes > 0, times))
    return np.ascontiguousarray(times[order]), np.ascontiguousarray(sizes[order])


_EMPTY = np.empty(0)


def cir_transition_sample(y: float, dt: float, a: float, b: float, sigma: float,
                          rng: np.random.Generator) -> float:
    """Draw ``Y_dt`` of the diffusion CIR started at ``y`` (exact law)."""
    if y < 0 or dt < 0 or a < 0 or sigma <= 0:
        raise InvalidParameter("need y >= 0, dt >= 0, a >= 0, sigma > 0")
    return float(_kernels.cir_draw(rng, float(y), float(dt), float(a), float(b), float(sigma)))


def simulate_jump_cir(params: ModelParams, T: float, scheme: Optional[Scheme] = None,
                      rng: Optional[np.random.Generator] = None,
                      return_increments: bool = False):
    """Simulate one path of the jump-type CIR process on ``[0, T]``.

    With ``return_increments=True`` (Euler scheme only) also returns the
    Wiener increments, aligned with the path rows.
    """
    _check_levy(params)
    if not (math.isfinite(T) and T > 0):
        raise InvalidParameter(f"T must be > 0, got {T!r}")
    scheme = ExactBetweenJumps() if scheme is None else scheme
    rng = np.random.default_rng() if rng is None else rng
    train = sample_jumps(params.levy, T, rng)
    times, sizes = _event_grid(T, scheme.n_steps(T), train)
    values = np.empty_like(times)
    meta = {"params": params.to_dict(), "T": T, "scheme": _scheme_meta(scheme)}
    if isinstance(scheme, ExactBetweenJumps):
        if return_increments:
            raise InvalidParameter("Wiener increments are only available for the Euler scheme")
        _kernels.exact_walk(rng, float(params.y0), float(params.a), float(params.b),
                            float(params.sigma), times, sizes, values)
        return Path(times, values, sizes > 0, meta=meta)
    dw = _wiener_increments(times, rng)
    _kernels.euler_walk(float(params.y0), float(params.a), float(params.b), float(params.sigma),
                        times, sizes, dw, values)
    path = Path(times, values, sizes > 0, meta=meta)
    return (path, dw) if return_increments else path


def _wiener_increments(times: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    dt = np.diff(times, prepend=0.0)
    return np.sqrt(dt) * rng.standard_normal(times.size)


def _scheme_meta(scheme: Scheme) -> dict:
    if isinstance(scheme, ExactBetweenJumps):
        return {"kind": "exact", "steps_per_unit": scheme.steps_per_unit}
    return {"kind": "euler", "dt": scheme.dt}


def simulate_diffusion_cir(a: float, b: float, sigma: float, y0: float, T: float,
                           scheme: Optional[Scheme] = None,
                           rng: Optional[np.random.Generator] = None) -> Path:
    """Diffusion CIR ``dY = (a - bY)dt + sigma sqrt(Y) dW`` (no jumps)."""
    return simulate_jump_cir(ModelParams(a, b, sigma, ZeroLevy(), y0), T, scheme, rng)


def simulate_coupled_pair(params: ModelParams, T: float, dt: float,
                          rng: Optional[np.random.Generator] = None) -> tuple[Path, Path]:
    """Euler paths with and without jumps driven by the same Wiener increments.

    The second path lives on the same grid minus the repeated jump rows.
    """
    _check_levy(params)
    scheme = FullTruncationEuler(dt)
    rng = np.random.default_rng() if rng is None else rng
    train = sample_jumps(params.levy, T, rng)
    times, sizes = _event_grid(T, scheme.n_steps(T), train)
    dw = _wiener_increments(times, rng)
    args = (float(params.y0), float(params.a), float(params.b), float(params.sigma))
    with_jumps = np.empty_like(times)
    _kernels.euler_walk(*args, times, sizes, dw, with_jumps)
    without = np.empty_like(times)
    _kernels.euler_walk(*args, times, np.zeros_like(sizes), dw, without)
    keep = sizes == 0
    meta = {"params": params.to_dict(), "T": T, "scheme": _scheme_meta(scheme)}
    return (Path(times, with_jumps, sizes > 0, meta=meta),
            Path(times[keep], without[keep], np.zeros(keep.sum(), dtype=bool), meta=meta))


def integral_of_path(path: Path) -> float:
    """Left-Riemann sum of the path values over its grid."""
    return math.fsum(path.values[:-1] * np.diff(path.times))


# --------------------------------------------------------------------------- summaries


@dataclass(frozen=True)
class PathSummary:
    """Statistics of one exact-scheme path, computed without storing it.

    ``int_y`` is the drift-corrected trapezoid estimate of the time
    integral (unbiased given the grid values); ``int_left`` is the plain
    left-Riemann sum, as :func:`integral_of_path` would return.
    """

    y_end: float
    int_y: float
    int_left: float
    qv_continuous: float
    j_t: float
    n_jumps: int


def simulate_summary(params: ModelParams, T: float, n_steps: int,
                     rng: np.random.Generator) -> PathSummary:
    """Exact-scheme simulation on ``n_steps`` uniform steps, reduced to summaries."""
    _check_levy(params)
    train = sample_jumps(params.levy, T, rng)
    times, sizes = _event_grid(T, n_steps, train)
    y_end, int_left, int_corr, qv, jsum = _kernels.exact_walk(
        rng, float(params.y0), float(params.a), float(params.b), float(params.sigma),
        times, sizes, _EMPTY)
    return PathSummary(y_end, int_corr, int_left, qv, jsum, len(train))
