"""Monte-Carlo experiments for the MLE limit theorems and Laplace cross-checks.

A run simulates independent paths, computes the MLE and its scaled error per
replicate, and compares the scaled errors with the regime's limit law by a
Kolmogorov-Smirnov distance. Closed-form targets are used where they exist;
otherwise a reference ensemble of ``10 x replicates`` limit draws is built.

Output is deterministic: identical configurations give identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Optional, Union

import numpy as np

from . import __version__
from .ensemble import (STREAM_CHECK, STREAM_PATHS, STREAM_REFERENCE, check_seed,
                       map_replicates)
from .exceptions import DomainError, InvalidParameter
from .inference import b_hat_from_stats
from .laplace import (critical_limit_laplace, joint_laplace, marginal_laplace_int_y,
                      marginal_laplace_y, stationary_laplace, supercritical_v_laplace)
from .limits import (CriticalRatio, Direct, Scaling, StandardNormal, SubcriticalNormal,
                     SupercriticalMixed, limit_law_for, sample_critical_pair,
                     sample_critical_state, sample_supercritical_limit, sample_v)
from .model import ModelParams, classify
from .simulate import (ExactBetweenJumps, FullTruncationEuler, Scheme, simulate_jump_cir,
                       simulate_summary)
from .stats import ks_critical, ks_statistic, mean_se, normal_cdf, standard_normal_cdf, variance

REPORT_COLUMNS = ("replicate", "b_hat", "scaled_error", "int_y", "j_t", "sigma_sq_hat", "y_end")


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte-Carlo run.

    ``reference_size`` defaults to ten times ``replicates``.
    """

    params: ModelParams
    T: float
    replicates: int
    scheme: Scheme = field(default_factory=ExactBetweenJumps)
    scaling: Scaling = Scaling.DETERMINISTIC
    seed: int = 0
    out_dir: Optional[str] = None
    n_jobs: int = 1
    reference_size: Optional[int] = None

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T > 0):
            raise InvalidParameter(f"T must be > 0, got {self.T!r}")
        if int(self.replicates) != self.replicates or self.replicates <= 0:
            raise InvalidParameter(f"replicates must be a positive integer, got {self.replicates!r}")
        if not isinstance(self.scheme, (ExactBetweenJumps, FullTruncationEuler)):
            raise InvalidParameter(f"unknown scheme {self.scheme!r}")
        object.__setattr__(self, "scaling", Scaling(self.scaling))
        object.__setattr__(self, "seed", check_seed(self.seed))
        if self.reference_size is not None and self.reference_size <= 0:
            raise InvalidParameter("reference_size must be > 0")

    @property
    def n_reference(self) -> int:
        return self.reference_size or 10 * self.replicates

    def to_dict(self) -> dict:
        out = dict(self.params.to_dict())
        out.update({
            "experiment.T": self.T,
            "experiment.replicates": self.replicates,
            "experiment.scaling": self.scaling.value,
            "experiment.seed": self.seed,
            "experiment.reference_size": self.n_reference,
        })
        if isinstance(self.scheme, ExactBetweenJumps):
            out.update({"experiment.scheme": "exact", "experiment.steps_per_unit": self.scheme.steps_per_unit})
        else:
            out.update({"experiment.scheme": "euler", "experiment.dt": self.scheme.dt})
        return out


@dataclass(frozen=True)
class ReplicateRow:
    replicate: int
    b_hat: float
    scaled_error: float
    int_y: float
    j_t: float
    sigma_sq_hat: float
    y_end: float


@dataclass
class ExperimentReport:
    rows: list
    summary: dict
    config: ExperimentConfig

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in self.rows:
            w.writerow([r.replicate] + [repr(float(getattr(r, c))) for c in REPORT_COLUMNS[1:]])
        return buf.getvalue()

    def summary_text(self) -> str:
        return json.dumps(self.summary, indent=2, sort_keys=True, allow_nan=False) + "\n"

    def write(self, out_dir: Union[str, FsPath]) -> None:
        out = FsPath(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in (("report.csv", self.csv_text()), ("summary.json", self.summary_text())):
            _atomic_write(out / name, text)


def _atomic_write(dest: FsPath, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=dest.parent, prefix=f".{dest.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, dest)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --------------------------------------------------------------------------- replicates


def _replicate_stats(cfg: ExperimentConfig, rng: np.random.Generator):
    """``(y_end, int_y, int_left, qv_continuous, j_t)`` of one path."""
    p = cfg.params
    if isinstance(cfg.scheme, ExactBetweenJumps):
        s = simulate_summary(p, cfg.T, cfg.scheme.n_steps(cfg.T), rng)
        return s.y_end, s.int_y, s.int_left, s.qv_continuous, s.j_t
    path = simulate_jump_cir(p, cfg.T, cfg.scheme, rng)
    v, t = path.values, path.times
    inc = np.diff(v)
    flow = ~path.is_jump[1:]
    int_left = math.fsum(v[:-1] * np.diff(t))
    qv = math.fsum(inc[flow] ** 2)
    return v[-1], int_left, int_left, qv, math.fsum(inc[~flow])


def simulate_replicates(cfg: ExperimentConfig) -> list[ReplicateRow]:
    p, T = cfg.params, cfg.T
    desc = limit_law_for(p, cfg.scaling)
    stats = map_replicates(lambda rng: _replicate_stats(cfg, rng), cfg.replicates, cfg.seed,
                           STREAM_PATHS, cfg.n_jobs)
    rows = []
    for r, (y_end, int_y, int_left, qv, j_t) in enumerate(stats):
        b_hat = b_hat_from_stats(y_end, p.y0, p.a, T, j_t, int_y)
        scale = desc.scale(T, p.b, int_y, p.sigma)
        sig2 = qv / int_left if int_left > 0 else float("nan")
        rows.append(ReplicateRow(r, b_hat, scale * (b_hat - p.b), int_y, j_t, sig2, y_end))
    return rows


def reference_sample(cfg: ExperimentConfig, n: Optional[int] = None) -> Optional[np.ndarray]:
    """Draws from the limit law, or ``None`` when a closed CDF is available."""
    law = limit_law_for(cfg.params, cfg.scaling).law
    n = cfg.n_reference if n is None else n
    if isinstance(law, CriticalRatio):
        def draw(rng):
            d = sample_critical_pair(law.a_eff, law.sigma, rng)
            return d.random if law.random else d.deterministic
    elif isinstance(law, SupercriticalMixed):
        def draw(rng):
            return sample_supercritical_limit(law.params, rng, Direct())
    else:
        return None
    return np.array(map_replicates(draw, n, cfg.seed, STREAM_REFERENCE, cfg.n_jobs))


def _target(cfg: ExperimentConfig):
    law = limit_law_for(cfg.params, cfg.scaling).law
    if isinstance(law, StandardNormal):
        return standard_normal_cdf, "N(0,1)"
    if isinstance(law, SubcriticalNormal):
        return normal_cdf(law.variance), f"N(0,{law.variance!r})"
    kind = "critical ratio" if isinstance(law, CriticalRatio) else "mixed normal"
    return reference_sample(cfg), f"{kind} reference ensemble"


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Simulate, summarize and (if ``cfg.out_dir`` is set) write the report.

    Files are written only after every statistic has been computed.
    """
    limit_law_for(cfg.params, cfg.scaling)   # hypotheses first, before any work
    rows = simulate_replicates(cfg)
    b_hat = np.array([r.b_hat for r in rows])
    scaled = np.array([r.scaled_error for r in rows])
    n = len(rows)
    mean_b, se_b = mean_se(b_hat)
    mean_s, se_s = mean_se(scaled)
    ks_defined = n >= 2
    summary = {
        "n": n,
        "seed": cfg.seed,
        "version": __version__,
        "regime": classify(cfg.params).value,
        "scaling": cfg.scaling.value,
        "mean_b_hat": mean_b,
        "se_mean_b_hat": se_b,
        "mean_scaled": mean_s,
        "se_mean_scaled": se_s,
        "var_scaled": variance(scaled) if n >= 2 else None,
        "ks_defined": ks_defined,
        "ks_stat": None,
        "ks_crit_5": None,
        "ks_crit_1": None,
        "config": cfg.to_dict(),
    }
    if ks_defined:
        target, label = _target(cfg)
        summary["target"] = label
        summary["ks_stat"] = ks_statistic(scaled, target)
        m = None if callable(target) else len(target)
        summary["ks_crit_5"] = ks_critical(0.05, n, m)
        summary["ks_crit_1"] = ks_critical(0.01, n, m)
    report = ExperimentReport(rows, summary, cfg)
    if cfg.out_dir is not None:
        report.write(cfg.out_dir)
    return report


# --------------------------------------------------------------------------- Laplace checks


@dataclass(frozen=True)
class CrossCheck:
    closed: float
    mc: float
    se: float
    z_score: float


def _crosscheck(closed: float, values: np.ndarray) -> CrossCheck:
    mc, se = mean_se(values)
    if se == 0.0:
        z = 0.0 if mc == closed else math.copysign(math.inf, mc - closed)
    else:
        z = (mc - closed) / se
    return CrossCheck(closed, mc, se, z)


def _path_functional(params: ModelParams, t: float, steps_per_unit: int, u: float, v: float):
    scheme = ExactBetweenJumps(steps_per_unit)

    def fn(rng):
        s = simulate_summary(params, t, scheme.n_steps(t), rng)
        return math.exp(u * s.y_end + v * s.int_y)
    return fn


def laplace_crosscheck(params: Union[ModelParams, ExperimentConfig], u: float, v: float, t: float,
                       n: int, seed: int = 0, steps_per_unit: int = 100, n_jobs: int = 1) -> CrossCheck:
    """Closed joint transform against the Monte-Carlo mean of ``exp(u Y_t + v int Y)``."""
    if isinstance(params, ExperimentConfig):
        params = params.params
    if u > 0 or v > 0:
        raise DomainError(f"need u <= 0 and v <= 0, got u={u}, v={v}")
    closed = joint_laplace(params, u, v, t)
    if u == 0.0 and v == 0.0:
        return CrossCheck(closed, 1.0, 0.0, 0.0)
    fn = _path_functional(params, t, steps_per_unit, u, v)
    return _crosscheck(closed, np.array(map_replicates(fn, n, seed, STREAM_CHECK, n_jobs)))


LAPLACE_KINDS = ("joint", "y", "inty", "critical-limit", "v-limit", "stationary")


def laplace_value(params: ModelParams, which: str, u: float, v: float, t: float) -> float:
    if which == "joint":
        return joint_laplace(params, u, v, t)
    if which == "y":
        return marginal_laplace_y(params, u, t)
    if which == "inty":
        return marginal_laplace_int_y(params, v, t)
    if which == "critical-limit":
        return critical_limit_laplace(u, v, a=params.a, sigma=params.sigma, levy=params.levy)
    if which == "v-limit":
        return supercritical_v_laplace(u, params)
    if which == "stationary":
        return stationary_laplace(u, params)
    raise InvalidParameter(f"which must be one of {LAPLACE_KINDS}, got {which!r}")


def laplace_monte_carlo(params: ModelParams, which: str, u: float, v: float, t: float,
                        n: int, seed: int = 0, steps_per_unit: int = 100, n_jobs: int = 1) -> CrossCheck:
    """Closed value of any transform kind next to its Monte-Carlo estimate.

    ``stationary`` samples ``Y_T`` at ``T = 200 / b``, ``v-limit`` uses the
    direct sampler of ``V``.
    """
    closed = laplace_value(params, which, u, v, t)
    if which == "joint":
        return laplace_crosscheck(params, u, v, t, n, seed, steps_per_unit, n_jobs)
    if which in ("y", "inty"):
        uu, vv = (u, 0.0) if which == "y" else (0.0, v)
        fn = _path_functional(params, t, steps_per_unit, uu, vv)
    elif which == "critical-limit":
        a_eff = params.drift_total

        def fn(rng):
            y1, int_y = sample_critical_state(a_eff, params.sigma, rng)
            return math.exp(u * y1 + v * int_y)
    elif which == "v-limit":
        def fn(rng):
            return math.exp(u * sample_v(params, rng, Direct()))
    else:
        horizon = 200.0 / params.b

        def fn(rng):
            return math.exp(u * simulate_summary(params, horizon, 1, rng).y_end)
    return _crosscheck(closed, np.array(map_replicates(fn, n, seed, STREAM_CHECK, n_jobs)))
