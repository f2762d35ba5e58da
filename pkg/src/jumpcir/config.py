"""Flat JSON configuration shared by the CLI and the experiment runner.

A config is one JSON object. Model keys follow :meth:`ModelParams.to_dict`
(``a``, ``b``, ``sigma``, ``y0``, ``levy.*``); run settings live under
``experiment.*``::

    {"a": 1, "b": 1, "sigma": 0.5, "y0": 1,
     "levy.kind": "cpp", "levy.rate": 1, "levy.jump.kind": "exp", "levy.jump.lam": 2,
     "experiment.T": 200, "experiment.replicates": 1000, "experiment.seed": 7}
"""
from __future__ import annotations

import json
from pathlib import Path as FsPath
from typing import Any, Mapping, Optional, Union

from .exceptions import InvalidParameter
from .experiment import ExperimentConfig
from .model import ModelParams
from .simulate import ExactBetweenJumps, FullTruncationEuler

EXPERIMENT_KEYS = {"T", "replicates", "scheme", "dt", "steps_per_unit", "scaling", "seed",
                   "out_dir", "n_jobs", "reference_size"}


def load_config(src: Union[str, FsPath]) -> dict[str, Any]:
    """Read a flat JSON config; nested objects are rejected."""
    doc = json.loads(FsPath(src).read_text())
    if not isinstance(doc, dict):
        raise InvalidParameter("a config must be a JSON object")
    for k, v in doc.items():
        if isinstance(v, (dict, list)):
            raise InvalidParameter(f"config values must be scalars, key {k!r} is not")
        if k.startswith("experiment.") and k[len("experiment."):] not in EXPERIMENT_KEYS:
            raise InvalidParameter(f"unknown experiment key {k!r}")
    return doc


def scheme_from(doc: Mapping[str, Any], dt: Optional[float] = None, kind: Optional[str] = None):
    kind = kind or doc.get("experiment.scheme", "exact")
    if kind == "exact":
        if dt is not None:
            return ExactBetweenJumps(max(1, round(1.0 / dt)))
        return ExactBetweenJumps(int(doc.get("experiment.steps_per_unit", 100)))
    if kind == "euler":
        return FullTruncationEuler(float(dt if dt is not None else doc.get("experiment.dt", 1e-3)))
    raise InvalidParameter(f"scheme must be 'exact' or 'euler', got {kind!r}")


def experiment_from(doc: Mapping[str, Any], **overrides) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig`; keyword overrides win over the document."""
    def get(key, default=None):
        if overrides.get(key) is not None:
            return overrides[key]
        return doc.get(f"experiment.{key}", default)

    for key in ("T", "replicates"):
        if get(key) is None:
            raise InvalidParameter(f"missing key 'experiment.{key}'")
    ref = get("reference_size")
    return ExperimentConfig(
        params=ModelParams.from_dict(doc),
        T=float(get("T")),
        replicates=int(get("replicates")),
        scheme=scheme_from(doc),
        scaling=get("scaling", "deterministic"),
        seed=int(get("seed", 0)),
        out_dir=get("out_dir"),
        n_jobs=int(get("n_jobs", 1)),
        reference_size=None if ref is None else int(ref),
    )
