"""Parameter records, regime classification and first-moment formulas.

The process is the jump-type CIR model

    dY_t = (a - b Y_t) dt + sigma sqrt(Y_t) dW_t + dJ_t,   Y_0 = y0,

where J is a driftless subordinator with Levy measure ``m``. Only
finite-activity measures (compound Poisson) and the zero measure are
represented.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Mapping, Union

import numpy as np

from .exceptions import InvalidParameter, NotSubcritical

#: |b| below this switches mean_yt to its b = 0 branch.
B_ZERO_TOL = 1e-12


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidParameter(msg)


def _finite(x: float) -> bool:
    return isinstance(x, (int, float, np.floating, np.integer)) and math.isfinite(x)


# --------------------------------------------------------------------------- jump laws


@dataclass(frozen=True)
class Exponential:
    """Exponential jump sizes with rate ``lam`` (mean ``1/lam``)."""

    lam: float
    kind = "exp"

    def __post_init__(self):
        _require(_finite(self.lam) and self.lam > 0, f"Exponential rate must be > 0, got {self.lam!r}")

    def mean(self) -> float:
        return 1.0 / self.lam

    def second_moment(self) -> float:
        return 2.0 / self.lam**2

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.exponential(1.0 / self.lam, size)


@dataclass(frozen=True)
class Constant:
    """Every jump has the same size ``z0``."""

    z0: float
    kind = "const"

    def __post_init__(self):
        _require(_finite(self.z0) and self.z0 > 0, f"Constant jump size must be > 0, got {self.z0!r}")

    def mean(self) -> float:
        return float(self.z0)

    def second_moment(self) -> float:
        return float(self.z0) ** 2

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, float(self.z0))


@dataclass(frozen=True)
class Gamma:
    """Gamma jump sizes with shape ``shape`` and rate ``rate``."""

    shape: float
    rate: float
    kind = "gamma"

    def __post_init__(self):
        _require(_finite(self.shape) and self.shape > 0, f"Gamma shape must be > 0, got {self.shape!r}")
        _require(_finite(self.rate) and self.rate > 0, f"Gamma rate must be > 0, got {self.rate!r}")

    def mean(self) -> float:
        return self.shape / self.rate

    def second_moment(self) -> float:
        return self.shape * (self.shape + 1.0) / self.rate**2

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.gamma(self.shape, 1.0 / self.rate, size)


JumpLaw = Union[Exponential, Constant, Gamma]


# --------------------------------------------------------------------------- Levy specs


@dataclass(frozen=True)
class ZeroLevy:
    """The zero Levy measure: no jumps, the plain CIR diffusion."""

    kind = "zero"


@dataclass(frozen=True)
class CompoundPoisson:
    """Finite Levy measure ``rate * law``: jumps arrive at ``rate`` per unit time."""

    rate: float
    jump_law: JumpLaw
    kind = "cpp"

    def __post_init__(self):
        _require(_finite(self.rate) and self.rate > 0, f"Compound Poisson rate must be > 0, got {self.rate!r}")
        _require(
            isinstance(self.jump_law, (Exponential, Constant, Gamma)),
            f"unknown jump law {self.jump_law!r}",
        )


LevySpec = Union[ZeroLevy, CompoundPoisson]


def bajd(c: float, lam: float) -> LevySpec:
    """Levy measure ``c * lam * exp(-lam z) dz`` of the basic affine jump diffusion."""
    if c == 0:
        return ZeroLevy()
    return CompoundPoisson(c, Exponential(lam))


def levy_first_moment(levy: LevySpec) -> float:
    """Return the integral of ``z m(dz)``, i.e. ``E(J_1)``."""
    if isinstance(levy, ZeroLevy):
        return 0.0
    if isinstance(levy, CompoundPoisson):
        return levy.rate * levy.jump_law.mean()
    raise InvalidParameter(f"unknown Levy specification {levy!r}")


# --------------------------------------------------------------------------- params


class Regime(enum.Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


@dataclass(frozen=True)
class ModelParams:
    """Parameters ``(a, b, sigma, levy, y0)`` of one jump-type CIR process.

    Validation is eager: ``a >= 0``, ``sigma > 0``, ``y0 >= 0`` and ``b`` finite.
    """

    a: float
    b: float
    sigma: float
    levy: LevySpec = field(default_factory=ZeroLevy)
    y0: float = 0.0

    def __post_init__(self):
        _require(_finite(self.a) and self.a >= 0, f"a must be >= 0, got {self.a!r}")
        _require(_finite(self.b), f"b must be finite, got {self.b!r}")
        _require(_finite(self.sigma) and self.sigma > 0, f"sigma must be > 0, got {self.sigma!r}")
        _require(_finite(self.y0) and self.y0 >= 0, f"y0 must be >= 0, got {self.y0!r}")
        _require(isinstance(self.levy, (ZeroLevy, CompoundPoisson)), f"unknown Levy specification {self.levy!r}")

    @property
    def drift_total(self) -> float:
        """``a`` plus the first moment of the Levy measure."""
        return self.a + levy_first_moment(self.levy)

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    # ---- flat key-value schema

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"a": self.a, "b": self.b, "sigma": self.sigma, "y0": self.y0}
        out.update(levy_to_dict(self.levy))
        return out

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "ModelParams":
        try:
            a, b, sigma = float(doc["a"]), float(doc["b"]), float(doc["sigma"])
        except KeyError as exc:
            raise InvalidParameter(f"missing model key {exc.args[0]!r}") from None
        return cls(a=a, b=b, sigma=sigma, levy=levy_from_dict(doc), y0=float(doc.get("y0", 0.0)))


def levy_to_dict(levy: LevySpec) -> dict[str, Any]:
    if isinstance(levy, ZeroLevy):
        return {"levy.kind": "zero"}
    law = levy.jump_law
    out: dict[str, Any] = {"levy.kind": "cpp", "levy.rate": levy.rate, "levy.jump.kind": law.kind}
    for k, v in asdict(law).items():
        out[f"levy.jump.{k}"] = v
    return out


_LAWS = {"exp": Exponential, "const": Constant, "gamma": Gamma}


def levy_from_dict(doc: Mapping[str, Any]) -> LevySpec:
    kind = doc.get("levy.kind", "zero")
    if kind == "zero":
        return ZeroLevy()
    if kind != "cpp":
        raise InvalidParameter(f"levy.kind must be 'zero' or 'cpp', got {kind!r}")
    jkind = doc.get("levy.jump.kind")
    if jkind not in _LAWS:
        raise InvalidParameter(f"levy.jump.kind must be one of {sorted(_LAWS)}, got {jkind!r}")
    law_cls = _LAWS[jkind]
    fields = {k[len("levy.jump."):]: float(v) for k, v in doc.items()
              if k.startswith("levy.jump.") and k != "levy.jump.kind"}
    try:
        law = law_cls(**fields)
    except TypeError:
        raise InvalidParameter(f"bad fields {sorted(fields)} for jump law {jkind!r}") from None
    if "levy.rate" not in doc:
        raise InvalidParameter("missing key 'levy.rate'")
    return CompoundPoisson(float(doc["levy.rate"]), law)


# --------------------------------------------------------------------------- formulas


def classify(params: ModelParams) -> Regime:
    if params.b > 0:
        return Regime.SUBCRITICAL
    if params.b < 0:
        return Regime.SUPERCRITICAL
    return Regime.CRITICAL


def mean_yt(params: ModelParams, t: float) -> float:
    """Expectation of ``Y_t`` started from ``y0``."""
    if t < 0:
        raise InvalidParameter(f"t must be >= 0, got {t!r}")
    b, k = params.b, params.drift_total
    if abs(b) < B_ZERO_TOL:
        return params.y0 + k * t
    # (1 - exp(-bt)) / b without cancellation
    growth = -math.expm1(-b * t) / b
    return math.exp(-b * t) * params.y0 + k * growth


def stationary_mean(params: ModelParams) -> float:
    if params.b <= 0:
        raise NotSubcritical(f"stationary distribution needs b > 0, got b={params.b}")
    return params.drift_total / params.b
