"""Data-generating processes: noise models, mean and variance profiles.

Samples follow ``X_i = sigma(i/n) * Y_i + mu(i/n)`` for ``i = 1..n``, where
``Y`` is a stationary noise process standardized to mean 0 and variance 1.
Generators are pure functions of ``(spec, seed)``; parallel replications
derive their streams as ``seed = base_seed + replication_index``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .errors import NoiseSpecError
from .series import TimeSeries

__all__ = [
    "IidNormal",
    "CenteredExponential",
    "Ar1",
    "Arma22",
    "Garch11",
    "NoiseSpec",
    "ZeroMean",
    "LinearMean",
    "SineMean",
    "StepMean",
    "PiecewiseLinearMean",
    "MeanFn",
    "ConstantVariance",
    "PiecewiseVariance",
    "SineVariance",
    "VarianceFn",
    "ScenarioSpec",
    "generate_noise",
    "generate_sample",
    "make_alternative",
    "noise_from_dict",
    "noise_to_dict",
    "mean_from_dict",
    "mean_to_dict",
    "variance_from_dict",
    "variance_to_dict",
    "scenario_from_dict",
    "scenario_to_dict",
]

# Transient from the (arbitrary) start state of a dependent recursion; the
# mixing rates of the supported models make anything past a few hundred
# steps indistinguishable from stationarity.
BURN_IN = 1000

_ARMA_PILOT_LEN = 1_000_000
_ARMA_PILOT_SEED = 71_304_625
_arma_pilot_cache: dict[tuple[float, float, float, float], float] = {}


# ---------------------------------------------------------------------------
# Noise processes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IidNormal:
    kind = "iid_normal"

    def label(self) -> str:
        return "N(0,1)"

    def simulate(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.standard_normal(n)


@dataclass(frozen=True)
class CenteredExponential:
    """Exp(1) draws centered by their mean 1; variance is already 1."""

    kind = "iid_exponential_centered"

    def label(self) -> str:
        return "Exp(1)"

    def simulate(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.standard_exponential(n) - 1.0


@dataclass(frozen=True)
class Ar1:
    phi: float
    kind = "ar1"

    def __post_init__(self):
        if not abs(self.phi) < 1:
            raise NoiseSpecError(f"nonstationary noise spec: AR(1) needs |phi| < 1, got {self.phi}")

    def label(self) -> str:
        return f"AR(1), {self.phi:g}"

    def simulate(self, rng: np.random.Generator, n: int) -> np.ndarray:
        eps = rng.standard_normal(n + BURN_IN)
        y = signal.lfilter([1.0], [1.0, -self.phi], eps)[BURN_IN:]
        # marginal variance of the recursion is 1 / (1 - phi^2)
        return y * math.sqrt(1.0 - self.phi**2)


@dataclass(frozen=True)
class Arma22:
    """ARMA(2,2): Y_i = phi1*Y_{i-1} + phi2*Y_{i-2} + e_i + theta1*e_{i-1} + theta2*e_{i-2}."""

    phi1: float
    phi2: float
    theta1: float
    theta2: float
    kind = "arma22"

    def __post_init__(self):
        coeffs = [-self.phi2, -self.phi1, 1.0]
        while len(coeffs) > 1 and coeffs[0] == 0.0:
            coeffs = coeffs[1:]
        if len(coeffs) > 1:
            roots = np.roots(coeffs)
            if np.any(np.abs(roots) <= 1.0 + 1e-12):
                raise NoiseSpecError(
                    "nonstationary noise spec: ARMA AR-polynomial root on or inside unit circle"
                )

    def label(self) -> str:
        return "ARMA(2,2)"

    def _params(self) -> tuple[float, float, float, float]:
        return (self.phi1, self.phi2, self.theta1, self.theta2)

    def _marginal_sd(self) -> float:
        """Standard deviation of the stationary marginal, via a cached pilot run.

        A closed form exists but is easy to get wrong; a one-off long
        simulation pins the scale to ~0.1% which is ample for variance
        standardization.
        """
        key = self._params()
        sd = _arma_pilot_cache.get(key)
        if sd is None:
            rng = np.random.default_rng(_ARMA_PILOT_SEED)
            eps = rng.standard_normal(_ARMA_PILOT_LEN + BURN_IN)
            y = self._filter(eps)[BURN_IN:]
            sd = float(np.std(y))
            _arma_pilot_cache[key] = sd
        return sd

    def _filter(self, eps: np.ndarray) -> np.ndarray:
        return signal.lfilter(
            [1.0, self.theta1, self.theta2], [1.0, -self.phi1, -self.phi2], eps
        )

    def simulate(self, rng: np.random.Generator, n: int) -> np.ndarray:
        eps = rng.standard_normal(n + BURN_IN)
        return self._filter(eps)[BURN_IN:] / self._marginal_sd()


def _garch_recursion_py(z: np.ndarray, omega: float, alpha: float, beta: float) -> np.ndarray:
    h = omega / (1.0 - alpha - beta)
    y = np.empty_like(z)
    y[0] = math.sqrt(h) * z[0]
    for t in range(1, z.size):
        h = omega + alpha * y[t - 1] * y[t - 1] + beta * h
        y[t] = math.sqrt(h) * z[t]
    return y


try:  # the recursion is inherently sequential; JIT it when numba is present
    from numba import njit

    _garch_recursion = njit(cache=True)(_garch_recursion_py)
except ImportError:  # pragma: no cover - numba is a declared dependency
    _garch_recursion = _garch_recursion_py


@dataclass(frozen=True)
class Garch11:
    """GARCH(1,1): Y_i = sqrt(h_i)*e_i, h_i = omega + alpha*Y_{i-1}^2 + beta*h_{i-1}."""

    omega: float
    alpha: float
    beta: float
    kind = "garch11"

    def __post_init__(self):
        if self.omega <= 0 or self.alpha < 0 or self.beta < 0 or self.alpha + self.beta >= 1:
            raise NoiseSpecError(
                "nonstationary noise spec: GARCH(1,1) needs omega > 0, alpha, beta >= 0, "
                f"alpha + beta < 1; got ({self.omega}, {self.alpha}, {self.beta})"
            )

    def label(self) -> str:
        return "GARCH(1,1)"

    def unconditional_variance(self) -> float:
        return self.omega / (1.0 - self.alpha - self.beta)

    def simulate(self, rng: np.random.Generator, n: int) -> np.ndarray:
        z = rng.standard_normal(n + BURN_IN)
        y = _garch_recursion(z, self.omega, self.alpha, self.beta)[BURN_IN:]
        return y / math.sqrt(self.unconditional_variance())


NoiseSpec = IidNormal | CenteredExponential | Ar1 | Arma22 | Garch11


# ---------------------------------------------------------------------------
# Mean functions on [0, 1]
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroMean:
    kind = "zero"

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.zeros_like(x)


@dataclass(frozen=True)
class LinearMean:
    """mu(x) = slope * x."""

    slope: float = 1.0
    kind = "linear"

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return self.slope * x


@dataclass(frozen=True)
class SineMean:
    """mu(x) = amplitude * sin(2*pi*x)."""

    amplitude: float = 1.0
    kind = "sine"

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return self.amplitude * np.sin(2.0 * np.pi * x)


@dataclass(frozen=True)
class StepMean:
    """mu = 0 before the jump location, ``height`` from it on."""

    height: float = 1.0
    location: float = 0.5
    kind = "step"

    def __post_init__(self):
        if not 0.0 < self.location < 1.0:
            raise ValueError(f"step location must lie in (0, 1), got {self.location}")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.where(x >= self.location, self.height, 0.0)


@dataclass(frozen=True)
class PiecewiseLinearMean:
    """Linear interpolation through ``(xs, ys)`` with xs covering [0, 1]."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]
    kind = "piecewise_linear"

    def __post_init__(self):
        xs = tuple(float(v) for v in self.xs)
        ys = tuple(float(v) for v in self.ys)
        if len(xs) != len(ys) or len(xs) < 2:
            raise ValueError("piecewise-linear mean needs matching xs/ys with >= 2 nodes")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("piecewise-linear xs must be strictly increasing")
        if not all(np.isfinite(xs)) or not all(np.isfinite(ys)):
            raise ValueError("piecewise-linear nodes must be finite")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.interp(x, self.xs, self.ys)


MeanFn = ZeroMean | LinearMean | SineMean | StepMean | PiecewiseLinearMean


# ---------------------------------------------------------------------------
# Variance (scale) functions on [0, 1]
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantVariance:
    sigma: float = 1.0
    kind = "constant"

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be strictly positive, got {self.sigma}")

    def sigma_at(self, x: np.ndarray) -> np.ndarray:
        return np.full_like(x, self.sigma)

    @property
    def is_piecewise_constant(self) -> bool:
        return True

    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array([1.0]), np.array([self.sigma**2])


@dataclass(frozen=True)
class PiecewiseVariance:
    """Piecewise-constant scale: sigma = levels[k] on [breakpoints[k-1], breakpoints[k]).

    The last segment is closed at 1; a point exactly on a breakpoint takes
    the level of the segment to its right.
    """

    levels: tuple[float, ...]
    breakpoints: tuple[float, ...]
    kind = "piecewise"

    def __post_init__(self):
        levels = tuple(float(v) for v in self.levels)
        bps = tuple(float(v) for v in self.breakpoints)
        if len(levels) != len(bps) + 1:
            raise ValueError("need exactly one more level than breakpoints")
        if any(v <= 0 for v in levels):
            raise ValueError("all variance levels must be strictly positive")
        if any(not 0.0 < b < 1.0 for b in bps):
            raise ValueError("breakpoints must lie strictly inside (0, 1)")
        if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "breakpoints", bps)

    def sigma_at(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.breakpoints, x, side="right")
        return np.asarray(self.levels, dtype=float)[idx]

    @property
    def is_piecewise_constant(self) -> bool:
        return True

    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        """Segment lengths and the sigma^2 level on each segment."""
        edges = np.concatenate(([0.0], self.breakpoints, [1.0]))
        return np.diff(edges), np.asarray(self.levels, dtype=float) ** 2


@dataclass(frozen=True)
class SineVariance:
    """sigma(x) = 1 + amplitude * sin(4*pi*x); needs |amplitude| < 1."""

    amplitude: float
    kind = "sine_modulated"

    def __post_init__(self):
        if not abs(self.amplitude) < 1:
            raise ValueError(f"|amplitude| must be < 1 to keep sigma positive, got {self.amplitude}")

    def sigma_at(self, x: np.ndarray) -> np.ndarray:
        return 1.0 + self.amplitude * np.sin(4.0 * np.pi * x)

    @property
    def is_piecewise_constant(self) -> bool:
        return False

    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        raise TypeError("sine-modulated variance is not piecewise constant")


VarianceFn = ConstantVariance | PiecewiseVariance | SineVariance


def make_alternative(alt_id: str, n: int, n_ref: int = 2000) -> VarianceFn:
    """Benchmark local alternatives A1-A4 with effect size shrinking as 1/sqrt(n).

    A1: one upward scale step at 1/2; A2: a raised middle third; A3: two
    raised bands (1/5..2/5 and 3/5..4/5); A4: smooth sine modulation.  The
    step height is ``0.2 * sqrt(n_ref / n)`` (A4: amplitude ``0.1 * sqrt(n_ref / n)``),
    so the difficulty is comparable across sample sizes.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    effect = 0.2 * math.sqrt(n_ref / n)
    high = 1.0 + effect
    if alt_id == "A1":
        return PiecewiseVariance(levels=(1.0, high), breakpoints=(0.5,))
    if alt_id == "A2":
        return PiecewiseVariance(levels=(1.0, high, 1.0), breakpoints=(1 / 3, 2 / 3))
    if alt_id == "A3":
        return PiecewiseVariance(
            levels=(1.0, high, 1.0, high, 1.0), breakpoints=(0.2, 0.4, 0.6, 0.8)
        )
    if alt_id == "A4":
        return SineVariance(amplitude=0.1 * math.sqrt(n_ref / n))
    raise ValueError(f"unknown alternative id {alt_id!r} (expected A1, A2, A3 or A4)")


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScenarioSpec:
    """Everything needed to draw one sample: X_i = sigma(i/n)*Y_i + mu(i/n)."""

    noise: NoiseSpec
    mean: MeanFn
    variance: VarianceFn
    n: int
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")


def generate_noise(spec: NoiseSpec, n: int, seed: int) -> TimeSeries:
    """Length-``n`` standardized realization of the noise process."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    rng = np.random.default_rng(seed)
    return TimeSeries(spec.simulate(rng, n), name=spec.label())


def generate_sample(spec: ScenarioSpec) -> TimeSeries:
    """One sample from the scenario; deterministic given the seed."""
    y = generate_noise(spec.noise, spec.n, spec.seed).values
    grid = np.arange(1, spec.n + 1) / spec.n
    x = spec.variance.sigma_at(grid) * y + spec.mean.evaluate(grid)
    return TimeSeries(x, name=spec.noise.label())


# ---------------------------------------------------------------------------
# Dict (de)serialization for config files
# ---------------------------------------------------------------------------

_NOISE_KINDS = {
    "iid_normal": IidNormal,
    "iid_exponential_centered": CenteredExponential,
    "ar1": Ar1,
    "arma22": Arma22,
    "garch11": Garch11,
}

_MEAN_KINDS = {
    "zero": ZeroMean,
    "linear": LinearMean,
    "sine": SineMean,
    "step": StepMean,
    "piecewise_linear": PiecewiseLinearMean,
}

_VARIANCE_KINDS = {
    "constant": ConstantVariance,
    "piecewise": PiecewiseVariance,
    "sine_modulated": SineVariance,
}


def _from_dict(d: dict, kinds: dict, what: str):
    if not isinstance(d, dict) or "kind" not in d:
        raise ValueError(f"{what} spec must be an object with a 'kind' key")
    kind = d["kind"]
    cls = kinds.get(kind)
    if cls is None:
        raise ValueError(f"unknown {what} kind {kind!r} (expected one of {sorted(kinds)})")
    kwargs = {k: v for k, v in d.items() if k != "kind"}
    for key in ("xs", "ys", "levels", "breakpoints"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {what} kind {kind!r}: {exc}") from None


def _to_dict(obj) -> dict:
    d = {"kind": obj.kind}
    for name in getattr(obj, "__dataclass_fields__", {}):
        value = getattr(obj, name)
        if isinstance(value, tuple):
            value = list(value)
        d[name] = value
    return d


def noise_from_dict(d: dict) -> NoiseSpec:
    return _from_dict(d, _NOISE_KINDS, "noise")


def noise_to_dict(spec: NoiseSpec) -> dict:
    return _to_dict(spec)


def mean_from_dict(d: dict) -> MeanFn:
    return _from_dict(d, _MEAN_KINDS, "mean")


def mean_to_dict(fn: MeanFn) -> dict:
    return _to_dict(fn)


def variance_from_dict(d: dict, n: int | None = None) -> VarianceFn:
    """Parse a variance spec; ``{"kind": "alternative", "id": "A1"}`` needs ``n``."""
    if isinstance(d, dict) and d.get("kind") == "alternative":
        if n is None:
            raise ValueError("alternative variance spec needs the sample length n")
        return make_alternative(d.get("id", ""), n, n_ref=int(d.get("n_ref", 2000)))
    return _from_dict(d, _VARIANCE_KINDS, "variance")


def variance_to_dict(fn: VarianceFn) -> dict:
    return _to_dict(fn)


def scenario_from_dict(d: dict) -> ScenarioSpec:
    for key in ("noise", "n", "seed"):
        if key not in d:
            raise ValueError(f"scenario config missing required key {key!r}")
    n = int(d["n"])
    return ScenarioSpec(
        noise=noise_from_dict(d["noise"]),
        mean=mean_from_dict(d.get("mean", {"kind": "zero"})),
        variance=variance_from_dict(d.get("variance", {"kind": "constant", "sigma": 1.0}), n=n),
        n=n,
        seed=int(d["seed"]),
    )


def scenario_to_dict(spec: ScenarioSpec) -> dict:
    return {
        "noise": noise_to_dict(spec.noise),
        "mean": mean_to_dict(spec.mean),
        "variance": variance_to_dict(spec.variance),
        "n": spec.n,
        "seed": spec.seed,
    }
