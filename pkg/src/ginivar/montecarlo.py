"""Monte Carlo harness: empirical size, power, and long-run variance quality.

Replication ``i`` of an experiment uses the derived seed
``base_seed + i`` (size-corrected calibration runs use the disjoint range
``base_seed + M + i``), so results are reproducible and independent of the
worker count.  Error-bearing replications are never dropped silently: the
continuous data-generating processes here cannot produce degenerate
blocks, so any occurrence aborts the run with a diagnostic.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from statistics import NormalDist

import numpy as np

from . import lrv
from .dgp import (
    Ar1,
    Arma22,
    CenteredExponential,
    ConstantVariance,
    Garch11,
    IidNormal,
    MeanFn,
    NoiseSpec,
    ScenarioSpec,
    VarianceFn,
    generate_noise,
    generate_sample,
    make_alternative,
    mean_from_dict,
    mean_to_dict,
    noise_from_dict,
    noise_to_dict,
    variance_from_dict,
    variance_to_dict,
)
from .errors import EstimationError
from .series import TimeSeries, difference
from .vartest import GINI_LIMIT_SD, run_test

__all__ = [
    "STANDARD_NOISES",
    "ExperimentSpec",
    "ExperimentReport",
    "squared_lrv_reference",
    "collect_t_ratios",
    "run_size",
    "run_power",
    "run_lrv_quality",
    "run_experiment",
    "experiment_from_dict",
    "experiment_to_dict",
    "format_table",
]

MODES = ("size", "power_nominal", "power_size_corrected", "lrv_quality")

# The six benchmark noise processes used throughout the result tables.
STANDARD_NOISES: dict[str, NoiseSpec] = {
    "normal": IidNormal(),
    "exp": CenteredExponential(),
    "ar1_04": Ar1(0.4),
    "ar1_07": Ar1(0.7),
    "arma22": Arma22(0.8, -0.4, 0.5, 0.34),
    "garch11": Garch11(0.1, 0.1, 0.8),
}


@dataclass(frozen=True)
class ExperimentSpec:
    """One Monte Carlo cell.

    ``difference`` applies a first difference to every generated sample
    (the generator draws n+1 points so the tested length stays n); it is
    the standard treatment when the mean has jumps.
    """

    noise: NoiseSpec
    mean: MeanFn
    n: int
    replications: int
    mode: str
    base_seed: int
    alpha: float = 0.05
    s: float = 0.7
    q: float = 0.5
    alternative: str | None = None
    variance: VarianceFn | None = None
    difference: bool = False
    n_ref: int = 2000

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r} (expected one of {MODES})")
        if self.replications < 100:
            raise ValueError(
                f"need at least 100 replications for a reported rate, got {self.replications}"
            )
        if self.mode.startswith("power") and self.alternative is None and self.variance is None:
            raise ValueError("power modes need an alternative id or an explicit variance")
        if self.mode in ("size", "lrv_quality") and self.variance is not None:
            if not isinstance(self.variance, ConstantVariance):
                raise ValueError(f"{self.mode} mode requires a constant variance function")

    def resolved_variance(self) -> VarianceFn:
        if self.variance is not None:
            return self.variance
        if self.alternative is not None:
            return make_alternative(self.alternative, self.n, n_ref=self.n_ref)
        return ConstantVariance(1.0)


@dataclass(frozen=True)
class ExperimentReport:
    mode: str
    dgp: str
    n: int
    replications: int
    alpha: float
    s: float
    q: float
    base_seed: int
    alternative: str | None
    mean: str
    differenced: bool
    rejection_rate: float | None = None
    mc_stderr: float | None = None
    nominal_rate: float | None = None
    critical_value: float | None = None
    bias: float | None = None
    rmse: float | None = None
    error_count: int = 0
    wall_time: float = 0.0


# ---------------------------------------------------------------------------
# Standardization constants for the squared process
# ---------------------------------------------------------------------------

_PILOT_LEN = 10_000_000
_PILOT_BATCH = 10_000
_PILOT_SEED = 905_114_329
_reference_cache: dict[tuple, float] = {}


def _batch_means_lrv_sd(v: np.ndarray, batch: int) -> float:
    nb = v.size // batch
    means = v[: nb * batch].reshape(nb, batch).mean(axis=1)
    return math.sqrt(batch * float(np.var(means)))


def squared_lrv_reference(noise: NoiseSpec, differenced: bool = False) -> float:
    """Long-run sd of the squared noise process (differenced first if asked).

    Exact by moment calculations for the iid families; estimated once per
    parameter set by a long batch-means pilot for the dependent ones.

    For iid N(0,1): Var(Y^2) = 2.  After differencing, D = Y_1 - Y_0 has
    Var(D^2) = E D^4 - 4 = 12 - 4 = 8 and Cov(D_1^2, D_2^2) = 6 - 4 = 2,
    so the long-run variance is 8 + 2*2 = 12.  For centered Exp(1) with
    moments E E^k = k!: Var((E-1)^2) = 9 - 1 = 8; after differencing,
    Var(D^2) = 24 - 4 = 20 and Cov(D_1^2, D_2^2) = 12 - 4 = 8, giving
    20 + 2*8 = 36.
    """
    if isinstance(noise, IidNormal):
        return math.sqrt(12.0) if differenced else math.sqrt(2.0)
    if isinstance(noise, CenteredExponential):
        return 6.0 if differenced else math.sqrt(8.0)
    key = (noise.kind, tuple(sorted(noise.__dict__.items())), differenced)
    value = _reference_cache.get(key)
    if value is None:
        y = generate_noise(noise, _PILOT_LEN + 1, _PILOT_SEED).values
        v = np.diff(y) ** 2 if differenced else y[1:] ** 2
        value = _batch_means_lrv_sd(v, _PILOT_BATCH)
        _reference_cache[key] = value
    return value


# ---------------------------------------------------------------------------
# Replication workers
# ---------------------------------------------------------------------------

def _draw_sample(spec: ExperimentSpec, seed: int) -> TimeSeries:
    n_gen = spec.n + 1 if spec.difference else spec.n
    scenario = ScenarioSpec(
        noise=spec.noise,
        mean=spec.mean,
        variance=spec.resolved_variance(),
        n=n_gen,
        seed=seed,
    )
    x = generate_sample(scenario)
    return difference(x) if spec.difference else x


def _t_ratio_chunk(spec: ExperimentSpec, lo: int, hi: int) -> np.ndarray:
    """Standardized statistics T/psi for replications lo..hi-1; NaN on failure."""
    out = np.empty(hi - lo)
    for i in range(lo, hi):
        x = _draw_sample(spec, spec.base_seed + i)
        try:
            result = run_test(x, s=spec.s, q=spec.q, alpha=spec.alpha)
            out[i - lo] = result.t_stat / GINI_LIMIT_SD
        except EstimationError:
            out[i - lo] = np.nan
    return out


def _lrv_chunk(spec: ExperimentSpec, lo: int, hi: int) -> np.ndarray:
    """Scale-bearing subsampling LRV estimates on standardized samples.

    The noise is pre-scaled so the squared (differenced) process has unit
    long-run variance; the raw (undivided) subsampling estimate then
    targets exactly 1, making bias and RMSE comparable across processes.
    """
    c = 1.0 / math.sqrt(squared_lrv_reference(spec.noise, spec.difference))
    grid_n = spec.n + 1 if spec.difference else spec.n
    grid = np.arange(1, grid_n + 1) / grid_n
    mu = spec.mean.evaluate(grid)
    out = np.empty(hi - lo)
    for i in range(lo, hi):
        y = generate_noise(spec.noise, grid_n, spec.base_seed + i).values
        x = TimeSeries(c * y + mu)
        if spec.difference:
            x = difference(x)
        try:
            out[i - lo] = lrv.estimate_kappa(x, s=spec.s, q=spec.q).raw_kappa
        except EstimationError:
            out[i - lo] = np.nan
    return out


def _run_chunks(worker, spec: ExperimentSpec, threads: int | None) -> np.ndarray:
    m = spec.replications
    if threads is None:
        threads = os.cpu_count() or 1
    if threads <= 1 or m < 200:
        return worker(spec, 0, m)
    bounds = np.linspace(0, m, threads * 4 + 1).astype(int)
    chunks = [(int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(worker, [spec] * len(chunks), *zip(*chunks)))
    return np.concatenate(parts)


def _check_errors(values: np.ndarray, spec: ExperimentSpec) -> None:
    bad = int(np.count_nonzero(np.isnan(values)))
    if bad:
        raise RuntimeError(
            f"{bad} of {spec.replications} replications failed (degenerate data); "
            "this should be impossible for continuous processes and indicates a bug"
        )


def collect_t_ratios(spec: ExperimentSpec, threads: int | None = 1) -> np.ndarray:
    """All per-replication standardized statistics T/psi for the cell."""
    values = _run_chunks(_t_ratio_chunk, spec, threads)
    _check_errors(values, spec)
    return values


# ---------------------------------------------------------------------------
# Experiment drivers
# ---------------------------------------------------------------------------

def _base_report(spec: ExperimentSpec, **extra) -> ExperimentReport:
    return ExperimentReport(
        mode=spec.mode,
        dgp=spec.noise.label(),
        n=spec.n,
        replications=spec.replications,
        alpha=spec.alpha,
        s=spec.s,
        q=spec.q,
        base_seed=spec.base_seed,
        alternative=spec.alternative,
        mean=spec.mean.kind,
        differenced=spec.difference,
        **extra,
    )


def _rate_and_stderr(values: np.ndarray, threshold: float) -> tuple[float, float]:
    rate = float(np.mean(values > threshold))
    return rate, math.sqrt(rate * (1.0 - rate) / values.size)


def run_size(spec: ExperimentSpec, threads: int | None = 1) -> ExperimentReport:
    """Empirical rejection rate under constant variance."""
    if spec.mode != "size":
        raise ValueError(f"run_size needs mode 'size', got {spec.mode!r}")
    start = time.perf_counter()
    t_ratios = collect_t_ratios(spec, threads)
    z = NormalDist().inv_cdf(1.0 - spec.alpha)
    rate, se = _rate_and_stderr(t_ratios, z)
    return _base_report(
        spec, rejection_rate=rate, mc_stderr=se, wall_time=time.perf_counter() - start
    )


def run_power(spec: ExperimentSpec, threads: int | None = 1) -> ExperimentReport:
    """Empirical power, either at the nominal level or size-corrected.

    Size correction replaces the asymptotic critical value by the
    empirical ``1 - alpha`` quantile of the statistic from a paired run
    under constant variance with the same process, length and replication
    count (seeds from the disjoint range ``base_seed + M ..``).
    """
    if spec.mode not in ("power_nominal", "power_size_corrected"):
        raise ValueError(f"run_power needs a power mode, got {spec.mode!r}")
    start = time.perf_counter()
    t_ratios = collect_t_ratios(spec, threads)
    z = NormalDist().inv_cdf(1.0 - spec.alpha)
    nominal_rate, nominal_se = _rate_and_stderr(t_ratios, z)
    if spec.mode == "power_nominal":
        return _base_report(
            spec,
            rejection_rate=nominal_rate,
            mc_stderr=nominal_se,
            nominal_rate=nominal_rate,
            wall_time=time.perf_counter() - start,
        )
    null_spec = replace(
        spec,
        mode="size",
        alternative=None,
        variance=ConstantVariance(1.0),
        base_seed=spec.base_seed + spec.replications,
    )
    null_t = collect_t_ratios(null_spec, threads)
    crit = float(np.quantile(null_t, 1.0 - spec.alpha))
    rate, se = _rate_and_stderr(t_ratios, crit)
    return _base_report(
        spec,
        rejection_rate=rate,
        mc_stderr=se,
        nominal_rate=nominal_rate,
        critical_value=crit,
        wall_time=time.perf_counter() - start,
    )


def run_lrv_quality(spec: ExperimentSpec, threads: int | None = 1) -> ExperimentReport:
    """Bias and RMSE of the subsampling long-run variance estimator.

    Samples are standardized so the squared (differenced, when asked)
    noise has unit long-run variance; deviations of the estimate from 1
    are then directly comparable across processes and mean functions.
    """
    if spec.mode != "lrv_quality":
        raise ValueError(f"run_lrv_quality needs mode 'lrv_quality', got {spec.mode!r}")
    start = time.perf_counter()
    values = _run_chunks(_lrv_chunk, spec, threads)
    _check_errors(values, spec)
    dev = values - 1.0
    return _base_report(
        spec,
        bias=float(np.mean(dev)),
        rmse=float(np.sqrt(np.mean(dev**2))),
        wall_time=time.perf_counter() - start,
    )


def run_experiment(spec: ExperimentSpec, threads: int | None = 1) -> ExperimentReport:
    """Dispatch on the spec's mode."""
    if spec.mode == "size":
        return run_size(spec, threads)
    if spec.mode in ("power_nominal", "power_size_corrected"):
        return run_power(spec, threads)
    return run_lrv_quality(spec, threads)


# ---------------------------------------------------------------------------
# Config (de)serialization and table formatting
# ---------------------------------------------------------------------------

def experiment_from_dict(d: dict) -> ExperimentSpec:
    for key in ("noise", "n", "replications", "mode", "base_seed"):
        if key not in d:
            raise ValueError(f"experiment config missing required key {key!r}")
    n = int(d["n"])
    variance = d.get("variance")
    return ExperimentSpec(
        noise=noise_from_dict(d["noise"]),
        mean=mean_from_dict(d.get("mean", {"kind": "zero"})),
        n=n,
        replications=int(d["replications"]),
        mode=str(d["mode"]),
        base_seed=int(d["base_seed"]),
        alpha=float(d.get("alpha", 0.05)),
        s=float(d.get("s", 0.7)),
        q=float(d.get("q", 0.5)),
        alternative=d.get("alternative"),
        variance=None if variance is None else variance_from_dict(variance, n=n),
        difference=bool(d.get("difference", False)),
        n_ref=int(d.get("n_ref", 2000)),
    )


def experiment_to_dict(spec: ExperimentSpec) -> dict:
    d = {
        "mode": spec.mode,
        "noise": noise_to_dict(spec.noise),
        "mean": mean_to_dict(spec.mean),
        "n": spec.n,
        "replications": spec.replications,
        "alpha": spec.alpha,
        "s": spec.s,
        "q": spec.q,
        "base_seed": spec.base_seed,
        "difference": spec.difference,
        "n_ref": spec.n_ref,
    }
    if spec.alternative is not None:
        d["alternative"] = spec.alternative
    if spec.variance is not None:
        d["variance"] = variance_to_dict(spec.variance)
    return d


def _row_key(r: ExperimentReport) -> tuple:
    return (r.mode, r.n, r.alternative or "-", r.mean, r.differenced)


def format_table(reports: list[ExperimentReport]) -> str:
    """Align cells as rows of (mode, n, alternative) against DGP columns."""
    dgps: list[str] = []
    for r in reports:
        if r.dgp not in dgps:
            dgps.append(r.dgp)
    rows: dict[tuple, dict[str, str]] = {}
    for r in reports:
        if r.mode == "lrv_quality":
            cell = f"{r.bias:+.4f}/{r.rmse:.4f}"
        else:
            cell = f"{r.rejection_rate:.3f}"
        rows.setdefault(_row_key(r), {})[r.dgp] = cell
    label = {
        "size": "size",
        "power_nominal": "power",
        "power_size_corrected": "power*",
        "lrv_quality": "bias/RMSE",
    }
    header = ["scenario".ljust(34)] + [d.rjust(16) for d in dgps]
    lines = ["".join(header)]
    for key in sorted(rows):
        mode, n, alt, mean, diffed = key
        desc = f"{label[mode]} n={n} alt={alt} mean={mean}" + (" diff" if diffed else "")
        cells = [rows[key].get(d, "-").rjust(16) for d in dgps]
        lines.append(desc.ljust(34) + "".join(cells))
    return "\n".join(lines)
