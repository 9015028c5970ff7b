from __future__ import annotations

import math
from collections.abc import Sequence

import chz
import numpy as np
from scipy import stats

from meshwave.errors import (
    AllZero,
    BadWeights,
    EmptyInput,
    NothingSent,
    OutOfRange,
    TooFewSamples,
    ZeroBase,
    ZeroMax,
)

WEIGHT_TOLERANCE = 1e-9

# two-sided 95% Student t quantiles, df 1..30
_T_975 = (
    12.71, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
    2.201, 2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
    2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
)  # fmt: skip
_Z_975 = 1.96


@chz.chz
class KpiParams:
    l_max_ms: float = chz.field(
        default=200.0, validator=chz.validators.gt(0), doc="L_max of the CQS latency term."
    )
    theta_max_mbps: float = chz.field(
        default=50.0, validator=chz.validators.gt(0), doc="Theta_max of the CQS throughput term."
    )
    t_norm_s: float = chz.field(
        default=20.0, validator=chz.validators.gt(0), doc="Divides mean T_rec inside GPL."
    )
    cost_efficiency: float = chz.field(
        default=0.8, doc="C_eff component of GPI; a configured scalar in [0, 1]."
    )
    coverage_requirement: float = chz.field(
        default=100.0, validator=chz.validators.gt(0), doc="Percent of users that must be served."
    )
    peak_window: tuple[float, float] = chz.field(
        default=(64800.0, 79200.0), doc="[start, end) seconds over which peak B_eff is averaged."
    )
    latency_percentile: float = 0.95
    congestion_percentile: float = chz.field(
        default=0.99, doc="rho_u is this percentile of the per-step unicast utilisation."
    )

    @chz.validate
    def _ranges(self) -> None:
        if not 0 <= self.cost_efficiency <= 1:
            raise ValueError(f"cost_efficiency must be in [0, 1], got {self.cost_efficiency}")
        if self.peak_window[1] <= self.peak_window[0]:
            raise ValueError(f"peak_window must be a non-empty interval, got {self.peak_window}")
        for p in (self.latency_percentile, self.congestion_percentile):
            if not 0 <= p <= 1:
                raise ValueError(f"percentiles must be in [0, 1], got {p}")


@chz.chz
class KpiSnapshot:
    latency_mean: float
    latency_p95: float
    throughput: float
    loss: float
    jain: float | None
    cqs: float
    rho_u: float
    delta_r: float
    t_rec_mean: float | None = None
    t_rec_single: float | None = None
    t_rec_multi: float | None = None
    gpl: float = 0.0
    gpi: float = 0.0
    beff_mean: float = 0.0
    beff_peak: float = 0.0
    control_overhead: float = 0.0
    broadcast_rate: float | None = None


# KPI name -> True when a lower value is better
KPI_DIRECTIONS: dict[str, bool] = {
    "latency_mean": True,
    "latency_p95": True,
    "throughput": False,
    "loss": True,
    "jain": False,
    "cqs": False,
    "rho_u": True,
    "delta_r": True,
    "t_rec_mean": True,
    "t_rec_single": True,
    "t_rec_multi": True,
    "gpl": True,
    "gpi": False,
    "beff_mean": False,
    "beff_peak": False,
    "control_overhead": True,
    "broadcast_rate": False,
}


@chz.chz
class ConfidenceInterval:
    mean: float
    half_width: float = chz.field(validator=chz.validators.ge(0))
    level: float = 0.95
    n: int = chz.field(default=2, validator=chz.validators.ge(2))

    @property
    def low(self) -> float:
        return self.mean - self.half_width

    @property
    def high(self) -> float:
        return self.mean + self.half_width


def jain_index(throughputs: Sequence[float]) -> float:
    x = np.asarray(throughputs, dtype=float)
    if x.size == 0:
        raise EmptyInput("jain index needs at least one throughput")
    squares = float(np.sum(x * x))
    if squares == 0:
        raise AllZero("jain index is undefined when every throughput is zero")
    return float(np.sum(x)) ** 2 / (x.size * squares)


def percentile(samples: Sequence[float], p: float) -> float:
    """Nearest-rank percentile: the sorted sample at rank ``ceil(p * n)``."""
    if len(samples) == 0:
        raise EmptyInput("percentile of an empty sample")
    if not 0 <= p <= 1:
        raise OutOfRange(f"percentile must be in [0, 1], got {p}")
    ordered = np.sort(np.asarray(samples, dtype=float))
    rank = max(math.ceil(p * ordered.size), 1)
    return float(ordered[rank - 1])


def loss_rate(lost: float, sent: float) -> float:
    if sent <= 0:
        raise NothingSent("loss rate is undefined when nothing was sent")
    if not 0 <= lost <= sent:
        raise OutOfRange(f"lost must lie in [0, sent], got {lost} of {sent}")
    return lost / sent


def cqs(
    latency: float,
    l_max: float,
    throughput: float,
    theta_max: float,
    jain: float,
    weights: Sequence[float],
) -> float:
    """Composite quality score; latency and throughput are clamped to [0, max] first."""
    if l_max <= 0 or theta_max <= 0:
        raise ZeroMax(f"maxima must be positive, got L_max={l_max}, Theta_max={theta_max}")
    eta1, eta2, eta3 = weights
    latency_term = 1.0 - min(max(latency, 0.0), l_max) / l_max
    throughput_term = min(max(throughput, 0.0), theta_max) / theta_max
    return eta1 * latency_term + eta2 * throughput_term + eta3 * jain


def gpl(rho_u: float, delta_r: float, t_rec_norm: float, weights: Sequence[float]) -> float:
    w1, w2, w3 = weights
    return w1 * rho_u + w2 * delta_r + w3 * t_rec_norm


def gpi(qos: float, r_cov: float, c_eff: float, weights: Sequence[float]) -> float:
    if abs(sum(weights) - 1.0) > WEIGHT_TOLERANCE:
        raise BadWeights(f"gpi weights must sum to 1, got {sum(weights)}")
    a1, a2, a3 = weights
    return a1 * qos + a2 * r_cov + a3 * c_eff


def relative_change(base: float, new: float) -> float:
    """Reduction form ``(base - new) / base``; positive when a cost went down."""
    if base == 0:
        raise ZeroBase("relative change against a zero base")
    return (base - new) / base


def relative_gain(base: float, new: float) -> float:
    """Gain form ``(new - base) / base``; positive when a benefit went up."""
    if base == 0:
        raise ZeroBase("relative change against a zero base")
    return (new - base) / base


def t_quantile(level: float, df: int) -> float:
    if level == 0.95:
        return _T_975[df - 1] if df <= len(_T_975) else _Z_975
    return float(stats.t.ppf((1.0 + level) / 2.0, df))


def confidence_interval(samples: Sequence[float], level: float = 0.95) -> ConfidenceInterval:
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise TooFewSamples(f"a confidence interval needs at least 2 samples, got {x.size}")
    if not 0 < level < 1:
        raise OutOfRange(f"confidence level must be in (0, 1), got {level}")
    s = 0.0 if np.all(x == x[0]) else float(np.std(x, ddof=1))
    half_width = t_quantile(level, x.size - 1) * s / math.sqrt(x.size)
    return ConfidenceInterval(mean=float(np.mean(x)), half_width=half_width, level=level, n=x.size)
