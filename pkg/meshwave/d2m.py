from __future__ import annotations

import logging

import chz
import numpy as np

from meshwave.curves import PiecewiseLinear
from meshwave.errors import NoViewers, OutOfRange, ZeroTotalLoad

logger = logging.getLogger(__name__)

ALPHA_LIMIT = 0.2
ALPHA_STEP = 0.01
ALPHA_FLOOR = 0.02
ALPHA_CEILING = 0.16
STEEP_ELASTICITY = 0.5

DEFAULT_BEFF_ANCHORS = (
    (0.0, 0.0),
    (0.08, 0.25),
    (0.12, 0.40),
    (0.16, 0.42),
    (0.20, 0.43),
)


def _alpha_in_range(self: object, attr: str) -> None:
    value = getattr(self, attr)
    if not 0 <= value < ALPHA_LIMIT:
        raise ValueError(f"Expected {attr} to be in [0, {ALPHA_LIMIT}), got {value}")


@chz.chz
class BeffCurve(PiecewiseLinear):
    """Offloading efficiency as a function of the D2M spectrum share.

    Concavity is required over the measured anchors only; the segment leaving the (0, 0)
    origin is allowed to be flatter than the next one.
    """

    anchors: tuple[tuple[float, float], ...] = DEFAULT_BEFF_ANCHORS

    @chz.validate
    def _fractions(self) -> None:
        if any(not 0 <= b <= 1 for _, b in self.anchors):
            raise ValueError("B_eff anchors must lie in [0, 1]")
        if not self.is_monotone():
            raise ValueError("B_eff curve must be non-decreasing")
        if not self.is_concave(start=1 if self.anchors[0] == (0.0, 0.0) else 0):
            raise ValueError("B_eff curve must be concave over its measured anchors")


@chz.chz
class SpectrumPlan:
    s_total: float = chz.field(default=100.0, validator=chz.validators.gt(0), doc="MHz")
    alpha_s: float = chz.field(default=0.12, validator=_alpha_in_range, doc="D2M share")
    eta_d2m: float = chz.field(
        default=2.1, validator=chz.validators.gt(0), doc="Spectral efficiency, bit/s/Hz."
    )
    broadcast_bitrate: float = chz.field(
        default=25.0, validator=chz.validators.ge(0), doc="B, Mbps of one broadcast stream."
    )
    gamma_th: float = chz.field(
        default=4.0, validator=chz.validators.gt(0), doc="Linear SINR needed to decode."
    )
    p_d2m: float = chz.field(default=4.0, validator=chz.validators.ge(0), doc="mW at receiver")
    n0: float = chz.field(default=0.07, validator=chz.validators.gt(0), doc="mW noise floor")
    i_unic_coeff: float = chz.field(
        default=0.01, validator=chz.validators.ge(0), doc="mW of interference per unicast MHz."
    )
    beff_curve: BeffCurve = chz.field(default_factory=BeffCurve)
    adaptive: bool = chz.field(default=False, doc="Step alpha_s with adaptive_alpha during runs.")
    adapt_interval: float = chz.field(default=300.0, validator=chz.validators.gt(0))


def split_spectrum(plan: SpectrumPlan) -> tuple[float, float]:
    s_d2m = plan.alpha_s * plan.s_total
    return s_d2m, plan.s_total - s_d2m


def d2m_capacity(s_d2m: float, eta: float) -> float:
    """Broadcast capacity in Mbps; MHz times bit/s/Hz."""
    return s_d2m * eta


def per_user_broadcast_rate(bitrate: float, viewers: int) -> float:
    """Unicast bandwidth one broadcast stream saves per viewer it serves."""
    if viewers < 1:
        raise NoViewers("broadcast has no viewers")
    return bitrate / viewers


def carried_broadcast(c_d2m, eligible_demand):
    return np.minimum(c_d2m, eligible_demand)


def offload_efficiency(c_d2m, eligible_demand, total_load):
    """Share of the offered load the broadcast carries, clipped to [0, 1]; scalars or arrays."""
    total = np.asarray(total_load, dtype=float)
    if np.any(total <= 0):
        raise ZeroTotalLoad(f"total offered load must be positive, got {total.min()}")
    efficiency = np.clip(carried_broadcast(c_d2m, eligible_demand) / total, 0.0, 1.0)
    return float(efficiency) if efficiency.ndim == 0 else efficiency


def sinr(plan: SpectrumPlan, s_unic: float | None = None) -> tuple[float, bool]:
    """Broadcast SINR against unicast interference, and whether it clears ``gamma_th``."""
    if s_unic is None:
        _, s_unic = split_spectrum(plan)
    ratio = plan.p_d2m / (plan.i_unic_coeff * s_unic + plan.n0)
    return ratio, ratio >= plan.gamma_th


def beff_lookup(curve: BeffCurve, alpha_s: float) -> float:
    return curve(alpha_s)


def beff_slope(curve: BeffCurve, alpha_s: float) -> float:
    return curve.forward_slope(alpha_s)


def _elasticity(curve: BeffCurve, alpha_s: float, measured_beff: float) -> float:
    if measured_beff <= 0:
        return 1.0
    return beff_slope(curve, alpha_s) * alpha_s / measured_beff


def adaptive_alpha(
    current: float,
    measured_beff: float,
    unicast_qos_ok: bool,
    decodable: bool,
    *,
    curve: BeffCurve | None = None,
) -> float:
    """One step of the rule-based spectrum controller.

    Backs off when unicast QoS or broadcast decoding fails, grows while the curve is still in its
    steep region, and otherwise holds.
    """
    if not 0 <= current < ALPHA_LIMIT:
        raise OutOfRange(f"alpha_s must be in [0, {ALPHA_LIMIT}), got {current}")
    curve = curve if curve is not None else BeffCurve()
    if not unicast_qos_ok or not decodable:
        nxt = current - ALPHA_STEP
    elif _elasticity(curve, current, measured_beff) >= STEEP_ELASTICITY:
        nxt = current + ALPHA_STEP
    else:
        nxt = current
    nxt = round(min(max(nxt, ALPHA_FLOOR), ALPHA_CEILING), 2)
    if nxt != current:
        logger.debug("alpha_s %.2f -> %.2f (B_eff %.3f)", current, nxt, measured_beff)
    return nxt
