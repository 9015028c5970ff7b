"""
Subsidy, coverage, penetration, public-private investment and policy-score economics.

Money is in euros, coverage in percentage points, and RCG (rural coverage gain) in percentage points
unless a function says otherwise.
"""

from __future__ import annotations

import csv
import itertools
import logging
import math
from collections.abc import Sequence
from pathlib import Path
from typing import IO

import chz

from meshwave import serialise
from meshwave.curves import Curve
from meshwave.d2m import BeffCurve, SpectrumPlan, sinr
from meshwave.errors import (
    EmptyGrid,
    OutOfRange,
    ParseError,
    SubsidyExceedsCost,
    ValidationError,
    ZeroExpenditure,
    ZeroRequirement,
)

logger = logging.getLogger(__name__)

DEFAULT_RCG_ANCHORS = (
    (0.0, 0.0),
    (0.05, 15.0),
    (0.10, 28.0),
    (0.15, 30.0),
    (0.20, 30.5),
    (0.25, 30.7),
)
OBJECTIVES = ("nsb", "roi", "ps", "beff_yield")
DEFICIT_TOLERANCE = 0.02


def _non_negative(self: object, attr: str) -> None:
    value = getattr(self, attr)
    if value < 0:
        raise ValueError(f"Expected {attr} to be non-negative, got {value}")


def _rcg_curve() -> Curve:
    return Curve(anchors=DEFAULT_RCG_ANCHORS)


@chz.chz
class SubsidyModel:
    beta: float = chz.field(default=0.10, validator=_non_negative, doc="Subsidy rate.")
    c_node: float = chz.field(default=10000.0, validator=_non_negative, doc="Euro per node.")
    n_nodes: int = chz.field(default=100, validator=_non_negative)
    kappa: float = chz.field(
        default=0.028, validator=_non_negative, doc="Coverage points per euro of subsidy."
    )
    lambda_r: float = chz.field(
        default=5000.0, validator=_non_negative, doc="Euro of social benefit per RCG point."
    )
    rcg_curve: Curve = chz.field(default_factory=_rcg_curve, doc="RCG points against beta.")
    observed_rcg: tuple[tuple[float, float], ...] = chz.field(
        default=((0.05, 15.0), (0.10, 28.0), (0.20, 30.0)),
        doc="Measured (beta, RCG points) pairs, preferred over the curve at exactly these rates.",
    )
    delta_r_pre: float = 0.64
    r_cov_pre: float = chz.field(default=36.0, validator=_non_negative, doc="Percent.")
    c_req: float = chz.field(default=100.0, doc="Required coverage, percent.")

    @chz.validate
    def _curve_shape(self) -> None:
        if not self.rcg_curve.is_monotone():
            raise ValueError("rcg_curve must be non-decreasing")
        if not self.rcg_curve.is_concave():
            raise ValueError("rcg_curve must be concave")
        if not 0 <= self.delta_r_pre <= 1:
            raise ValueError(f"delta_r_pre must be in [0, 1], got {self.delta_r_pre}")


@chz.chz
class PenetrationModel:
    p0: float = chz.field(default=0.10, doc="Device penetration at t = 0.")
    gamma: float = chz.field(default=0.208, validator=_non_negative, doc="Growth per year.")
    mandate: bool = chz.field(default=False, doc="A device mandate doubles the growth rate.")

    @chz.validate
    def _p0_fraction(self) -> None:
        if not 0 < self.p0 <= 1:
            raise ValueError(f"p0 must be in (0, 1], got {self.p0}")


@chz.chz
class PppModel:
    i_gov: float = chz.field(default=10_000_000.0, validator=_non_negative, doc="Public euro.")
    m_f: float = chz.field(default=1.2, validator=chz.validators.gt(0), doc="Multiplier.")
    m_f_band: tuple[float, float] = chz.field(
        default=(0.8, 1.2), doc="Empirical multiplier band; its maximum normalises M_f."
    )

    @chz.validate
    def _band(self) -> None:
        low, high = self.m_f_band
        if not 0 < low <= high:
            raise ValueError(f"m_f_band must satisfy 0 < low <= high, got {self.m_f_band}")


def subsidy_per_node(beta: float, c_node: float) -> float:
    """I_f, the subsidy paid per deployed node."""
    return beta * c_node


def subsidy_per_deficit(beta: float, delta_r: float) -> float:
    """The non-dimensional ``beta * delta_r`` form of the per-node subsidy."""
    return beta * delta_r


def effective_node_cost(c_node: float, i_f: float) -> float:
    if i_f > c_node:
        raise SubsidyExceedsCost(f"subsidy {i_f} exceeds node cost {c_node}")
    return c_node - i_f


def rcg_of_beta(model: SubsidyModel, beta: float) -> float:
    return model.rcg_curve(beta)


def observed_or_curve_rcg(model: SubsidyModel, beta: float) -> float:
    for rate, rcg in model.observed_rcg:
        if math.isclose(rate, beta, rel_tol=0.0, abs_tol=1e-12):
            return rcg
    return rcg_of_beta(model, beta)


def relative_rcg(r_pre: float, r_post: float) -> float:
    if r_pre == 0:
        raise ZeroRequirement("relative coverage gain needs a non-zero starting coverage")
    return (r_post - r_pre) / r_pre


def coverage_post(r_cov_pre: float, kappa: float, i_f: float) -> float:
    return min(r_cov_pre + kappa * i_f, 100.0)


def coverage_deficit(c_r: float, c_req: float) -> float:
    if c_req <= 0:
        raise ZeroRequirement(f"required coverage must be positive, got {c_req}")
    return min(max(1.0 - c_r / c_req, 0.0), 1.0)


def post_deficit_eq(delta_pre: float, beta: float, rcg: float) -> float:
    """``delta_pre - beta * rcg`` clamped to [0, 1], with ``rcg`` as a fraction."""
    return min(max(delta_pre - beta * rcg, 0.0), 1.0)


@chz.chz
class CostBenefit:
    e_gov: float
    seb: float
    nsb: float
    roi: float | None = chz.field(doc="NSB / E_gov; undefined without expenditure.")


def cost_benefit(model: SubsidyModel, beta: float | None = None) -> CostBenefit:
    """Government expenditure, social benefit, net benefit and return at one subsidy rate.

    ROI is ``None`` when nothing is spent; ``roi_of`` raises instead.
    """
    beta = model.beta if beta is None else beta
    e_gov = model.n_nodes * subsidy_per_node(beta, model.c_node)
    seb = model.lambda_r * observed_or_curve_rcg(model, beta)
    nsb = seb - e_gov
    return CostBenefit(e_gov=e_gov, seb=seb, nsb=nsb, roi=nsb / e_gov if e_gov else None)


def roi_of(result: CostBenefit) -> float:
    if result.roi is None:
        raise ZeroExpenditure("ROI is undefined when government expenditure is zero")
    return result.roi


def rcg_sensitivity(kappa: float, delta_r: float) -> float:
    """Analytic dRCG/dbeta."""
    return kappa * delta_r


def rcg_slope(model: SubsidyModel, beta: float) -> float:
    """Numerical dRCG/dbeta of the sensitivity curve, forward segment at ``beta``."""
    return model.rcg_curve.forward_slope(beta)


def penetration(model: PenetrationModel, t: float) -> float:
    if t < 0:
        raise OutOfRange(f"years must be non-negative, got {t}")
    growth = (2.0 if model.mandate else 1.0) * model.gamma
    return min(model.p0 * math.exp(growth * t), 1.0)


@chz.chz
class PppTotal:
    i_total: float
    private: float


def ppp_total(model: PppModel) -> PppTotal:
    i_total = model.i_gov * (1.0 + model.m_f)
    return PppTotal(i_total=i_total, private=model.i_gov * model.m_f)


def policy_score(
    theta: Sequence[float], b_eff: float, rcg_norm: float, p_d2m: float, m_f_norm: float
) -> float:
    t1, t2, t3, t4 = theta
    return t1 * b_eff + t2 * rcg_norm + t3 * p_d2m + t4 * m_f_norm


def self_consistent_rcg(model: SubsidyModel) -> float:
    """The RCG (as a fraction) that makes ``post_deficit_eq`` agree with the coverage identity."""
    if model.c_req <= 0:
        raise ZeroRequirement(f"required coverage must be positive, got {model.c_req}")
    return model.kappa * model.c_node / model.c_req


def subsidy_priority(delta_r: float, threshold: float = 0.4) -> bool:
    """Whether an area's deficit is large enough to target subsidies at it first."""
    return delta_r > threshold


@chz.chz
class DeficitReport:
    beta: float
    equation: float = chz.field(doc="delta_pre - beta * RCG.")
    coverage: float = chz.field(doc="1 - R_cov_post / C_req.")
    reference: float | None = None

    @property
    def consistent(self) -> bool:
        return abs(self.equation - self.coverage) <= DEFICIT_TOLERANCE


def deficit_report(
    model: SubsidyModel, beta: float, *, rcg: float | None = None, reference: float | None = None
) -> DeficitReport:
    """Both ways of computing the post-subsidy deficit at one rate.

    ``rcg`` is a fraction and defaults to the observed or curve RCG divided by 100.
    """
    rcg = observed_or_curve_rcg(model, beta) / 100.0 if rcg is None else rcg
    i_f = subsidy_per_node(beta, model.c_node)
    report = DeficitReport(
        beta=beta,
        equation=post_deficit_eq(model.delta_r_pre, beta, rcg),
        coverage=coverage_deficit(coverage_post(model.r_cov_pre, model.kappa, i_f), model.c_req),
        reference=reference,
    )
    if not report.consistent:
        logger.warning(
            "Deficit at beta=%.2f: equation gives %.3f, coverage identity gives %.3f",
            beta,
            report.equation,
            report.coverage,
        )
    return report


@chz.chz
class ReferenceRow:
    """One subsidy level as printed in the published tables; ROI as a fraction."""

    beta: float
    i_f: float
    rcg: float
    e_gov: float
    seb: float
    nsb: float
    roi: float
    final_delta_r: float


@chz.chz
class SweepGrid:
    beta: tuple[float, ...] = (0.05, 0.10, 0.20)
    alpha_s: tuple[float, ...] = (0.12,)
    mandate: tuple[bool, ...] = (True,)
    m_f: tuple[float, ...] = (1.2,)
    theta: tuple[tuple[float, float, float, float], ...] = ((0.25, 0.25, 0.25, 0.25),)

    def __len__(self) -> int:
        return (
            len(self.beta) * len(self.alpha_s) * len(self.mandate) * len(self.m_f) * len(self.theta)
        )


@chz.chz
class PolicyInputs:
    subsidy: SubsidyModel = chz.field(default_factory=SubsidyModel)
    penetration: PenetrationModel = chz.field(default_factory=PenetrationModel)
    ppp: PppModel = chz.field(default_factory=PppModel)
    beff_curve: BeffCurve = chz.field(default_factory=BeffCurve)
    spectrum: SpectrumPlan = chz.field(
        default_factory=SpectrumPlan, doc="SINR parameters that decide whether a share decodes."
    )
    horizon_years: float = chz.field(default=5.0, validator=_non_negative)
    penetration_target: float = chz.field(
        default=0.80, doc="Quoted with-mandate penetration at the horizon."
    )
    no_mandate_band: tuple[float, float] = chz.field(
        default=(0.40, 0.50), doc="Quoted without-mandate penetration band at the horizon."
    )
    grid: SweepGrid = chz.field(default_factory=SweepGrid)
    reference: tuple[ReferenceRow, ...] = ()
    description: str = ""
    notes: tuple[str, ...] = ()


def load_policy_inputs(path: str | Path) -> PolicyInputs:
    try:
        return serialise.structure(PolicyInputs, serialise.read_json(path))
    except ParseError as e:
        raise ParseError(f"{path}: {e}") from None
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{path}: {e}") from None


def _mismatch(label: str, printed: float, computed: float, tolerance: float) -> str | None:
    if abs(printed - computed) <= tolerance:
        return None
    return f"{label}: printed {printed:g}, computed {computed:g}"


def reference_discrepancies(inputs: PolicyInputs) -> list[str]:
    """Every printed reference value the forward model does not reproduce."""
    model = inputs.subsidy
    notes = []
    for row in inputs.reference:
        result = cost_benefit(model, row.beta)
        deficit = deficit_report(model, row.beta, reference=row.final_delta_r)
        prefix = f"beta={row.beta:g}"
        checks = [
            _mismatch(f"{prefix} I_f", row.i_f, subsidy_per_node(row.beta, model.c_node), 0.5),
            _mismatch(f"{prefix} RCG", row.rcg, observed_or_curve_rcg(model, row.beta), 0.05),
            _mismatch(f"{prefix} E_gov", row.e_gov, result.e_gov, 0.5),
            _mismatch(f"{prefix} SEB", row.seb, result.seb, 0.5),
            _mismatch(f"{prefix} NSB", row.nsb, result.nsb, 0.5),
            _mismatch(f"{prefix} ROI", row.roi, result.roi or 0.0, 0.005),
            _mismatch(f"{prefix} delta_r by equation", row.final_delta_r, deficit.equation, 0.005),
            _mismatch(f"{prefix} delta_r by coverage", row.final_delta_r, deficit.coverage, 0.005),
        ]
        notes.extend(c for c in checks if c is not None)

    horizon = inputs.horizon_years
    with_mandate = penetration(chz.replace(inputs.penetration, mandate=True), horizon)
    if with_mandate < inputs.penetration_target:
        notes.append(
            f"penetration with mandate at {horizon:g} years is {with_mandate:.3f}, "
            f"below the quoted {inputs.penetration_target:g}"
        )
    without = penetration(chz.replace(inputs.penetration, mandate=False), horizon)
    low, high = inputs.no_mandate_band
    if not low <= without <= high:
        notes.append(
            f"penetration without mandate at {horizon:g} years is {without:.3f}, "
            f"outside the quoted {low:g}-{high:g} band"
        )
    return notes


@chz.chz
class SweepRow:
    beta: float
    alpha_s: float
    mandate: bool
    m_f: float
    theta: tuple[float, float, float, float]
    i_f: float
    rcg: float
    coverage_post: float
    e_gov: float
    seb: float
    nsb: float
    roi: float | None
    beff: float
    beff_yield: float | None
    decodable: bool
    p_d2m: float
    ps: float
    argmax: bool = False

    def objective(self, name: str) -> float | None:
        return getattr(self, name)


SWEEP_COLUMNS = (
    "beta",
    "alpha_s",
    "mandate",
    "m_f",
    "theta",
    "i_f",
    "rcg",
    "coverage_post",
    "e_gov",
    "seb",
    "nsb",
    "roi",
    "beff",
    "beff_yield",
    "decodable",
    "p_d2m",
    "ps",
    "argmax",
)


def _sweep_row(
    inputs: PolicyInputs,
    beta: float,
    alpha_s: float,
    mandate: bool,
    m_f: float,
    theta: tuple[float, float, float, float],
) -> SweepRow:
    model = inputs.subsidy
    i_f = subsidy_per_node(beta, model.c_node)
    rcg = observed_or_curve_rcg(model, beta)
    result = cost_benefit(model, beta)
    beff = inputs.beff_curve(alpha_s)
    s_unic = inputs.spectrum.s_total * (1.0 - alpha_s)
    _, decodable = sinr(inputs.spectrum, s_unic=s_unic)
    p_d2m = penetration(chz.replace(inputs.penetration, mandate=mandate), inputs.horizon_years)
    rcg_max = model.rcg_curve.ys.max()
    ps = policy_score(
        theta,
        beff,
        rcg / rcg_max if rcg_max > 0 else 0.0,
        p_d2m,
        m_f / inputs.ppp.m_f_band[1],
    )
    return SweepRow(
        beta=beta,
        alpha_s=alpha_s,
        mandate=mandate,
        m_f=m_f,
        theta=theta,
        i_f=i_f,
        rcg=rcg,
        coverage_post=coverage_post(model.r_cov_pre, model.kappa, i_f),
        e_gov=result.e_gov,
        seb=result.seb,
        nsb=result.nsb,
        roi=result.roi,
        beff=beff,
        beff_yield=beff / alpha_s if alpha_s > 0 else None,
        decodable=decodable,
        p_d2m=p_d2m,
        ps=ps,
    )


def policy_sweep(
    inputs: PolicyInputs, grid: SweepGrid | None = None, *, objective: str = "nsb"
) -> list[SweepRow]:
    """Evaluates every grid point in grid order and flags the first row maximising ``objective``."""
    grid = grid if grid is not None else inputs.grid
    if objective not in OBJECTIVES:
        raise OutOfRange(f"unknown objective {objective!r}; choose from {OBJECTIVES}")
    if len(grid) == 0:
        raise EmptyGrid("sweep grid has an empty axis")

    rows = [
        _sweep_row(inputs, *point)
        for point in itertools.product(grid.beta, grid.alpha_s, grid.mandate, grid.m_f, grid.theta)
    ]
    best = None
    for i, row in enumerate(rows):
        value = row.objective(objective)
        if value is not None and (best is None or value > rows[best].objective(objective)):
            best = i
    if best is not None:
        rows[best] = chz.replace(rows[best], argmax=True)
        logger.info("Sweep of %d rows maximises %s at row %d", len(rows), objective, best)
    return rows


def _csv_value(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, tuple):
        return " ".join(_csv_value(v) for v in value)
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def write_sweep_csv(rows: Sequence[SweepRow], stream: IO[str]) -> None:
    writer = csv.DictWriter(stream, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: _csv_value(getattr(row, c)) for c in SWEEP_COLUMNS})
