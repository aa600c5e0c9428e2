"""End-to-end checks tying the critical exponents to box dimensions.

``verify_main`` compares ``s_inf`` of an interval partition with the gap exponents and the box
dimension of its end points. ``verify_hdim`` compares the critical exponent of a parabolic group
with its orbit-counting rate and the box dimension of a boundary orbit. Each check ends in a
:class:`~boundary_dimension.reports.Verdict`; finite-truncation limits give INCONCLUSIVE, never FAIL.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from boundary_dimension.boxdim import (
    BOURDON, SPHERICAL, DimensionEstimate, GapExponentEstimate, dyadic_deltas, endpoint_cloud,
    estimate_box_dimension, falconer_check, gap_exponent_bounds
)
from boundary_dimension.exceptions import SaturationError
from boundary_dimension.hyperbolic import BoundaryPoint, ParabolicGroupSpec, parabolic_orbit, parabolic_sandwich
from boundary_dimension.interval_partition import IntervalPartition, perturb_compactly
from boundary_dimension.poincare import counting_exponent, critical_exponent
from boundary_dimension.pressure import (
    BowenRootEstimate, CriticalExponentEstimate, bowen_root, find_s_infinity, pressure_linear
)
from boundary_dimension.reports import Verdict, overall_verdict


logger = logging.getLogger(__name__)


# L_upper - L_lower at or above this: the box dimension of the end points does not exist
NONEXISTENCE_GAP = 0.1
# At or below this the gap exponents agree and s_inf is compared with the box dimension itself
EXISTENCE_GAP = 0.02
# Largest share of the finest covering count the unresolved gap [0, a_M] may need
ACCUMULATION_SHARE = 0.1
AGREEMENT = 0.1


@dataclass(frozen=True)
class Assertion:
    name: str
    statement: str
    verdict: Verdict
    detail: Dict[str, Any] = field(default_factory=dict)

    def as_row(self) -> dict:
        return {'name': self.name, 'verdict': self.verdict.value, 'statement': self.statement}


def _check(name: str, statement: str, condition: bool, **detail) -> Assertion:
    return Assertion(name, statement, Verdict.PASS if condition else Verdict.FAIL, detail)


@dataclass
class VerificationReport:
    subject: str
    assertions: List[Assertion] = field(default_factory=list)
    results: Dict[str, Any] = field(default_factory=dict)
    informational: Dict[str, Any] = field(default_factory=dict)

    @property
    def verdict(self) -> Verdict:
        return overall_verdict(assertion.verdict for assertion in self.assertions)

    @property
    def failed(self) -> bool:
        return self.verdict == Verdict.FAIL

    def add(self, assertion: Assertion):
        logger.info(f'{self.subject}: {assertion.name} {assertion.verdict.value}')
        self.assertions.append(assertion)

    def as_dict(self) -> dict:
        return {
            'subject': self.subject,
            'verdict': self.verdict,
            'assertions': [
                {'name': a.name, 'statement': a.statement, 'verdict': a.verdict, 'detail': a.detail}
                for a in self.assertions
            ],
            'results': self.results,
            'informational': self.informational,
        }


def accumulation_gap_share(partition: IntervalPartition, estimate: DimensionEstimate) -> float:
    """Covering intervals the unresolved gap ``[0, a_M]`` needs at the finest delta, over the count there."""
    if not partition.unbounded:
        return 0.0
    finest = estimate.counts[-1]
    return float(partition.left.min()) / finest.delta / finest.count


def _box_estimate(partition: IntervalPartition, deltas, threads: int) -> Tuple[Optional[DimensionEstimate], str]:
    try:
        return estimate_box_dimension(endpoint_cloud(partition), deltas, threads=threads), ''
    except SaturationError as exc:
        return None, str(exc)


def _bowen_for(partition: IntervalPartition, threads: int) -> BowenRootEstimate:
    return bowen_root(lambda t: pressure_linear(partition, t, threads), (0.0, 2.0))


def verify_main(partition: IntervalPartition, tol: float = 1e-3, box_slack: float = 0.05,
                deltas: Optional[Sequence[float]] = None, log_n_max: float = 1e12,
                perturbation: Optional[Dict[str, Any]] = None, threads: int = 1) -> VerificationReport:
    """``L_lower <= s_inf <= L_upper``, ``s_inf <= upper box dim`` and, where it exists, ``s_inf = dim_B``."""
    deltas = dyadic_deltas(6, 18) if deltas is None else deltas
    report = VerificationReport(partition.generator)
    s_inf = find_s_infinity(partition, tol)
    gaps = gap_exponent_bounds(partition, log_n_max=log_n_max)
    report.results.update(s_infinity=s_inf, gap_exponents=_gap_summary(gaps))
    epsilon = s_inf.width + gaps.resolution + tol

    if s_inf.undetermined or not math.isfinite(s_inf.s_high):
        report.add(Assertion('s_inf_between_gap_exponents', 'L_lower - eps <= s_inf <= L_upper + eps',
                             Verdict.INCONCLUSIVE, {'note': s_inf.note}))
    else:
        report.add(_check('s_inf_between_gap_exponents', 'L_lower - eps <= s_inf <= L_upper + eps',
                          gaps.L_lower - epsilon <= s_inf.s_low and s_inf.s_high <= gaps.L_upper + epsilon,
                          eps=epsilon))

    estimate, saturation = _box_estimate(partition, deltas, threads)
    box_statements = (
        ('s_inf_below_upper_box_dimension', 's_inf <= upper box dim + eps'),
        ('s_inf_equals_box_dimension', 'lower box dim - eps <= s_inf <= upper box dim + eps'),
        ('falconer_bounds', 'L_lower <= lower box dim <= upper box dim <= L_upper'),
    )
    skip_reason = ''
    if gaps.gap >= NONEXISTENCE_GAP:
        skip_reason = f'L_upper - L_lower = {gaps.gap:.3f}: the box dimension does not exist'
    elif estimate is None:
        skip_reason = saturation
    else:
        share = accumulation_gap_share(partition, estimate)
        report.results['accumulation_gap_share'] = share
        if share > ACCUMULATION_SHARE:
            skip_reason = f'the gap [0, a_M] needs {share:.0%} of the finest covering count'

    if estimate is not None:
        report.results['box_dimension'] = _box_summary(estimate)
    if skip_reason:
        verdict = Verdict.SKIPPED if gaps.gap >= NONEXISTENCE_GAP else Verdict.INCONCLUSIVE
        for name, statement in box_statements:
            report.add(Assertion(name, statement, verdict, {'note': skip_reason}))
    else:
        slack = box_slack + epsilon
        report.add(_check(box_statements[0][0], box_statements[0][1], s_inf.s_low <= estimate.upper_dim + slack,
                          eps=slack))
        if gaps.gap <= EXISTENCE_GAP:
            report.add(_check(box_statements[1][0], box_statements[1][1],
                              estimate.lower_dim - slack <= s_inf.s_high and s_inf.s_low <= estimate.upper_dim + slack,
                              eps=slack))
        else:
            report.add(Assertion(box_statements[1][0], box_statements[1][1], Verdict.SKIPPED,
                                 {'note': f'gap exponents differ by {gaps.gap:.3f}'}))
        report.add(_check(box_statements[2][0], box_statements[2][1],
                          gaps.L_lower - slack <= estimate.lower_dim and estimate.upper_dim <= gaps.L_upper + slack,
                          eps=slack))
        falconer = falconer_check(estimate, gaps)
        report.informational['falconer_second_inequality'] = {
            'statement': 'lower (1 - upper) / (1 - lower) <= L_lower <= L_upper <= upper box dim',
            'holds': falconer.holds(slack), 'check': falconer,
        }

    root = _bowen_for(partition, threads)
    report.results['bowen_root'] = root
    if estimate is not None and root.bracketed:
        exists = estimate.upper_dim < root.low
        report.informational['maximal_dimension'] = {
            'upper_box_dimension': estimate.upper_dim, 'bowen_root': root.estimate,
            'verdict': 'a measure of maximal dimension exists' if exists else 'not decided by the box dimension',
        }
    if s_inf.classification is not None:
        report.informational['divergence_classification'] = s_inf.classification

    if perturbation:
        _check_perturbation(report, partition, s_inf, perturbation, tol)
    return report


def _check_perturbation(report: VerificationReport, partition: IntervalPartition,
                        s_inf: CriticalExponentEstimate, perturbation: Dict[str, Any], tol: float):
    perturbed = perturb_compactly(partition, perturbation['c'], perturbation['replacement'])
    other = find_s_infinity(perturbed, tol)
    report.results['perturbed_s_infinity'] = other
    slack = s_inf.width + other.width + tol
    report.add(_check('perturbation_keeps_s_inf', 's_inf(perturbed) = s_inf(original)',
                      abs(other.mid - s_inf.mid) <= slack, perturbed=perturbed.generator, eps=slack))
    report.add(_check('perturbation_keeps_divergence', 'the divergence behaviour at s_inf is unchanged',
                      other.divergence_behavior == s_inf.divergence_behavior))


def _gap_summary(gaps: GapExponentEstimate) -> dict:
    return {'L_lower': gaps.L_lower, 'L_upper': gaps.L_upper, 'gap': gaps.gap, 'resolution': gaps.resolution,
            'sampled_to_log_n': gaps.sampled_to}


def _box_summary(estimate: DimensionEstimate) -> dict:
    return {'lower_dim': estimate.lower_dim, 'upper_dim': estimate.upper_dim,
            'regression_slope': estimate.regression_slope, 'window': estimate.window,
            'window_slopes': estimate.window_slopes, 'saturated': estimate.saturated,
            'delta_range': estimate.delta_range}


def default_orbit_deltas(rank: int, radius: int) -> np.ndarray:
    """Dyadic deltas above the spacing of the outermost orbit points, about ``1 / M^2``."""
    if rank == 1:
        return dyadic_deltas(6, 18)
    j_max = int(math.floor(math.log2(radius * radius / 8)))
    return dyadic_deltas(max(2, j_max - 10), j_max)


def verify_hdim(group: ParabolicGroupSpec, xi: BoundaryPoint, radius: int, t_max: float = 25.0,
                levels: int = 25, tol: float = 1e-3, deltas: Optional[Sequence[float]] = None,
                sandwich_ks: Sequence[int] = range(50, 10001), threads: int = 1) -> VerificationReport:
    """Critical exponent, counting rate and orbit box dimension against ``k / 2``."""
    target = group.rank / 2
    report = VerificationReport(str(group))
    exponent = critical_exponent(group, tol, threads=threads)
    counting = counting_exponent(group, t_max, levels, threads)
    report.results.update(target=target, critical_exponent=exponent, counting_slope=counting.slope,
                          counting_ratios=counting.ratios)
    report.add(_check('critical_exponent_is_half_rank', 'delta_P bracket contains k/2',
                      exponent.contains(target, slack=tol)))
    report.add(_check('counting_rate_is_half_rank', '|counting slope - k/2| <= 0.1',
                      abs(counting.slope - target) <= AGREEMENT))

    cloud = parabolic_orbit(group, xi, radius, threads)
    deltas = default_orbit_deltas(group.rank, radius) if deltas is None else deltas
    dimensions = {}
    for metric in (SPHERICAL, BOURDON):
        try:
            estimate = estimate_box_dimension(cloud, deltas, metric, threads)
        except SaturationError as exc:
            report.add(Assertion(f'orbit_dimension_{metric}', f'|box dim ({metric}) - k/2| <= 0.1',
                                 Verdict.INCONCLUSIVE, {'note': str(exc)}))
            continue
        dimensions[metric] = estimate.mid
        report.results[f'orbit_dimension_{metric}'] = _box_summary(estimate)
        report.add(_check(f'orbit_dimension_{metric}', f'|box dim ({metric}) - k/2| <= 0.1',
                          max(abs(estimate.lower_dim - target), abs(estimate.upper_dim - target)) <= AGREEMENT))

    if SPHERICAL in dimensions:
        values = (exponent.mid, counting.slope, dimensions[SPHERICAL])
        report.add(_check('three_way_agreement', 'delta_P, counting slope and orbit box dim agree within 0.1',
                          max(values) - min(values) <= AGREEMENT, values=values))

    if group.rank == 1:
        sandwich = parabolic_sandwich(group, xi, sandwich_ks)
        report.informational['ratio_sequences'] = {
            'log k / -log d_B(p^k xi, p^(k+1) xi)': sandwich.bourdon_ratios,
            'log k / d(o, p^k o)': sandwich.distance_ratios,
        }
        report.informational['gromov_product_sandwich'] = {
            'lower_constant': sandwich.lower_constant, 'upper_constant': sandwich.upper_constant,
            'spread': sandwich.spread,
        }
    return report
