"""Difference-in-means estimators, the principal stratum estimand, and the
large-sample behaviour of the modified intention-to-treat (mITT) estimator.

The mITT estimator compares initiators in the intervention arm (always and
intervention initiators) with initiators in the control arm (always and
control initiators). It converges to

    (pA*mA1 + pI*mI1) / (pA + pI) - (pA*mA0 + pC*mC0) / (pA + pC)

where ``p`` are stratum proportions and ``m`` the (stratum, arm) outcome
means. The target, the effect among always initiators, is ``mA1 - mA0``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from statistics import NormalDist

import numpy as np

from .core import Arm, PrincipalStratum, TrialDataset
from .dgp import DgpConfig
from .errors import EmptyArmError, NoInitiatorsError, UndefinedEstimandError, UndefinedLimitError

DEFAULT_LEVEL = 0.95


@dataclass(frozen=True)
class EstimateResult:
    """Point estimate with Welch standard error and normal-theory interval.

    ``se``, ``ci_low`` and ``ci_high`` are ``None`` when an analysed arm has a
    single record, since no variance can be estimated there.
    """

    estimate: float
    se: float | None
    ci_low: float | None
    ci_high: float | None
    n_analyzed_intervention: int
    n_analyzed_control: int
    level: float = DEFAULT_LEVEL

    def covers(self, value: float) -> bool | None:
        if self.se is None:
            return None
        return self.ci_low <= value <= self.ci_high

    def to_dict(self) -> dict:
        return asdict(self)


def _check_level(level: float) -> None:
    if not (0.0 < level < 1.0):
        raise ValueError(f"confidence level must be in (0, 1), got {level}")


def _difference_in_means(y1: np.ndarray, y0: np.ndarray, level: float) -> EstimateResult:
    n1, n0 = y1.size, y0.size
    estimate = float(y1.mean() - y0.mean())
    if n1 < 2 or n0 < 2:
        return EstimateResult(estimate, None, None, None, n1, n0, level)
    se = math.sqrt(y1.var(ddof=1) / n1 + y0.var(ddof=1) / n0)
    half = NormalDist().inv_cdf(0.5 + level / 2) * se
    return EstimateResult(estimate, se, estimate - half, estimate + half, n1, n0, level)


def mitt_estimate(data: TrialDataset, level: float = DEFAULT_LEVEL) -> EstimateResult:
    """Difference in mean outcome between initiators in each arm.

    Records with ``initiated == 0`` are dropped before anything is computed,
    so their outcomes cannot influence the result.

    Raises:
        NoInitiatorsError: if either arm has no initiators.
    """
    _check_level(level)
    keep = data.initiated == 1
    treated = data.arm == Arm.INTERVENTION
    y1 = data.outcome[keep & treated]
    y0 = data.outcome[keep & ~treated]
    if y1.size == 0:
        raise NoInitiatorsError(Arm.INTERVENTION)
    if y0.size == 0:
        raise NoInitiatorsError(Arm.CONTROL)
    return _difference_in_means(y1, y0, level)


def itt_estimate(data: TrialDataset, level: float = DEFAULT_LEVEL) -> EstimateResult:
    """Difference in means over all randomised participants (treatment policy)."""
    _check_level(level)
    treated = data.arm == Arm.INTERVENTION
    y1 = data.outcome[treated]
    y0 = data.outcome[~treated]
    if y1.size == 0:
        raise EmptyArmError(Arm.INTERVENTION)
    if y0.size == 0:
        raise EmptyArmError(Arm.CONTROL)
    return _difference_in_means(y1, y0, level)


def oracle_ps_estimand(config: DgpConfig) -> float:
    """Average treatment effect among always initiators."""
    if config.proportions.always <= 0:
        raise UndefinedEstimandError("the always-initiator stratum is empty, so its treatment effect is undefined")
    m = config.outcomes.mean
    return m(PrincipalStratum.ALWAYS, Arm.INTERVENTION) - m(PrincipalStratum.ALWAYS, Arm.CONTROL)


def analysis_population_means(config: DgpConfig) -> tuple[float, float]:
    """Expected outcome among initiators in the intervention and control arms."""
    p = config.proportions
    m = config.outcomes.mean
    A, I, C = PrincipalStratum.ALWAYS, PrincipalStratum.INTERVENTION, PrincipalStratum.CONTROL
    w1 = p.always + p.intervention
    w0 = p.always + p.control
    if w1 <= 0:
        raise UndefinedLimitError(Arm.INTERVENTION)
    if w0 <= 0:
        raise UndefinedLimitError(Arm.CONTROL)
    mean1 = (p.always * m(A, Arm.INTERVENTION) + p.intervention * m(I, Arm.INTERVENTION)) / w1
    mean0 = (p.always * m(A, Arm.CONTROL) + p.control * m(C, Arm.CONTROL)) / w0
    return mean1, mean0


def analytic_mitt_limit(config: DgpConfig) -> float:
    mean1, mean0 = analysis_population_means(config)
    return mean1 - mean0


def analytic_bias(config: DgpConfig) -> float:
    """Large-sample bias of mITT for the always-initiator effect."""
    return analytic_mitt_limit(config) - oracle_ps_estimand(config)
