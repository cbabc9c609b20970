"""Checks around the no-violating-strata assumption.

Nothing here can confirm the assumption. :func:`initiation_balance` can only
reveal evidence against it, and :func:`mitt_appropriateness` encodes the
two design questions that decide whether it is plausible.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .core import Arm, PrincipalStratum, TrialDataset
from .errors import CounterfactualUnavailableError, EmptyArmError

DEFAULT_ALPHA = 0.05

PARTIAL_CHECK_CAVEAT = (
    "This is a partial check only: similar non-initiation rates in both arms are expected when "
    "initiation does not depend on allocation, but they do not show that it does not."
)


@dataclass(frozen=True)
class BalanceReport:
    n_intervention: int
    n_control: int
    noninit_intervention: int
    noninit_control: int
    prop_diff: float
    z_stat: float
    p_value: float
    alpha: float
    flagged: bool

    def to_dict(self) -> dict:
        return asdict(self)


def two_proportion_ztest(x1: int, n1: int, x0: int, n0: int) -> tuple[float, float]:
    """Pooled-variance z statistic and two-sided p-value for ``x1/n1 - x0/n0``.

    When the pooled proportion is 0 or 1 both groups are identical and the
    test returns ``(0.0, 1.0)``.
    """
    pooled = (x1 + x0) / (n1 + n0)
    if pooled in (0.0, 1.0):
        return 0.0, 1.0
    se = math.sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n0))
    z = (x1 / n1 - x0 / n0) / se
    return z, math.erfc(abs(z) / math.sqrt(2))


def initiation_balance(data: TrialDataset, alpha: float = DEFAULT_ALPHA) -> BalanceReport:
    """Compare the share of non-initiators between arms.

    Raises:
        EmptyArmError: if an arm has no records.
    """
    treated = data.arm == Arm.INTERVENTION
    n1 = int(treated.sum())
    n0 = len(data) - n1
    if n1 == 0:
        raise EmptyArmError(Arm.INTERVENTION)
    if n0 == 0:
        raise EmptyArmError(Arm.CONTROL)
    not_init = data.initiated == 0
    x1 = int((not_init & treated).sum())
    x0 = int((not_init & ~treated).sum())
    z, p = two_proportion_ztest(x1, n1, x0, n0)
    return BalanceReport(n1, n0, x1, x0, x1 / n1 - x0 / n0, z, p, alpha, p < alpha)


@dataclass(frozen=True)
class StrataTable:
    """Initiation pattern of each principal stratum with its share.

    Cells marked ``*`` are the ones the mITT estimator analyses: initiators
    under each arm. Strata with zero share are marked ``(empty)`` and their
    cells are not marked.
    """

    shares: tuple[float, float, float, float]
    counts: tuple[int, int, int, int] | None = None

    def rows(self) -> list[dict]:
        out = []
        for s in PrincipalStratum:
            share = self.shares[s]
            present = share > 0
            out.append({
                "stratum": s.display_name,
                "control": "Yes" if s.i0 else "No",
                "intervention": "Yes" if s.i1 else "No",
                "analysed_control": bool(present and s.i0),
                "analysed_intervention": bool(present and s.i1),
                "share": share,
                "count": None if self.counts is None else self.counts[s],
                "empty": not present,
            })
        return out

    def render(self) -> str:
        lines = [f"{'Stratum':<26}{'Control (Z=0)':>15}{'Intervention (Z=1)':>20}{'Share':>10}"
                 + ("" if self.counts is None else f"{'Count':>10}")]
        for row in self.rows():
            c = row["control"] + ("*" if row["analysed_control"] else " ")
            i = row["intervention"] + ("*" if row["analysed_intervention"] else " ")
            line = f"{row['stratum']:<26}{c:>15}{i:>20}{row['share']:>10.4f}"
            if self.counts is not None:
                line += f"{row['count']:>10d}"
            if row["empty"]:
                line += "  (empty)"
            lines.append(line)
        lines.append("* analysed by mITT (initiators in each arm)")
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.render()


def strata_table(source) -> StrataTable:
    """Stratum composition of a configuration or a counterfactual population.

    Raises:
        CounterfactualUnavailableError: for observed data, where each
            participant's initiation is seen under one arm only.
    """
    from .dgp import DgpConfig, Population

    if isinstance(source, DgpConfig):
        return StrataTable(tuple(float(v) for v in source.proportions.as_array()))
    if isinstance(source, Population):
        counts = source.stratum_counts()
        return StrataTable(tuple(float(v) for v in counts / max(len(source), 1)),
                           tuple(int(v) for v in counts))
    if isinstance(source, TrialDataset):
        raise CounterfactualUnavailableError(
            "stratum membership needs initiation under both arms; observed data show only one")
    raise TypeError(f"cannot tabulate strata for {type(source).__name__}")


@dataclass(frozen=True)
class AppropriatenessInput:
    event_identifiable_both_arms: bool
    allocation_independent_of_event: bool
    justification: str = ""


IDENTIFIABILITY_REASON = (
    "identifiability: the intercurrent event cannot be measured in both arms, so the always-initiator "
    "stratum cannot be identified"
)
ALLOCATION_REASON = (
    "allocation-dependence: whether participants initiate may depend on the arm they are allocated to, "
    "so intervention or control initiators may exist"
)


@dataclass(frozen=True)
class Verdict:
    """Outcome of the appropriateness rules.

    ``status`` is ``"appropriate"``, ``"not_appropriate"`` or
    ``"unassessed"``; the last is used when no design information was
    supplied.
    """

    status: str
    reason: str | None = None

    @property
    def appropriate(self) -> bool:
        return self.status == "appropriate"

    def to_dict(self) -> dict:
        return {"status": self.status, "reason": self.reason}

    @classmethod
    def unassessed(cls) -> Verdict:
        return cls("unassessed", "no information on identifiability or allocation-dependence was supplied")


def mitt_appropriateness(inp: AppropriatenessInput) -> Verdict:
    if not inp.event_identifiable_both_arms:
        return Verdict("not_appropriate", IDENTIFIABILITY_REASON)
    if not inp.allocation_independent_of_event:
        return Verdict("not_appropriate", ALLOCATION_REASON)
    return Verdict("appropriate")

