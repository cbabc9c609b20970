"""Plain-text reports and the matching JSON envelope.

Numbers in prose use :func:`fmt` (6 significant digits); the envelope keeps
full precision, so ``fmt(envelope_value)`` reproduces every number printed.
"""
from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import PARTIAL_CHECK_CAVEAT, BalanceReport, Verdict
from .errors import InputError, MissingJustificationError
from .estimators import EstimateResult

DISCLOSURE_TITLE = "Reporting the modified intention-to-treat (mITT) principal stratum estimator"


def fmt(x: float | None) -> str:
    if x is None:
        return "undefined"
    return f"{x:.6g}"


@dataclass(frozen=True)
class ReportInputs:
    trial_name: str
    intercurrent_event_description: str
    estimand_statement: str = ""
    assumption_justification: str = ""
    itt: EstimateResult | None = None
    mitt: EstimateResult | None = None
    balance: BalanceReport | None = None
    verdict: Verdict = Verdict.unassessed()


def _estimand_text(inputs: ReportInputs) -> str:
    event = inputs.intercurrent_event_description
    text = (f"A principal stratum strategy is used for the intercurrent event \"{event}\". The target is "
            "the treatment effect among participants who would initiate treatment whichever arm they "
            "were assigned to (always initiators).")
    if inputs.estimand_statement.strip():
        text = inputs.estimand_statement.strip() + " " + text
    return text


def emit_box1(inputs: ReportInputs) -> str:
    """Four-part disclosure for an analysis that drops non-initiators.

    Raises:
        MissingJustificationError: verdict is appropriate but no
            justification text was given.
    """
    justification = inputs.assumption_justification.strip()
    if inputs.verdict.appropriate and not justification:
        raise MissingJustificationError("an appropriate verdict needs a trial-specific justification of the assumption")
    event = inputs.intercurrent_event_description
    parts = [
        DISCLOSURE_TITLE,
        "",
        "[1] Estimand",
        _estimand_text(inputs),
        "",
        "[2] Estimator",
        f"Participants who experience the intercurrent event (\"{event}\") are excluded from the analysis "
        "population. The difference in mean outcome between the remaining participants of each arm is "
        "reported as the estimate of the always-initiator effect.",
        "",
        "[3] Assumptions",
        "The estimator is unbiased for the principal stratum effect under consistency, randomisation, "
        "and the assumption that there are no 'intervention initiators' and no 'control initiators', "
        "i.e. each participant would initiate treatment under both arms or under neither.",
        "",
    ]
    if inputs.verdict.status == "not_appropriate":
        parts += [
            "[!] WARNING: assumption not justified",
            f"The mITT estimator is not appropriate for this trial ({inputs.verdict.reason}). Its estimate "
            "compares different principal strata between arms and may be biased for the principal stratum "
            "effect.",
        ]
    else:
        parts += ["[4] Justification", justification or "No justification supplied."]
        if inputs.verdict.status == "unassessed":
            parts.append("Note: the design criteria (identifiability in both arms, independence from "
                         "allocation) were not assessed.")
    return "\n".join(parts) + "\n"


def _estimate_line(label: str, r: EstimateResult) -> str:
    return (f"  {label:<5} estimate={fmt(r.estimate)} se={fmt(r.se)} ci=[{fmt(r.ci_low)}, {fmt(r.ci_high)}] "
            f"level={fmt(r.level)} analysed_intervention={r.n_analyzed_intervention} "
            f"analysed_control={r.n_analyzed_control}")


def _balance_lines(b: BalanceReport) -> list[str]:
    lines = [
        "Non-initiation balance (two-proportion z-test, pooled variance)",
        f"  intervention: {b.noninit_intervention} of {b.n_intervention} did not initiate",
        f"  control: {b.noninit_control} of {b.n_control} did not initiate",
        f"  prop_diff={fmt(b.prop_diff)} z={fmt(b.z_stat)} p={fmt(b.p_value)} alpha={fmt(b.alpha)}",
    ]
    if b.flagged:
        lines.append(f"  WARNING: evidence of violation. The share of non-initiators differs between arms "
                     f"(prop_diff={fmt(b.prop_diff)}), which is unexpected if initiation does not depend on "
                     "allocation.")
    lines.append("  " + PARTIAL_CHECK_CAVEAT)
    return lines


def _verdict_line(v: Verdict) -> str:
    label = v.status.replace("_", " ")
    return f"Appropriateness of mITT: {label}" + (f" ({v.reason})" if v.reason else "")


def emit_analysis_report(inputs: ReportInputs) -> tuple[str, dict]:
    """Human-readable report plus a JSON-ready envelope with the same numbers.

    Raises:
        InputError: neither estimates nor a balance report were supplied.
    """
    if inputs.itt is None and inputs.mitt is None and inputs.balance is None:
        raise InputError("an analysis report needs estimates or a balance diagnostic")
    box1 = emit_box1(inputs)
    lines = [f"Trial: {inputs.trial_name}", f"Intercurrent event: {inputs.intercurrent_event_description}", ""]
    if inputs.itt is not None or inputs.mitt is not None:
        lines.append("Estimates (difference in means, intervention minus control)")
        if inputs.itt is not None:
            lines.append(_estimate_line("ITT", inputs.itt))
        if inputs.mitt is not None:
            lines.append(_estimate_line("mITT", inputs.mitt))
        lines.append("")
    if inputs.balance is not None:
        lines += _balance_lines(inputs.balance) + [""]
    lines += [_verdict_line(inputs.verdict), "", box1]
    envelope = {
        "trial": {
            "name": inputs.trial_name,
            "intercurrent_event": inputs.intercurrent_event_description,
            "estimand_statement": inputs.estimand_statement,
        },
        "estimates": {
            "itt": inputs.itt.to_dict() if inputs.itt is not None else None,
            "mitt": inputs.mitt.to_dict() if inputs.mitt is not None else None,
        },
        "balance": inputs.balance.to_dict() if inputs.balance is not None else None,
        "verdict": inputs.verdict.to_dict(),
        "box1": box1,
    }
    return "\n".join(lines), envelope
