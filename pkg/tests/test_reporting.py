import json
import re

import pytest

from mittps.core import TrialDataset
from mittps.diagnostics import Verdict, initiation_balance, mitt_appropriateness
from mittps.errors import InputError, MissingJustificationError
from mittps.estimators import itt_estimate, mitt_estimate
from mittps.fixtures import EXAMPLE_TRIALS
from mittps.reporting import ReportInputs, emit_analysis_report, emit_box1, fmt

MANDATED = ("principal stratum", "excluded from the analysis population",
            "'intervention initiators'", "'control initiators'")

FOUR = TrialDataset(["p1", "p2", "p3", "p4"], [1, 1, 0, 0], [1, 1, 1, 0], [2, 4, 1, 9])


def trial_inputs(name, **extra):
    t = EXAMPLE_TRIALS[name]
    return ReportInputs(name, t["intercurrent_event"], assumption_justification=t["input"].justification,
                        verdict=mitt_appropriateness(t["input"]), **extra)


def test_fmt_six_significant_digits():
    assert fmt(1.8928571428571428) == "1.89286"
    assert fmt(-2.0) == "-2"
    assert fmt(None) == "undefined"


@pytest.mark.parametrize("name", list(EXAMPLE_TRIALS))
def test_disclosure_mandated_phrases(name):
    text = emit_box1(trial_inputs(name))
    for phrase in MANDATED:
        assert phrase in text
    headers = [line for line in text.splitlines() if line.startswith("[")]
    assert headers[:3] == ["[1] Estimand", "[2] Estimator", "[3] Assumptions"]


def test_disclosure_appropriate_carries_justification():
    text = emit_box1(trial_inputs("FLO-ELA"))
    assert text.index("[4] Justification") > text.index("[3] Assumptions")
    assert EXAMPLE_TRIALS["FLO-ELA"]["input"].justification in text
    assert "WARNING" not in text


def test_disclosure_not_appropriate_warns_instead_of_justification():
    text = emit_box1(trial_inputs("SWAP"))
    assert "[4] Justification" not in text
    assert "WARNING" in text and "allocation-dependence" in text


def test_disclosure_missing_justification():
    with pytest.raises(MissingJustificationError):
        emit_box1(ReportInputs("t", "e", assumption_justification="  ", verdict=Verdict("appropriate")))


def test_analysis_report_needs_content():
    with pytest.raises(InputError):
        emit_analysis_report(ReportInputs("t", "e"))


def test_estimates_only_report():
    text, env = emit_analysis_report(ReportInputs("t", "e", itt=itt_estimate(FOUR), mitt=mitt_estimate(FOUR)))
    assert "balance" not in text.lower()
    assert env["balance"] is None
    assert set(env) == {"trial", "estimates", "balance", "verdict", "box1"}


def test_full_report_on_four_record_fixture():
    text, env = emit_analysis_report(trial_inputs(
        "MIST2", itt=itt_estimate(FOUR), mitt=mitt_estimate(FOUR), balance=initiation_balance(FOUR)))
    assert env["estimates"]["mitt"]["estimate"] == 2.0
    assert env["estimates"]["itt"]["estimate"] == -2.0
    assert "mITT  estimate=2 " in text and "ITT   estimate=-2 " in text
    assert "partial check only" in text
    assert env["box1"] in text
    json.dumps(env)


def test_flagged_balance_warning_quotes_difference():
    data = TrialDataset(list(range(200)), [1] * 100 + [0] * 100, [1] * 100 + [0] * 30 + [1] * 70, [0.0] * 200)
    b = initiation_balance(data)
    text, _ = emit_analysis_report(ReportInputs("t", "e", balance=b))
    assert b.flagged
    assert "evidence of violation" in text and f"prop_diff={fmt(b.prop_diff)}" in text


def _numbers(obj):
    if isinstance(obj, bool):
        return
    if isinstance(obj, (int, float)):
        yield obj
    elif isinstance(obj, dict):
        for v in obj.values():
            yield from _numbers(v)


def test_every_printed_number_is_in_the_envelope():
    text, env = emit_analysis_report(trial_inputs(
        "FLO-ELA", itt=itt_estimate(FOUR), mitt=mitt_estimate(FOUR), balance=initiation_balance(FOUR)))
    body = text.split(env["box1"])[0]
    printed = re.findall(r"-?\d+(?:\.\d+)?(?:e[+-]?\d+)?", body)
    available = {fmt(v) for v in _numbers(env)}
    assert printed
    for token in printed:
        assert token in available, token
