"""Bundled populations, configurations and trial descriptions.

Used by ``mittps verify``, the golden files and the test-suite.
"""
from __future__ import annotations

from .core import PotentialParticipant, PrincipalStratum
from .dgp import DgpConfig, Normal, OutcomeSpec, Population, StratumProportions
from .diagnostics import AppropriatenessInput

A, N = PrincipalStratum.ALWAYS, PrincipalStratum.NEVER

# (stratum, y1, y0) rows; every population keeps at least n/2 + 2 always
# initiators so each balanced split has two or more of them per arm.
_PROOF_ROWS = {
    "p4a": [(A, 1, 0), (A, 2, 1), (A, 3, 1), (A, 4, 2)],
    "p4b": [(A, 0.5, -1.5), (A, 7, 7), (A, -3, 2), (A, 10, 0)],
    "p4c": [(A, 1, 1), (A, 1, 1), (A, 1, 1), (A, 1, 1)],
    "p4d": [(A, 100, -100), (A, 0.1, 0.3), (A, 2.5, 2.25), (A, -8, 4)],
    "p6a": [(A, 1, 0), (A, 2, 0), (A, 3, 1), (A, 4, 1), (A, 5, 2), (N, 99, -99)],
    "p6b": [(A, 3, 3), (A, 1, 4), (A, 0, 0), (A, 9, 2), (A, 2, 7), (A, 5, 1)],
    "p6c": [(N, -50, 50), (A, 0.25, 0.75), (A, 1.5, 0), (A, 2, 2), (A, -1, 3), (A, 6, 1)],
    "p6d": [(A, 10, 1), (A, 11, 2), (N, 0, 0), (A, 12, 3), (A, 13, 4), (A, 14, 5)],
    "p8a": [(A, 1, 0), (A, 2, 0), (N, 40, 1), (A, 3, 0), (A, 4, 0), (N, -7, 30), (A, 5, 0), (A, 6, 0)],
    "p8b": [(A, 2, 1), (A, 2, 1), (A, 5, -1), (A, 0, 0), (A, 8, 4), (A, 1, 3), (A, -2, -2), (N, 1e3, -1e3)],
    "p8c": [(A, 0.1, 0.2), (A, 0.3, 0.4), (A, 0.5, 0.6), (A, 0.7, 0.8),
            (A, 0.9, 1.0), (A, 1.1, 1.2), (A, 1.3, 1.4), (A, 1.5, 1.6)],
    "p8d": [(N, 5, 5), (A, 3, -3), (A, 4, -4), (N, 6, 6), (A, 9, 1), (A, 2, 8), (A, 7, 0), (A, 1, 1)],
}


def proof_populations() -> list[tuple[str, Population]]:
    out = []
    for name, rows in _PROOF_ROWS.items():
        people = [PotentialParticipant(f"{name}-{k}", y1, y0, s.i1, s.i0) for k, (s, y1, y0) in enumerate(rows)]
        out.append((name, Population.from_participants(people)))
    return out


def _outcomes(**cells) -> OutcomeSpec:
    """Unit-variance Normal cells; unspecified means are 0."""
    spec = {}
    for s in PrincipalStratum:
        spec[s] = (Normal(cells.get(f"{s.key}_1", 0.0), 1.0), Normal(cells.get(f"{s.key}_0", 0.0), 1.0))
    return OutcomeSpec.from_dict(spec)


def unbiased_config(n: int = 500, seed: int = 0) -> DgpConfig:
    """Always and never initiators only; always-initiator effect 1.0.

    Never initiators get outcomes far from the others so any leakage into the
    estimate would show.
    """
    return DgpConfig(
        n=n,
        proportions=StratumProportions(0.8, 0.0, 0.0, 0.2),
        outcomes=_outcomes(always_1=1.0, always_0=0.0, never_1=10.0, never_0=-10.0),
        seed=seed,
    )


def violation_demo_config(n: int = 2000, seed: int = 0) -> DgpConfig:
    """Violating strata present with outcomes unlike the always initiators.

    Limit 2.75 - 6/7 = 1.892857..., bias 0.892857...
    """
    return DgpConfig(
        n=n,
        proportions=StratumProportions(0.6, 0.2, 0.1, 0.1),
        outcomes=_outcomes(always_1=2.0, always_0=1.0, intervention_initiator_1=5.0, control_initiator_0=0.0),
        seed=seed,
    )


def forced_imbalance_config(n_per_arm: int = 100, seed: int = 0) -> DgpConfig:
    """No non-initiation under intervention, 30% under control."""
    return DgpConfig(
        n=2 * n_per_arm,
        proportions=StratumProportions(0.7, 0.3, 0.0, 0.0),
        outcomes=_outcomes(always_1=1.0),
        seed=seed,
    )


EXAMPLE_TRIALS: dict[str, dict] = {
    "FLO-ELA": {
        "description": "Open-label trial of cardiac output monitor guided fluid delivery vs clinician "
                       "judgement during emergency laparotomy",
        "intercurrent_event": "cancellation of surgery",
        "input": AppropriatenessInput(
            True, True,
            "Surgery cancellation is recorded in both arms. Cancellation follows a major change in the "
            "patient's condition and is decided by surgeons who do not know the allocation, so the "
            "planned fluid strategy cannot plausibly drive it."),
    },
    "MIST2": {
        "description": "Double-blind trial of intrapleural tPA vs matching placebo in pleural infection",
        "intercurrent_event": "failure to receive any dose of study treatment",
        "input": AppropriatenessInput(
            True, True,
            "Receipt of study drug is recorded in both arms and, with tPA and placebo indistinguishable, "
            "nobody deciding whether treatment starts knows the allocation."),
    },
    "COPERS": {
        "description": "Open-label trial of a group pain self-management course vs usual care in chronic "
                       "musculoskeletal pain",
        "intercurrent_event": "failure to attend any group session",
        "input": AppropriatenessInput(
            False, False,
            "Usual-care participants are never offered the course, so session attendance cannot be "
            "observed in the control arm."),
    },
    "SWAP": {
        "description": "Open-label trial of a group weight-loss programme vs nurse-led weight management "
                       "sessions in obese adults",
        "intercurrent_event": "failure to attend any session of the allocated programme",
        "input": AppropriatenessInput(
            True, False,
            "Attendance is recorded in both arms, but participants know which programme they were given "
            "and may be more willing to attend one than the other."),
    },
}
