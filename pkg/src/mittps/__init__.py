"""Modified intention-to-treat (mITT) analysis as a principal stratum estimator.

Simulate trials with the four initiation strata, estimate the effect among
always initiators, measure the bias that intervention or control initiators
introduce, and report the analysis.
"""
from .core import Arm, ObservedRecord, PotentialParticipant, PrincipalStratum, TrialDataset, classify_stratum, observe
from .dgp import (Bernoulli, DgpConfig, Normal, OutcomeSpec, Population, Randomization, StratumProportions,
                  generate_population, randomize_and_observe, simulate_trial)
from .diagnostics import (AppropriatenessInput, BalanceReport, Verdict, initiation_balance, mitt_appropriateness,
                          strata_table)
from .errors import *  # noqa: F401,F403
from .estimators import (EstimateResult, analytic_bias, analytic_mitt_limit, itt_estimate, mitt_estimate,
                         oracle_ps_estimand)
from .reporting import ReportInputs, emit_analysis_report, emit_box1
from .verification import McSummary, assumption_violation_sweep, exhaustive_expectation, run_mc

__version__ = "0.1.0"
