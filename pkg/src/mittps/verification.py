"""Exact and Monte Carlo checks of mITT unbiasedness.

:func:`exhaustive_expectation` averages the mITT estimate over every
randomisation of a small fixed population. Assignments where an arm has no
initiators are skipped and counted; the average is over the remaining ones,
each weighted equally. With only always and never initiators this average
equals the finite-population always-initiator effect exactly, because given
how many always initiators land in each arm, which ones they are is uniform.

:func:`run_mc` repeats simulate-then-estimate ``R`` times. Replication ``r``
draws from :func:`mittps.dgp.replication_rng` ``(config.seed, r)``, results
are collected in index order and only then reduced, so the summary does not
depend on ``workers``.
"""
from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import PrincipalStratum
from .dgp import DgpConfig, Population, Randomization, StratumProportions, replication_rng, simulate_trial
from .errors import AllUndefinedError, ConfigurationError, NoInitiatorsError
from .estimators import DEFAULT_LEVEL, analytic_bias, analytic_mitt_limit, mitt_estimate, oracle_ps_estimand

MAX_ENUMERATION_SIZE = 16


@dataclass(frozen=True)
class ExhaustiveResult:
    expectation: float
    n_assignments: int
    n_undefined: int
    scheme: Randomization

    @property
    def n_defined(self) -> int:
        return self.n_assignments - self.n_undefined

    @property
    def note(self) -> str | None:
        if self.n_undefined:
            return (f"{self.n_undefined} of {self.n_assignments} assignments left an arm without "
                    "initiators and were excluded from the average")
        return None


def _assignment_matrix(n: int, scheme: Randomization) -> np.ndarray:
    if scheme is Randomization.COMPLETE:
        if n % 2:
            raise ConfigurationError(f"balanced enumeration needs an even population size, got {n}")
        rows = list(itertools.combinations(range(n), n // 2))
        z = np.zeros((len(rows), n), dtype=np.int8)
        z[np.repeat(np.arange(len(rows)), n // 2), np.array(rows).ravel()] = 1
        return z
    return np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int8)


def _as_population(population) -> Population:
    if isinstance(population, Population):
        return population
    return Population.from_participants(population)


def finite_always_effect(population) -> float:
    """Mean of ``y1 - y0`` over the always initiators of a fixed population."""
    pop = _as_population(population)
    always = pop.strata == PrincipalStratum.ALWAYS
    if not always.any():
        raise ValueError("population has no always initiators")
    return float(pop.y1[always].mean() - pop.y0[always].mean())


def exhaustive_expectation(population, scheme: Randomization | str = Randomization.COMPLETE) -> ExhaustiveResult:
    """Exact randomisation expectation of the mITT estimate.

    Args:
        population: :class:`~mittps.dgp.Population` or iterable of
            :class:`~mittps.core.PotentialParticipant`, at most 16 members.
        scheme: ``complete`` enumerates all C(n, n/2) balanced splits;
            ``bernoulli`` enumerates all 2**n coin-flip assignments.

    Raises:
        ConfigurationError: population too large, or odd under ``complete``.
        AllUndefinedError: no assignment gives initiators in both arms.
    """
    pop = _as_population(population)
    scheme = Randomization(scheme)
    n = len(pop)
    if not 2 <= n <= MAX_ENUMERATION_SIZE:
        raise ConfigurationError(f"enumeration supports 2..{MAX_ENUMERATION_SIZE} participants, got {n}")
    z = _assignment_matrix(n, scheme).astype(float)
    in1 = z * pop.i1
    in0 = (1.0 - z) * pop.i0
    c1, c0 = in1.sum(axis=1), in0.sum(axis=1)
    defined = (c1 > 0) & (c0 > 0)
    if not defined.any():
        raise AllUndefinedError("no randomisation leaves initiators in both arms")
    s1, s0 = in1 @ pop.y1, in0 @ pop.y0
    estimates = s1[defined] / c1[defined] - s0[defined] / c0[defined]
    return ExhaustiveResult(float(estimates.mean()), len(z), int((~defined).sum()), scheme)


@dataclass(frozen=True)
class McSummary:
    replications: int
    n_failed: int
    mean_estimate: float
    empirical_sd: float | None
    mc_se: float | None
    oracle: float
    bias: float
    analytic_limit: float
    ci_coverage: float | None
    level: float
    seed: int
    n: int
    estimates: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def n_successful(self) -> int:
        return self.replications - self.n_failed

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("estimates")
        return d


def _replicate(config: DgpConfig, start: int, stop: int, level: float):
    estimates = np.full(stop - start, np.nan)
    covered = np.full(stop - start, np.nan)
    oracle = oracle_ps_estimand(config)
    for k, r in enumerate(range(start, stop)):
        data = simulate_trial(config, replication_rng(config.seed, r))
        try:
            res = mitt_estimate(data, level)
        except NoInitiatorsError:
            continue
        estimates[k] = res.estimate
        hit = res.covers(oracle)
        if hit is not None:
            covered[k] = float(hit)
    return estimates, covered


def _chunks(total: int, parts: int) -> list[tuple[int, int]]:
    bounds = np.linspace(0, total, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def run_mc(config: DgpConfig, replications: int, level: float = DEFAULT_LEVEL, workers: int = 1,
           keep_estimates: bool = False) -> McSummary:
    """Monte Carlo distribution of the mITT estimator under ``config``.

    Replications where an arm has no initiators are counted in ``n_failed``
    and excluded from every moment. Coverage is over replications with a
    defined interval.
    """
    if replications < 2:
        raise ConfigurationError("need at least 2 replications")
    oracle = oracle_ps_estimand(config)
    limit = analytic_mitt_limit(config)
    chunks = _chunks(replications, max(1, workers))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_replicate, *zip(*[(config, a, b, level) for a, b in chunks])))
    else:
        parts = [_replicate(config, a, b, level) for a, b in chunks]
    estimates = np.concatenate([p[0] for p in parts])
    covered = np.concatenate([p[1] for p in parts])
    ok = ~np.isnan(estimates)
    n_ok = int(ok.sum())
    if n_ok == 0:
        raise AllUndefinedError("every replication had an arm without initiators")
    good = estimates[ok]
    mean = float(good.mean())
    sd = float(good.std(ddof=1)) if n_ok > 1 else None
    has_ci = ~np.isnan(covered)
    return McSummary(
        replications=replications,
        n_failed=replications - n_ok,
        mean_estimate=mean,
        empirical_sd=sd,
        mc_se=sd / math.sqrt(n_ok) if sd is not None else None,
        oracle=oracle,
        bias=mean - oracle,
        analytic_limit=limit,
        ci_coverage=float(covered[has_ci].mean()) if has_ci.any() else None,
        level=level,
        seed=config.seed,
        n=config.n,
        estimates=estimates if keep_estimates else None,
    )


@dataclass(frozen=True)
class SweepRow:
    pi_violation: float
    analytic_bias: float
    mc_bias: float
    mc_se: float | None
    n_failed: int


SWEEP_COLUMNS = ("pi_violation", "analytic_bias", "mc_bias", "mc_se", "n_failed")


def violation_config(base: DgpConfig, pi_violation: float) -> DgpConfig:
    """Set both violating strata to ``pi_violation``; always initiators take
    the rest and the never-initiator share is kept."""
    if not 0.0 <= pi_violation < 0.5:
        raise ConfigurationError(f"violation share must be in [0, 0.5), got {pi_violation}")
    never = base.proportions.never
    always = 1.0 - never - 2.0 * pi_violation
    if always <= 0:
        raise ConfigurationError(
            f"violation share {pi_violation} leaves no always initiators (never share {never})")
    return base.with_(proportions=StratumProportions(always, pi_violation, pi_violation, never))


def assumption_violation_sweep(base: DgpConfig, pi_violation_grid, replications: int = 1000,
                               level: float = DEFAULT_LEVEL, workers: int = 1) -> list[SweepRow]:
    rows = []
    for g in pi_violation_grid:
        cfg = violation_config(base, float(g))
        mc = run_mc(cfg, replications, level, workers)
        rows.append(SweepRow(float(g), analytic_bias(cfg), mc.bias, mc.mc_se, mc.n_failed))
    return rows


def write_sweep_csv(rows, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow(["" if v is None else repr(v) for v in (getattr(row, c) for c in SWEEP_COLUMNS)])


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def run_proof_checks(seed: int = 0, replications: int = 2000, workers: int = 1) -> list[CheckResult]:
    """Exact enumeration over the bundled populations plus MC bias checks."""
    from .fixtures import proof_populations, unbiased_config, violation_demo_config

    checks = []
    for name, pop in proof_populations():
        for scheme in Randomization:
            res = exhaustive_expectation(pop, scheme)
            target = finite_always_effect(pop)
            err = abs(res.expectation - target)
            checks.append(CheckResult(
                f"enumeration {name} ({scheme.value}, n={len(pop)})", err <= 1e-12,
                f"E[mITT]={res.expectation:.12g} target={target:.12g} |diff|={err:.1e}"))

    cfg = unbiased_config(n=500, seed=seed)
    mc = run_mc(cfg, replications, workers=workers)
    checks.append(CheckResult(
        "MC unbiased without violating strata", abs(mc.bias) < 4 * mc.mc_se,
        f"bias={mc.bias:.4g} 4*mc_se={4 * mc.mc_se:.4g} R={replications}"))

    cfg = violation_demo_config(n=2000, seed=seed)
    mc = run_mc(cfg, replications, workers=workers)
    gap = mc.mean_estimate - mc.analytic_limit
    checks.append(CheckResult(
        "MC matches analytic limit under violation", abs(gap) < 4 * mc.mc_se and analytic_bias(cfg) != 0,
        f"mean={mc.mean_estimate:.6g} limit={mc.analytic_limit:.6g} analytic bias={analytic_bias(cfg):.6g} "
        f"4*mc_se={4 * mc.mc_se:.4g}"))
    return checks
