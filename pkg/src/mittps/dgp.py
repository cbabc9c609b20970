"""Data-generating process for simulated trials.

Stratum membership is drawn i.i.d. from :class:`StratumProportions`; each
participant's two potential outcomes are drawn independently from the
(stratum, arm) cells of an :class:`OutcomeSpec`. Randomisation then reveals
one arm per participant through the consistency projection.

Per-replication seeds come from :func:`replication_rng`, which feeds
``numpy.random.SeedSequence(entropy=master_seed, spawn_key=(index,))`` into
PCG64. The stream for replication ``r`` therefore depends only on the master
seed and ``r``, never on execution order or worker count.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

import numpy as np

from .core import Arm, PotentialParticipant, PrincipalStratum, TrialDataset
from .errors import ConfigurationError

PROPORTION_TOL = 1e-12


@dataclass(frozen=True)
class StratumProportions:
    always: float
    intervention: float
    control: float
    never: float

    def __post_init__(self):
        values = self.as_array()
        if not np.all(np.isfinite(values)) or np.any(values < 0) or np.any(values > 1):
            raise ConfigurationError(f"stratum proportions must lie in [0, 1]: {tuple(values)}")
        if abs(values.sum() - 1.0) > PROPORTION_TOL:
            raise ConfigurationError(f"stratum proportions must sum to 1, got {values.sum()!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.always, self.intervention, self.control, self.never], dtype=float)

    def __getitem__(self, stratum: PrincipalStratum) -> float:
        return float(self.as_array()[stratum])


@dataclass(frozen=True)
class Normal:
    mean: float
    sd: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.mean) or not math.isfinite(self.sd) or self.sd < 0:
            raise ConfigurationError(f"invalid Normal({self.mean}, {self.sd})")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(self.mean, self.sd, size)

    def to_dict(self) -> dict:
        return {"dist": "normal", "mean": self.mean, "sd": self.sd}


@dataclass(frozen=True)
class Bernoulli:
    p: float

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0):
            raise ConfigurationError(f"Bernoulli probability must be in [0, 1], got {self.p}")

    @property
    def mean(self) -> float:
        return float(self.p)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return (rng.random(size) < self.p).astype(float)

    def to_dict(self) -> dict:
        return {"dist": "bernoulli", "p": self.p}


Distribution = Union[Normal, Bernoulli]


@dataclass(frozen=True)
class OutcomeSpec:
    """Outcome distribution for every (stratum, arm) cell.

    All eight cells must be present, including cells of strata that have zero
    probability in a given configuration.
    """

    cells: Mapping[tuple[PrincipalStratum, Arm], Distribution]

    def __post_init__(self):
        cells = {(PrincipalStratum(s), Arm(a)): d for (s, a), d in dict(self.cells).items()}
        missing = [(s.key, a.label) for s in PrincipalStratum for a in Arm if (s, a) not in cells]
        if missing:
            raise ConfigurationError(f"outcome cells missing: {missing}")
        for d in cells.values():
            if not isinstance(d, (Normal, Bernoulli)):
                raise ConfigurationError(f"unsupported outcome distribution {d!r}")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_dict(cls, spec: Mapping[PrincipalStratum, tuple[Distribution, Distribution]]) -> OutcomeSpec:
        """Build from ``{stratum: (intervention_dist, control_dist)}``."""
        cells = {}
        for s, (d1, d0) in spec.items():
            cells[(s, Arm.INTERVENTION)] = d1
            cells[(s, Arm.CONTROL)] = d0
        return cls(cells)

    @classmethod
    def homogeneous(cls, intervention: Distribution, control: Distribution) -> OutcomeSpec:
        return cls.from_dict({s: (intervention, control) for s in PrincipalStratum})

    def cell(self, stratum: PrincipalStratum, arm: Arm) -> Distribution:
        return self.cells[(stratum, arm)]

    def mean(self, stratum: PrincipalStratum, arm: Arm) -> float:
        return float(self.cells[(stratum, arm)].mean)

    def replace(self, stratum: PrincipalStratum, arm: Arm, dist: Distribution) -> OutcomeSpec:
        cells = dict(self.cells)
        cells[(stratum, arm)] = dist
        return OutcomeSpec(cells)


class Randomization(str, enum.Enum):
    COMPLETE = "complete"
    BERNOULLI = "bernoulli"


@dataclass(frozen=True)
class DgpConfig:
    n: int
    proportions: StratumProportions
    outcomes: OutcomeSpec
    randomization: Randomization = Randomization.COMPLETE
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ConfigurationError(f"trial size n must be an integer >= 2, got {self.n!r}")
        if (isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer))
                or not 0 <= self.seed < 2**64):
            raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "randomization", Randomization(self.randomization))

    def with_(self, **changes) -> DgpConfig:
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class Population:
    """Counterfactual population stored column-wise.

    ``strata`` holds :class:`PrincipalStratum` codes; ``i1``/``i0`` are derived
    from them. Iterating yields :class:`PotentialParticipant`.
    """

    ids: np.ndarray
    strata: np.ndarray
    y1: np.ndarray
    y0: np.ndarray
    i1: np.ndarray = field(init=False)
    i0: np.ndarray = field(init=False)

    def __post_init__(self):
        strata = np.asarray(self.strata, dtype=np.int8)
        y1 = np.asarray(self.y1, dtype=float)
        y0 = np.asarray(self.y0, dtype=float)
        if not (strata.shape == y1.shape == y0.shape == (len(self.ids),)):
            raise ValueError("population columns must have equal length")
        object.__setattr__(self, "strata", strata)
        object.__setattr__(self, "y1", y1)
        object.__setattr__(self, "y0", y0)
        object.__setattr__(self, "i1", (strata <= PrincipalStratum.INTERVENTION).astype(np.int8))
        object.__setattr__(
            self, "i0", ((strata == PrincipalStratum.ALWAYS) | (strata == PrincipalStratum.CONTROL)).astype(np.int8)
        )

    @classmethod
    def from_participants(cls, participants) -> Population:
        participants = list(participants)
        ids = [p.id for p in participants]
        if len(set(ids)) != len(ids):
            raise ValueError("participant ids must be unique")
        return cls(
            ids=np.array(ids, dtype=object),
            strata=[int(p.stratum) for p in participants],
            y1=[p.y1 for p in participants],
            y0=[p.y0 for p in participants],
        )

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self) -> Iterator[PotentialParticipant]:
        for k in range(len(self)):
            yield PotentialParticipant(self.ids[k], self.y1[k], self.y0[k], self.i1[k], self.i0[k])

    def stratum_counts(self) -> np.ndarray:
        return np.bincount(self.strata, minlength=4)


def replication_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent generator for replication ``index`` under ``master_seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))))


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def generate_population(config: DgpConfig, rng=None) -> Population:
    """Draw ``config.n`` participants from the configured mixture.

    Args:
        config: The data-generating process.
        rng: A numpy ``Generator`` or anything ``default_rng`` accepts.
            Defaults to a generator seeded with ``config.seed``.
    """
    rng = _as_rng(config.seed if rng is None else rng)
    n = config.n
    strata = rng.choice(4, size=n, p=config.proportions.as_array())
    y1 = np.empty(n)
    y0 = np.empty(n)
    for s in PrincipalStratum:
        idx = np.flatnonzero(strata == s)
        if idx.size:
            y1[idx] = config.outcomes.cell(s, Arm.INTERVENTION).sample(rng, idx.size)
            y0[idx] = config.outcomes.cell(s, Arm.CONTROL).sample(rng, idx.size)
    return Population(ids=np.arange(n), strata=strata, y1=y1, y0=y0)


def assign_arms(n: int, scheme: Randomization, rng) -> np.ndarray:
    """Return a 0/1 intervention indicator for ``n`` participants."""
    rng = _as_rng(rng)
    scheme = Randomization(scheme)
    if scheme is Randomization.COMPLETE:
        if n % 2:
            raise ConfigurationError(f"complete balanced randomisation needs an even trial size, got {n}")
        z = np.zeros(n, dtype=np.int8)
        z[rng.permutation(n)[: n // 2]] = 1
        return z
    return (rng.random(n) < 0.5).astype(np.int8)


def project(population: Population, z: np.ndarray, metadata=None) -> TrialDataset:
    """Vectorised :func:`mittps.core.observe` over a whole population."""
    z = np.asarray(z, dtype=np.int8)
    treated = z == 1
    return TrialDataset(
        ids=population.ids,
        arm=z,
        initiated=np.where(treated, population.i1, population.i0),
        outcome=np.where(treated, population.y1, population.y0),
        metadata=metadata or {},
    )


def randomize_and_observe(population: Population, scheme=Randomization.COMPLETE, rng=None) -> TrialDataset:
    if len(population) == 0:
        raise ConfigurationError("cannot randomise an empty population")
    z = assign_arms(len(population), scheme, _as_rng(rng))
    return project(population, z)


def simulate_trial(config: DgpConfig, rng=None) -> TrialDataset:
    """Generate a population and randomise it with one generator."""
    rng = _as_rng(config.seed if rng is None else rng)
    if config.randomization is Randomization.COMPLETE and config.n % 2:
        raise ConfigurationError(f"complete balanced randomisation needs an even trial size, got {config.n}")
    population = generate_population(config, rng)
    return randomize_and_observe(population, config.randomization, rng)
