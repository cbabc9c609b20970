"""Potential-outcome data model for trials with failure to initiate treatment.

A :class:`PotentialParticipant` carries both potential outcomes and both
potential initiation indicators. Only :func:`observe` (or its vectorised
counterpart in :mod:`mittps.dgp`) turns one into an :class:`ObservedRecord`,
so estimators never see the counterfactual arm.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterator, Mapping, Sequence

import numpy as np


class Arm(enum.IntEnum):
    CONTROL = 0
    INTERVENTION = 1

    @property
    def label(self) -> str:
        return self.name.lower()


class PrincipalStratum(enum.IntEnum):
    """Joint potential initiation status ``(i1, i0)``.

    The integer values index arrays of stratum codes used by the simulator.
    """

    ALWAYS = 0
    INTERVENTION = 1
    CONTROL = 2
    NEVER = 3

    @property
    def i1(self) -> int:
        return int(self in (PrincipalStratum.ALWAYS, PrincipalStratum.INTERVENTION))

    @property
    def i0(self) -> int:
        return int(self in (PrincipalStratum.ALWAYS, PrincipalStratum.CONTROL))

    def initiates(self, arm: Arm) -> int:
        return self.i1 if arm == Arm.INTERVENTION else self.i0

    @property
    def display_name(self) -> str:
        return _DISPLAY_NAMES[self]

    @property
    def key(self) -> str:
        return _KEYS[self]


_DISPLAY_NAMES = {
    PrincipalStratum.ALWAYS: "Always initiators",
    PrincipalStratum.INTERVENTION: "Intervention initiators",
    PrincipalStratum.CONTROL: "Control initiators",
    PrincipalStratum.NEVER: "Never initiators",
}

_KEYS = {
    PrincipalStratum.ALWAYS: "always",
    PrincipalStratum.INTERVENTION: "intervention_initiator",
    PrincipalStratum.CONTROL: "control_initiator",
    PrincipalStratum.NEVER: "never",
}

_BY_INDICATORS = {(s.i1, s.i0): s for s in PrincipalStratum}


def _binary(value: Any, name: str) -> int:
    try:
        if value in (0, 1):
            return int(value)
    except TypeError:
        pass
    raise ValueError(f"{name} must be 0 or 1, got {value!r}")


def classify_stratum(i1: int, i0: int) -> PrincipalStratum:
    """Map potential initiation under intervention (``i1``) and control
    (``i0``) to the principal stratum."""
    return _BY_INDICATORS[(_binary(i1, "i1"), _binary(i0, "i0"))]


@dataclass(frozen=True)
class PotentialParticipant:
    id: Hashable
    y1: float
    y0: float
    i1: int
    i0: int

    def __post_init__(self):
        object.__setattr__(self, "i1", _binary(self.i1, "i1"))
        object.__setattr__(self, "i0", _binary(self.i0, "i0"))
        object.__setattr__(self, "y1", float(self.y1))
        object.__setattr__(self, "y0", float(self.y0))
        if not (math.isfinite(self.y1) and math.isfinite(self.y0)):
            raise ValueError(f"participant {self.id!r}: potential outcomes must be finite")

    @property
    def stratum(self) -> PrincipalStratum:
        return classify_stratum(self.i1, self.i0)


@dataclass(frozen=True)
class ObservedRecord:
    id: Hashable
    arm: Arm
    initiated: int
    outcome: float


def observe(p: PotentialParticipant, z: Arm | int) -> ObservedRecord:
    """Project a participant onto the arm it was assigned (consistency)."""
    z = Arm(z)
    if z == Arm.INTERVENTION:
        return ObservedRecord(p.id, z, p.i1, p.y1)
    return ObservedRecord(p.id, z, p.i0, p.y0)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TrialDataset:
    """Observed trial data, stored column-wise.

    ``arm``, ``initiated`` and ``outcome`` are read-only numpy arrays sharing
    the row order of ``ids``. Iterating yields :class:`ObservedRecord`.
    """

    ids: Sequence[Hashable]
    arm: np.ndarray
    initiated: np.ndarray
    outcome: np.ndarray
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        arm = _readonly(np.array(self.arm, dtype=np.int8))
        initiated = _readonly(np.array(self.initiated, dtype=np.int8))
        outcome = _readonly(np.array(self.outcome, dtype=float))
        n = len(self.ids)
        if not (arm.shape == initiated.shape == outcome.shape == (n,)):
            raise ValueError("ids, arm, initiated and outcome must have equal length")
        if n and (np.any((arm != 0) & (arm != 1)) or np.any((initiated != 0) & (initiated != 1))):
            raise ValueError("arm and initiated must be 0/1")
        if not np.all(np.isfinite(outcome)):
            raise ValueError("outcomes must be finite")
        object.__setattr__(self, "arm", arm)
        object.__setattr__(self, "initiated", initiated)
        object.__setattr__(self, "outcome", outcome)
        object.__setattr__(self, "metadata", dict(self.metadata))

    @classmethod
    def from_records(cls, records, metadata=None) -> TrialDataset:
        records = list(records)
        ids = [r.id for r in records]
        if len(set(ids)) != len(ids):
            raise ValueError("record ids must be unique")
        return cls(
            ids=ids,
            arm=[int(r.arm) for r in records],
            initiated=[r.initiated for r in records],
            outcome=[r.outcome for r in records],
            metadata=metadata or {},
        )

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self) -> Iterator[ObservedRecord]:
        for k in range(len(self)):
            yield self.record(k)

    def record(self, k: int) -> ObservedRecord:
        return ObservedRecord(
            self.ids[k], Arm(int(self.arm[k])), int(self.initiated[k]), float(self.outcome[k])
        )

    @property
    def records(self) -> list[ObservedRecord]:
        return list(self)

    def arm_size(self, arm: Arm) -> int:
        return int(np.count_nonzero(self.arm == arm))
