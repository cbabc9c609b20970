"""Dataset CSV and TOML configuration files.

Dataset CSV: header ``participant_id,arm,initiated,outcome``; ``arm`` and
``initiated`` are 0/1, ``outcome`` a finite decimal. Missing values are
rejected.

Configuration (TOML); every section is optional, unknown keys are errors::

    n = 500
    seed = 42
    randomization = "complete"          # or "bernoulli"

    [proportions]
    always = 0.8
    intervention_initiator = 0.0
    control_initiator = 0.0
    never = 0.2

    [outcomes.always]                   # one table per stratum, all four required
    intervention = { dist = "normal", mean = 1.0, sd = 1.0 }
    control = { dist = "bernoulli", p = 0.3 }

    [mc]
    replications = 1000
    alpha = 0.05
    level = 0.95
    grid = [0.0, 0.05, 0.1]

    [report]
    trial_name = "..."
    intercurrent_event = "..."
    estimand_statement = "..."
    justification = "..."
    event_identifiable_both_arms = true
    allocation_independent_of_event = true
"""
from __future__ import annotations

import csv
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .core import Arm, PrincipalStratum, TrialDataset
from .dgp import Bernoulli, DgpConfig, Normal, OutcomeSpec, Randomization, StratumProportions
from .diagnostics import AppropriatenessInput, Verdict, mitt_appropriateness
from .errors import ConfigurationError, ParseError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

CSV_HEADER = ["participant_id", "arm", "initiated", "outcome"]


def _binary_field(text: str, name: str, line: int) -> int:
    if text not in ("0", "1"):
        raise ParseError(f"{name} must be 0 or 1, got {text!r}", line)
    return int(text)


def read_dataset(fh, metadata=None) -> TrialDataset:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty file, expected header", 1) from None
    if [h.strip() for h in header] != CSV_HEADER:
        raise ParseError(f"header must be {','.join(CSV_HEADER)}, got {','.join(header)}", 1)
    ids, arms, initiated, outcomes = [], [], [], []
    seen = {}
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 fields, got {len(row)}", line)
        pid, arm, init, y = (v.strip() for v in row)
        if not pid:
            raise ParseError("participant_id is empty", line)
        if pid in seen:
            raise ParseError(f"duplicate participant_id {pid!r} (first seen on line {seen[pid]})", line)
        seen[pid] = line
        arms.append(_binary_field(arm, "arm", line))
        initiated.append(_binary_field(init, "initiated", line))
        try:
            value = float(y)
        except ValueError:
            raise ParseError(f"outcome {y!r} is not a number", line) from None
        if not math.isfinite(value):
            raise ParseError(f"outcome {y!r} is not finite", line)
        outcomes.append(value)
        ids.append(pid)
    return TrialDataset(ids, arms, initiated, outcomes, metadata or {})


def load_dataset(path, metadata=None) -> TrialDataset:
    """Read a dataset CSV; row order is preserved.

    Raises:
        ParseError: with the offending line number.
    """
    with open(path, newline="") as fh:
        return read_dataset(fh, metadata)


def write_dataset(data: TrialDataset, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for k in range(len(data)):
        writer.writerow([data.ids[k], int(data.arm[k]), int(data.initiated[k]), repr(float(data.outcome[k]))])


@dataclass(frozen=True)
class McSettings:
    replications: int | None = None
    alpha: float = 0.05
    level: float = 0.95
    grid: tuple[float, ...] = (0.0, 0.05, 0.1, 0.15, 0.2)


@dataclass(frozen=True)
class ReportSettings:
    trial_name: str = "unnamed trial"
    intercurrent_event: str = "failure to initiate treatment"
    estimand_statement: str = ""
    justification: str = ""
    event_identifiable_both_arms: bool | None = None
    allocation_independent_of_event: bool | None = None

    def verdict(self) -> Verdict:
        if self.event_identifiable_both_arms is None and self.allocation_independent_of_event is None:
            return Verdict.unassessed()
        if self.event_identifiable_both_arms is None or self.allocation_independent_of_event is None:
            raise ConfigurationError("give both event_identifiable_both_arms and allocation_independent_of_event")
        return mitt_appropriateness(AppropriatenessInput(
            self.event_identifiable_both_arms, self.allocation_independent_of_event, self.justification))


@dataclass(frozen=True)
class SimulationFile:
    dgp: DgpConfig | None
    mc: McSettings = field(default_factory=McSettings)
    report: ReportSettings = field(default_factory=ReportSettings)

    def require_dgp(self) -> DgpConfig:
        if self.dgp is None:
            raise ConfigurationError("configuration has no data-generating process (n, proportions, outcomes)")
        return self.dgp


_TOP_KEYS = {"n", "seed", "randomization", "proportions", "outcomes", "mc", "report"}
_DGP_KEYS = {"n", "seed", "randomization", "proportions", "outcomes"}


def _check_keys(section: dict, allowed, where: str) -> None:
    if not isinstance(section, dict):
        raise ConfigurationError(f"{where} must be a table")
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigurationError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")


def _distribution(d: dict, where: str):
    _check_keys(d, {"dist", "mean", "sd", "p"}, where)
    kind = d.get("dist")
    if kind == "normal":
        _check_keys(d, {"dist", "mean", "sd"}, where)
        if "mean" not in d:
            raise ConfigurationError(f"{where}: normal needs a mean")
        return Normal(float(d["mean"]), float(d.get("sd", 1.0)))
    if kind == "bernoulli":
        _check_keys(d, {"dist", "p"}, where)
        if "p" not in d:
            raise ConfigurationError(f"{where}: bernoulli needs p")
        return Bernoulli(float(d["p"]))
    raise ConfigurationError(f"{where}: dist must be 'normal' or 'bernoulli', got {kind!r}")


def config_from_dict(doc: dict) -> SimulationFile:
    _check_keys(doc, _TOP_KEYS, "configuration")
    dgp = None
    if _DGP_KEYS & set(doc):
        missing = {"n", "proportions", "outcomes"} - set(doc)
        if missing:
            raise ConfigurationError(f"configuration missing: {', '.join(sorted(missing))}")
        props = doc["proportions"]
        keys = [s.key for s in PrincipalStratum]
        _check_keys(props, keys, "[proportions]")
        if set(props) != set(keys):
            raise ConfigurationError(f"[proportions] needs all of {', '.join(keys)}")
        outcomes = doc["outcomes"]
        _check_keys(outcomes, keys, "[outcomes]")
        cells = {}
        for s in PrincipalStratum:
            if s.key not in outcomes:
                raise ConfigurationError(f"[outcomes.{s.key}] missing")
            _check_keys(outcomes[s.key], {"intervention", "control"}, f"[outcomes.{s.key}]")
            for arm in Arm:
                if arm.label not in outcomes[s.key]:
                    raise ConfigurationError(f"[outcomes.{s.key}] missing {arm.label}")
                cells[(s, arm)] = _distribution(outcomes[s.key][arm.label], f"[outcomes.{s.key}].{arm.label}")
        try:
            randomization = Randomization(doc.get("randomization", "complete"))
        except ValueError:
            raise ConfigurationError("randomization must be 'complete' or 'bernoulli'") from None
        dgp = DgpConfig(
            n=doc["n"],
            proportions=StratumProportions(*(float(props[k]) for k in keys)),
            outcomes=OutcomeSpec(cells),
            randomization=randomization,
            seed=doc.get("seed", 0),
        )
    mc = doc.get("mc", {})
    _check_keys(mc, {"replications", "alpha", "level", "grid"}, "[mc]")
    if "grid" in mc:
        mc = {**mc, "grid": tuple(float(g) for g in mc["grid"])}
    report = doc.get("report", {})
    _check_keys(report, ReportSettings.__dataclass_fields__, "[report]")
    for key, value in report.items():
        expected = bool if key in ("event_identifiable_both_arms", "allocation_independent_of_event") else str
        if not isinstance(value, expected):
            raise ConfigurationError(f"[report].{key} must be a {expected.__name__}")
    return SimulationFile(dgp, McSettings(**mc), ReportSettings(**report))


def load_config(path) -> SimulationFile:
    text = Path(path).read_text()
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    try:
        return config_from_dict(doc)
    except ConfigurationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{path}: {exc}") from None


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return repr(v)


def dump_config(cfg: DgpConfig) -> str:
    """TOML text for a :class:`DgpConfig` that :func:`load_config` reads back."""
    lines = [f"n = {cfg.n}", f"seed = {cfg.seed}", f'randomization = "{cfg.randomization.value}"', "",
             "[proportions]"]
    for s in PrincipalStratum:
        lines.append(f"{s.key} = {cfg.proportions[s]!r}")
    for s in PrincipalStratum:
        lines += ["", f"[outcomes.{s.key}]"]
        for arm in (Arm.INTERVENTION, Arm.CONTROL):
            d = cfg.outcomes.cell(s, arm).to_dict()
            body = ", ".join(f"{k} = {_toml_value(v)}" for k, v in d.items())
            lines.append(f"{arm.label} = {{ {body} }}")
    return "\n".join(lines) + "\n"
