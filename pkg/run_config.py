"""Run configuration: the system description, caps, sample sizes and suite selection."""
import hashlib
import json
import logging
import os
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Optional, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, ValidationError, field_validator

from checks import SUITE_GROUPS
from construction.bd_system import PRESETS
from construction.linf_core import as_fraction

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "BD_NETS_OUTPUT_DIR"
WORKERS_ENV = "BD_NETS_WORKERS"


def _rational(value) -> Fraction:
    try:
        return as_fraction(value)
    except TypeError as e:
        raise ValueError(str(e)) from e


# Exact rationals: ints or "p/q" strings in, "p/q" strings out.
RationalField = Annotated[
    Fraction,
    BeforeValidator(_rational),
    PlainSerializer(lambda q: str(q), return_type=str, when_used="json"),
]


class ConfigError(ValueError):
    """A configuration file that cannot be parsed or validated."""


class SystemConfig(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid")

    name: Optional[str] = None
    stages: list[Annotated[int, Field(ge=1)]] = Field(min_length=1)
    extension: Union[str, list[dict[int, list[RationalField]]]] = "zero"
    lambda_bar: Annotated[int, Field(ge=1)]
    n_max: Optional[Annotated[int, Field(ge=1)]] = None
    coefficient: RationalField = Fraction(1, 2)

    @field_validator("stages")
    @classmethod
    def stages_increase(cls, stages: list[int]) -> list[int]:
        for prev, nxt in zip(stages, stages[1:]):
            if nxt <= prev:
                raise ValueError(f"stage sizes must be strictly increasing, got {prev} then {nxt}")
        return stages

    @field_validator("extension")
    @classmethod
    def known_preset(cls, extension):
        if isinstance(extension, str) and extension not in PRESETS:
            raise ValueError(f"unknown preset {extension!r}; expected one of {', '.join(PRESETS)}")
        return extension


class CapsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    max_block: Annotated[int, Field(gt=0)] = 10**6
    max_shell: Annotated[int, Field(gt=0)] = 10**6
    max_table: Annotated[int, Field(gt=0)] = 10**7
    compatibility_sample: Annotated[int, Field(gt=0)] = 10**4
    ambient_sample: Annotated[int, Field(gt=0)] = 20_000


class SampleConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    elementary: Annotated[int, Field(ge=0)] = 20
    pairs: Annotated[int, Field(ge=0)] = 20
    random: Annotated[int, Field(ge=0)] = 20
    max_support: Annotated[int, Field(ge=2)] = 4
    prefix_indices: Annotated[int, Field(ge=2)] = 12
    dual_crosscheck_support: Annotated[int, Field(ge=0)] = 3
    net_molecules: Annotated[int, Field(ge=0)] = 20
    core_vectors: Annotated[int, Field(gt=0)] = 200


class RunConfig(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid")

    system: SystemConfig
    depth: Annotated[int, Field(ge=1)] = 2
    a: RationalField = Fraction(2)
    caps: CapsConfig = Field(default_factory=CapsConfig)
    samples: SampleConfig = Field(default_factory=SampleConfig)
    seed: int = 0
    output_dir: str = "output"
    suites: Optional[list[str]] = None
    workers: Annotated[int, Field(ge=1)] = 1
    decimal_columns: bool = False

    @field_validator("a")
    @classmethod
    def a_exceeds_one(cls, a: Fraction) -> Fraction:
        if a <= 1:
            raise ValueError(f"the net parameter a must exceed 1, got {a}")
        return a

    @field_validator("suites")
    @classmethod
    def known_groups(cls, suites: Optional[list[str]]) -> Optional[list[str]]:
        if suites is None:
            return None
        unknown = [s for s in suites if s not in SUITE_GROUPS]
        if unknown:
            raise ValueError(f"unknown suite groups {unknown}; expected some of {', '.join(SUITE_GROUPS)}")
        return suites

    @property
    def selected_groups(self) -> tuple[str, ...]:
        if self.suites is None:
            return SUITE_GROUPS
        return tuple(g for g in SUITE_GROUPS if g in self.suites)


def _describe_validation(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        path = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{path}: {item['msg']}")
    return "; ".join(lines)


def parse_run_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse and validate a JSON configuration document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{source}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"{source}: {_describe_validation(e)}") from e


def apply_env_overrides(config: RunConfig) -> RunConfig:
    """BD_NETS_OUTPUT_DIR and BD_NETS_WORKERS take precedence over the file."""
    updates = {}
    output_dir = os.getenv(OUTPUT_DIR_ENV)
    if output_dir:
        updates["output_dir"] = output_dir
    workers = os.getenv(WORKERS_ENV)
    if workers:
        try:
            updates["workers"] = int(workers)
        except ValueError as e:
            raise ConfigError(f"{WORKERS_ENV}={workers!r} is not an integer") from e
        if updates["workers"] < 1:
            raise ConfigError(f"{WORKERS_ENV} must be at least 1, got {workers}")
    if updates:
        logger.info(f"Environment overrides: {updates}")
        config = config.model_copy(update=updates)
    return config


def load_run_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    config = apply_env_overrides(parse_run_config(text, str(path)))
    logger.info(f"✓ Loaded run configuration from {path}")
    return config


def canonical_json(config: RunConfig) -> str:
    """The configuration fields that determine the run's results, as sorted compact JSON."""
    data = config.model_dump(mode="json", exclude={"output_dir", "workers"})
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def run_id(config: RunConfig) -> str:
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()[:16]
