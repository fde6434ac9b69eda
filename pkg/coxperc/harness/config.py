import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Literal, Optional, Union

import orjson
from pydantic import (
    Field,
    ValidationError,
    confloat,
    conint,
    root_validator,
    validator,
)

from coxperc.common.models import AppBaseModel
from coxperc.core.radius_law import ConstantLaw, RadiusLaw
from coxperc.core.window import Dimension
from coxperc.environments import EnvironmentSpec, HomogeneousSpec
from coxperc.harness.exceptions import ConfigError

__all__ = (
    "ExperimentConfig",
    "ExperimentKind",
    "WindowBlock",
    "OutputBlock",
    "EstimatorBlock",
    "load_config",
    "parse_config",
)

_logger = logging.getLogger("coxperc.harness")

ExperimentKind = Literal[
    "vacant_probability",
    "percolation_curve",
    "critical_intensity",
    "moment_ladder",
    "deviation_tail",
    "scaling_recursion",
    "uniqueness",
    "one_dim_triviality",
    "phi_hat",
    "zero_critical_intensity",
    "subcritical_decay",
    "connectedness_audit",
    "clustering_oracle",
    "diameter_oracle",
    "volume_oracle",
]

# settings each kind cannot run without, as dotted paths
REQUIRED: dict[str, tuple[str, ...]] = {
    "vacant_probability": ("lambda",),
    "percolation_curve": ("lambda", "window.half_width"),
    "critical_intensity": ("window.half_width",),
    "moment_ladder": ("lambda", "window.ladder"),
    "deviation_tail": ("estimator.c",),
    "scaling_recursion": ("lambda", "estimator.alphas"),
    "uniqueness": ("lambda", "window.ladder"),
    "one_dim_triviality": ("lambda", "window.ladder"),
    "phi_hat": ("estimator.alphas", "estimator.grid_step"),
    "zero_critical_intensity": ("window.half_width",),
    "subcritical_decay": ("window.ladder",),
    "connectedness_audit": ("estimator.r", "estimator.alpha"),
}
SCALAR_LAMBDA = {
    "moment_ladder",
    "scaling_recursion",
    "uniqueness",
    "one_dim_triviality",
}

Positive = confloat(gt=0)


class WindowBlock(AppBaseModel):
    dim: Dimension = 2
    half_width: Optional[Positive] = None
    margin: confloat(ge=0) = 0.0
    ladder: Optional[list[Positive]] = None

    @validator("ladder")
    def _increasing(cls, ladder):
        if ladder is not None:
            if not ladder:
                raise ValueError("must not be empty")
            if any(b <= a for a, b in zip(ladder, ladder[1:])):
                raise ValueError("must be strictly increasing")
        return ladder


class OutputBlock(AppBaseModel):
    directory: Optional[Path] = None
    stem: Optional[str] = Field(default=None, regex=r"^[\w.-]+$")


class EstimatorBlock(AppBaseModel):
    s: Positive = 1.0
    c: Optional[Positive] = None
    alphas: Optional[list[Positive]] = None
    a_max: Optional[confloat(gt=1)] = None
    betas: list[Positive] = [1.0]
    tolerance: Positive = 0.01
    variant: Literal["point", "ball"] = "point"
    observable: Literal["volume", "diameter", "count"] = "diameter"
    grid_step: Optional[Positive] = None
    fraction: Optional[confloat(gt=0, le=1)] = None
    critical: Optional[Positive] = None
    allow_supercritical: bool = False
    phi_replicates: Optional[conint(ge=1)] = None
    volume_samples: Optional[conint(ge=1000)] = None
    exact_step: Positive = 0.01
    r: Optional[Positive] = None
    alpha: Optional[Positive] = None
    n_max: conint(ge=1) = 200
    dims: list[Dimension] = [1, 2, 3]
    pitch: Positive = 1e-3
    n_samples: conint(ge=1000) = 10**6


class ExperimentConfig(AppBaseModel):
    """A validated experiment; every field has its default filled in."""

    kind: ExperimentKind
    description: str = ""
    environment: EnvironmentSpec = Field(
        HomogeneousSpec(), discriminator="kind"
    )
    radius_law: RadiusLaw = Field(ConstantLaw(r=1.0), discriminator="kind")
    intensity: Optional[
        Union[confloat(ge=0), list[confloat(ge=0)]]
    ] = Field(None, alias="lambda")
    window: WindowBlock = WindowBlock()
    replicates: conint(ge=1) = 100
    seed: conint(ge=0, le=2**64 - 1) = 0
    output: OutputBlock = OutputBlock()
    estimator: EstimatorBlock = EstimatorBlock()

    class Config:
        allow_population_by_field_name = True

    @validator("radius_law")
    def _some_radius(cls, law):
        if float(law.survival(0.0)) <= 0:
            raise ValueError("P(ρ > 0) must be positive")
        return law

    @validator("intensity")
    def _sorted_grid(cls, value):
        if isinstance(value, list):
            if not value:
                raise ValueError("must not be empty")
            if any(b < a for a, b in zip(value, value[1:])):
                raise ValueError("grid must be sorted")
        return value

    @root_validator(skip_on_failure=True)
    def _kind_requirements(cls, values):
        kind = values["kind"]
        for path in REQUIRED.get(kind, ()):
            if _lookup(values, path) is None:
                raise ValueError(f"{path} is required for {kind}")
        intensity = values.get("intensity")
        if kind in SCALAR_LAMBDA and isinstance(intensity, list):
            if len(intensity) != 1:
                raise ValueError(f"{kind} takes a single lambda")
            values["intensity"] = intensity[0]
        estimator = values["estimator"]
        if kind == "deviation_tail" and not (
            estimator.alphas or estimator.a_max
        ):
            raise ValueError("deviation_tail needs alphas or a_max")
        dim = values["window"].dim
        if kind == "one_dim_triviality" and dim != 1:
            raise ValueError("one_dim_triviality runs in dimension 1")
        if not values["environment"].supports_dim(dim):
            raise ValueError(
                f"environment {values['environment'].kind} does not support "
                f"dimension {dim}"
            )
        return values

    @property
    def intensities(self) -> list[float]:
        if isinstance(self.intensity, list):
            return list(self.intensity)
        return [] if self.intensity is None else [self.intensity]

    def echo(self) -> dict:
        """The config as plain JSON data, defaults included."""
        return orjson.loads(self.json(by_alias=True))


def _lookup(values: dict, path: str):
    head, _, rest = path.partition(".")
    key = "intensity" if head == "lambda" else head
    value = values.get(key)
    if rest and value is not None:
        return getattr(value, rest)
    return value


def _describe(error: ValidationError) -> list[str]:
    problems = []
    for item in error.errors():
        location = ".".join(
            "lambda" if part == "intensity" else str(part)
            for part in item["loc"]
            if part != "__root__"
        )
        location = location or "config"
        problems.append(f"{location}: {item['msg']}")
    return problems


def parse_config(data: dict) -> ExperimentConfig:
    try:
        return ExperimentConfig.parse_obj(data)
    except ValidationError as e:
        raise ConfigError(_describe(e)) from e


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fp:
            data = tomllib.load(fp)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError([f"{path.name}: {e}"]) from e
    _logger.debug("loaded config %s", path)
    return parse_config(data)
