import math
from typing import ClassVar, Literal, Optional, Union

from pydantic import Field, confloat, root_validator, validator

from coxperc.common.models import AppBaseModel
from coxperc.core.exceptions import InvalidParameter
from coxperc.core.geometry import unit_ball_volume
from coxperc.core.radius_law import RadiusLaw, RadiusLawField

__all__ = (
    "HomogeneousSpec",
    "TwoPointZ",
    "ParetoZ",
    "MixedPoissonSpec",
    "IndicatorFieldSpec",
    "ShotNoiseSpec",
    "BooleanCountSpec",
    "VoronoiEdgesSpec",
    "DelaunayEdgesSpec",
    "ManhattanGridSpec",
    "EnvironmentSpec",
    "EnvironmentSpecField",
)

StabilizationKind = Literal["b_dependent", "stabilizing", "none"]


class _EnvironmentSpecBase(AppBaseModel):
    """Common interface of the directing-measure variants.

    ``normalization(dim)`` is the constant that makes
    E[Λ([0,1]^dim)] = 1; every realization stores the constant it used.
    """

    # field reported by ``radius_field``, if any
    radius_field_kind: ClassVar[Optional[str]] = None

    def supports_dim(self, dim: int) -> bool:
        return dim in (1, 2, 3)

    def normalization(self, dim: int) -> float:
        raise NotImplementedError

    @property
    def influence_range(self) -> Optional[float]:
        """Dependence range b when the variant is b-dependent."""
        return None

    @property
    def stabilization(self) -> StabilizationKind:
        return "b_dependent" if self.influence_range is not None else "none"

    def required_margin(self, dim: int) -> float:
        return self.influence_range or 0.0

    @property
    def has_radius_field(self) -> bool:
        return self.radius_field_kind is not None


class HomogeneousSpec(_EnvironmentSpecBase):
    kind: Literal["homogeneous"] = "homogeneous"

    def normalization(self, dim):
        return 1.0

    @property
    def stabilization(self):
        return "b_dependent"

    @property
    def influence_range(self):
        return 0.0


class TwoPointZ(AppBaseModel):
    """Z = z1 with probability p1, z2 otherwise."""

    kind: Literal["two_point"] = "two_point"
    z1: confloat(ge=0)
    p1: confloat(ge=0, le=1)
    z2: confloat(ge=0)

    @property
    def mean(self) -> float:
        return self.p1 * self.z1 + (1 - self.p1) * self.z2

    def atoms(self) -> list[tuple[float, float]]:
        return [(self.z1, self.p1), (self.z2, 1 - self.p1)]

    def upper(self, survival: float) -> float:
        return max(z for z, p in self.atoms() if p > 0)

    def sample(self, rng) -> float:
        return self.z1 if rng.random() < self.p1 else self.z2

    @root_validator(skip_on_failure=True)
    def _positive_mean(cls, values):
        p1 = values["p1"]
        if p1 * values["z1"] + (1 - p1) * values["z2"] <= 0:
            raise ValueError("E[Z] must be positive")
        return values


class ParetoZ(AppBaseModel):
    """Pareto Z with tail index ``tail`` and scale (tail - 1) / tail."""

    kind: Literal["pareto"] = "pareto"
    tail: confloat(gt=1)

    @property
    def scale(self) -> float:
        return (self.tail - 1) / self.tail

    @property
    def mean(self) -> float:
        return self.tail * self.scale / (self.tail - 1)

    def survival(self, z: float) -> float:
        if z < self.scale:
            return 1.0
        return (self.scale / z) ** self.tail

    def upper(self, survival: float) -> float:
        """The level exceeded with probability ``survival``."""
        return self.scale * survival ** (-1.0 / self.tail)

    def sample(self, rng) -> float:
        return self.scale * (1.0 - rng.random()) ** (-1.0 / self.tail)


MixingLaw = Union[TwoPointZ, ParetoZ]


class MixedPoissonSpec(_EnvironmentSpecBase):
    kind: Literal["mixed_poisson"] = "mixed_poisson"
    z: MixingLaw = Field(..., discriminator="kind")

    def normalization(self, dim):
        return 1.0 / self.z.mean


class IndicatorFieldSpec(_EnvironmentSpecBase):
    """ℓ_x = λ1 on the driving Boolean model Ξ and λ2 off it, scaled."""

    kind: Literal["indicator_field"] = "indicator_field"
    lambda1: confloat(ge=0)
    lambda2: confloat(ge=0)
    mu: confloat(gt=0)
    radius: confloat(gt=0)
    grid_step: Optional[confloat(gt=0)] = None

    @root_validator(skip_on_failure=True)
    def _some_mass(cls, values):
        if values["lambda1"] == 0 and values["lambda2"] == 0:
            raise ValueError("lambda1 and lambda2 cannot both be zero")
        return values

    def coverage(self, dim: int) -> float:
        """P(x ∈ Ξ)."""
        return 1.0 - math.exp(
            -self.mu * unit_ball_volume(dim) * self.radius**dim
        )

    def normalization(self, dim):
        p = self.coverage(dim)
        return 1.0 / (self.lambda1 * p + self.lambda2 * (1 - p))

    @property
    def influence_range(self):
        return 2 * self.radius

    @property
    def step(self) -> float:
        return self.grid_step or self.radius / 20


class ShotNoiseSpec(_EnvironmentSpecBase):
    """Top-hat kernel κ = height · 1{|x| < support_radius}."""

    kind: Literal["shot_noise"] = "shot_noise"
    height: confloat(gt=0)
    support_radius: confloat(gt=0)
    mu: confloat(gt=0)

    def normalization(self, dim):
        return 1.0 / (
            self.mu
            * self.height
            * unit_ball_volume(dim)
            * self.support_radius**dim
        )

    @property
    def influence_range(self):
        return 2 * self.support_radius


class BooleanCountSpec(_EnvironmentSpecBase):
    """ℓ_x = scale · #{driving balls covering x}."""

    kind: Literal["boolean_count"] = "boolean_count"
    mu: confloat(gt=0)
    radius_law: RadiusLaw = RadiusLawField
    scale: Optional[confloat(gt=0)] = None
    radius_field_kind: ClassVar[Optional[str]] = "stabilization"

    @validator("radius_law")
    def _finite_volume(cls, law):
        if law.survival(0.0) <= 0:
            raise ValueError("P(ρ > 0) must be positive")
        return law

    def normalization(self, dim):
        mean_volume = (
            self.mu * unit_ball_volume(dim) * self.radius_law.moment(dim)
        )
        if not math.isfinite(mean_volume):
            raise InvalidParameter(
                "radius_law", f"the moment of order {dim} is infinite"
            )
        return 1.0 / mean_volume

    def checked_scale(self, dim: int) -> float:
        expected = self.normalization(dim)
        if self.scale is not None and not math.isclose(
            self.scale, expected, rel_tol=1e-6
        ):
            raise InvalidParameter(
                "scale",
                f"{self.scale:g} does not normalize the field "
                f"(expected {expected:g})",
            )
        return expected

    @property
    def influence_range(self):
        law = self.radius_law
        return law.esssup if law.is_bounded() else None


class _TessellationSpec(_EnvironmentSpecBase):
    mu: confloat(gt=0)
    radius_field_kind: ClassVar[Optional[str]] = "stabilization"

    def supports_dim(self, dim):
        return dim == 2

    @property
    def stabilization(self):
        return "stabilizing"

    @property
    def cell_diameter(self) -> float:
        return 1.0 / math.sqrt(self.mu)


class VoronoiEdgesSpec(_TessellationSpec):
    kind: Literal["voronoi_edges"] = "voronoi_edges"

    def normalization(self, dim):
        # edge length per unit area of a Poisson-Voronoi tessellation
        return 1.0 / (2 * math.sqrt(self.mu))


class DelaunayEdgesSpec(_TessellationSpec):
    kind: Literal["delaunay_edges"] = "delaunay_edges"

    def normalization(self, dim):
        # edge length per unit area of a Poisson-Delaunay triangulation
        return 3 * math.pi / (32 * math.sqrt(self.mu))


class ManhattanGridSpec(_EnvironmentSpecBase):
    kind: Literal["manhattan_grid"] = "manhattan_grid"
    vertical_intensity: confloat(gt=0)
    horizontal_intensity: confloat(gt=0)
    radius_field_kind: ClassVar[Optional[str]] = "connectivity"

    def supports_dim(self, dim):
        return dim == 2

    def normalization(self, dim):
        return 1.0 / (self.vertical_intensity + self.horizontal_intensity)


EnvironmentSpec = Union[
    HomogeneousSpec,
    MixedPoissonSpec,
    IndicatorFieldSpec,
    ShotNoiseSpec,
    BooleanCountSpec,
    VoronoiEdgesSpec,
    DelaunayEdgesSpec,
    ManhattanGridSpec,
]
EnvironmentSpecField = Field(..., discriminator="kind")
