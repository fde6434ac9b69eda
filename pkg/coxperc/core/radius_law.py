import logging
import math
from typing import Callable, Literal, Optional, Union

import numpy as np
from pydantic import Field, confloat, root_validator
from scipy import integrate

from coxperc.common.models import AppBaseModel
from coxperc.core.exceptions import InvalidParameter
from coxperc.core.geometry import unit_ball_volume

__all__ = (
    "ConstantLaw",
    "ExponentialLaw",
    "ParetoLaw",
    "TwoPointLaw",
    "IntegerTailLaw",
    "RadiusLaw",
    "sample_radius",
    "law_moment",
)

_logger = logging.getLogger("coxperc.core")

# truncation point of the IntegerTail series; the remainder is added in
# closed form from the integral of the tail density
_SERIES_TERMS = 10**6

Integrand = Callable[[np.ndarray], np.ndarray]


class _LawBase(AppBaseModel):
    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def moment(self, k: float) -> float:
        raise NotImplementedError

    def survival(self, t):
        """P(ρ > t), vectorized."""
        raise NotImplementedError

    def expect(self, fn: Integrand, lower: float = 0.0) -> float:
        """E[fn(ρ); ρ >= lower]."""
        raise NotImplementedError

    @property
    def esssup(self) -> float:
        return math.inf

    def tail_power_integral(self, lower: float, power: float) -> float:
        """∫_{[lower, ∞)} r^power ν(dr)."""
        return self.expect(lambda r: np.power(r, power), lower)

    def is_bounded(self) -> bool:
        return math.isfinite(self.esssup)


class ConstantLaw(_LawBase):
    kind: Literal["constant"] = "constant"
    # r = 0 is the degenerate law without balls; configs reject it
    r: confloat(ge=0)

    def sample(self, rng, size=None):
        if size is None:
            return float(self.r)
        return np.full(size, float(self.r))

    def moment(self, k):
        return float(self.r) ** k

    def survival(self, t):
        return np.where(np.asarray(t) < self.r, 1.0, 0.0)

    def expect(self, fn, lower=0.0):
        return float(fn(np.asarray(self.r))) if self.r >= lower else 0.0

    @property
    def esssup(self):
        return float(self.r)


class ExponentialLaw(_LawBase):
    kind: Literal["exponential"] = "exponential"
    rate: confloat(gt=0)

    def sample(self, rng, size=None):
        value = rng.exponential(1.0 / self.rate, size)
        return float(value) if size is None else value

    def moment(self, k):
        return math.gamma(k + 1) / self.rate**k

    def survival(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t < 0, 1.0, np.exp(-self.rate * np.maximum(t, 0)))

    def expect(self, fn, lower=0.0):
        lower = max(lower, 0.0)
        value, _ = integrate.quad(
            lambda r: float(fn(np.asarray(r)))
            * self.rate
            * math.exp(-self.rate * r),
            lower,
            math.inf,
            limit=200,
        )
        return value


class ParetoLaw(_LawBase):
    """Survival P(ρ > t) = (scale / t)^tail for t >= scale."""

    kind: Literal["pareto"] = "pareto"
    scale: confloat(gt=0)
    tail: confloat(gt=0)

    def sample(self, rng, size=None):
        u = rng.random(size)
        value = self.scale * np.power(1.0 - u, -1.0 / self.tail)
        return float(value) if size is None else value

    def moment(self, k):
        if k >= self.tail:
            return math.inf
        return self.tail * self.scale**k / (self.tail - k)

    def survival(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            tail = np.power(self.scale / np.maximum(t, self.scale), self.tail)
        return np.where(t < self.scale, 1.0, tail)

    def expect(self, fn, lower=0.0):
        lower = max(lower, self.scale)
        density = (
            lambda r: self.tail * self.scale**self.tail * r ** (-self.tail - 1)
        )
        # split at a finite point so quad sees the heavy tail separately
        middle = lower * 16
        head, _ = integrate.quad(
            lambda r: float(fn(np.asarray(r))) * density(r),
            lower,
            middle,
            limit=200,
        )
        tail, _ = integrate.quad(
            lambda r: float(fn(np.asarray(r))) * density(r),
            middle,
            math.inf,
            limit=200,
        )
        return head + tail

    def tail_power_integral(self, lower, power):
        if power >= self.tail:
            return math.inf
        lower = max(lower, self.scale)
        return (
            self.tail
            * self.scale**self.tail
            * lower ** (power - self.tail)
            / (self.tail - power)
        )


class TwoPointLaw(_LawBase):
    """ρ = r1 with probability p1, r2 otherwise."""

    kind: Literal["two_point"] = "two_point"
    r1: confloat(gt=0)
    p1: confloat(gt=0, le=1)
    r2: confloat(gt=0)

    def sample(self, rng, size=None):
        u = rng.random(size)
        value = np.where(u < self.p1, self.r1, self.r2)
        return float(value) if size is None else value

    def moment(self, k):
        return self.p1 * self.r1**k + (1 - self.p1) * self.r2**k

    def survival(self, t):
        t = np.asarray(t, dtype=float)
        return self.p1 * (t < self.r1) + (1 - self.p1) * (t < self.r2)

    def expect(self, fn, lower=0.0):
        total = 0.0
        for r, p in ((self.r1, self.p1), (self.r2, 1 - self.p1)):
            if r >= lower and p > 0:
                total += p * float(fn(np.asarray(r)))
        return total

    @property
    def esssup(self):
        return self.r1 if self.p1 == 1 else max(self.r1, self.r2)


class IntegerTailLaw(_LawBase):
    """ℕ-valued radius with P(ρ >= n) = n^(-tail), n = 1, 2, ..."""

    kind: Literal["integer_tail"] = "integer_tail"
    tail: confloat(gt=0)

    def sample(self, rng, size=None):
        u = 1.0 - rng.random(size)
        value = np.floor(np.power(u, -1.0 / self.tail))
        return float(value) if size is None else value

    def _pmf(self, n: np.ndarray) -> np.ndarray:
        return np.power(n, -self.tail) - np.power(n + 1.0, -self.tail)

    def moment(self, k):
        if k >= self.tail:
            return math.inf
        n = np.arange(1, _SERIES_TERMS + 1, dtype=float)
        head = float(np.sum(np.power(n, k) * self._pmf(n)))
        # ∫_N^∞ x^k τ x^(-τ-1) dx
        rest = self.tail * _SERIES_TERMS ** (k - self.tail) / (self.tail - k)
        return head + rest

    def survival(self, t):
        t = np.asarray(t, dtype=float)
        n = np.floor(t) + 1
        return np.where(t < 1, 1.0, np.power(np.maximum(n, 1), -self.tail))

    def expect(self, fn, lower=0.0):
        start = max(1, math.ceil(lower))
        n = np.arange(start, start + _SERIES_TERMS, dtype=float)
        return float(np.sum(fn(n) * self._pmf(n)))


RadiusLaw = Union[
    ConstantLaw, ExponentialLaw, ParetoLaw, TwoPointLaw, IntegerTailLaw
]
RadiusLawField = Field(..., discriminator="kind")


class RadiusLawHolder(AppBaseModel):
    law: RadiusLaw = RadiusLawField

    @root_validator(skip_on_failure=True)
    def _positive_radius(cls, values):
        law = values["law"]
        if law.survival(0.0) <= 0:
            raise ValueError("P(ρ > 0) must be positive")
        return values


def parse_law(data: Union[dict, RadiusLaw]) -> RadiusLaw:
    if not isinstance(data, dict):
        return data
    return RadiusLawHolder(law=data).law


def sample_radius(law: RadiusLaw, rng: np.random.Generator) -> float:
    return law.sample(rng)


def law_moment(law: RadiusLaw, k: float) -> float:
    if k <= 0:
        raise InvalidParameter("k", "moment order must be positive")
    return law.moment(k)


def covering_range(
    law: RadiusLaw, intensity: float, dim: int, tolerance: float = 1e-4
) -> Optional[float]:
    """Radius R beyond which balls reach the origin with mass < tolerance.

    Expected number of balls centered outside B_R that cover the origin
    is intensity * v_d * E[(ρ^d - R^d)^+]; returns ``None`` when E[ρ^d]
    is infinite.
    """
    if law.is_bounded():
        return law.esssup
    if not math.isfinite(law.moment(dim)):
        return None
    v_d = unit_ball_volume(dim)
    radius = 1.0
    while True:
        excess = law.expect(
            lambda r, R=radius: np.maximum(np.power(r, dim) - R**dim, 0.0),
            radius,
        )
        if intensity * v_d * excess < tolerance:
            return radius
        radius *= 2
