from typing import Literal

import numpy as np
from pydantic import confloat

from coxperc.common.models import AppBaseModel

__all__ = ("Window", "Dimension")

Dimension = Literal[1, 2, 3]


class Window(AppBaseModel):
    """The box Q_L = [-L, L]^dim with a simulation pad of width ``margin``.

    Points are sampled on the padded box Q_{L+m}; observables are read on
    Q_L.
    """

    dim: Dimension
    half_width: confloat(gt=0)
    margin: confloat(ge=0) = 0.0

    @property
    def padded_half_width(self) -> float:
        return self.half_width + self.margin

    @property
    def volume(self) -> float:
        return (2 * self.half_width) ** self.dim

    @property
    def padded_volume(self) -> float:
        return (2 * self.padded_half_width) ** self.dim

    def inner(self) -> "Window":
        return Window(dim=self.dim, half_width=self.half_width, margin=0.0)

    def padded(self) -> "Window":
        return Window(dim=self.dim, half_width=self.padded_half_width)

    def with_margin(self, margin: float) -> "Window":
        return Window(dim=self.dim, half_width=self.half_width, margin=margin)

    def contains(self, points: np.ndarray, padded: bool = True) -> np.ndarray:
        bound = self.padded_half_width if padded else self.half_width
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        return np.all(np.abs(points) <= bound, axis=1)

    def contains_ball(
        self, center: np.ndarray, radius: float, padded: bool = True
    ) -> bool:
        """Whether B_radius(center) lies inside the (padded) box."""
        bound = self.padded_half_width if padded else self.half_width
        center = np.asarray(center, dtype=float).reshape(self.dim)
        return bool(np.all(np.abs(center) + radius <= bound))

    def lattice(self, half_width: float, pitch: float) -> np.ndarray:
        """Grid of pitch ``pitch`` covering [-half_width, half_width]^dim."""
        n = int(np.floor(2 * half_width / pitch + 1e-9)) + 1
        axis = -half_width + pitch * np.arange(n)
        if axis[-1] < half_width - 1e-12:
            axis = np.append(axis, half_width)
        mesh = np.meshgrid(*([axis] * self.dim), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)
