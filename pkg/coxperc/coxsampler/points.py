from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from coxperc.common.tables import Target, write_rows
from coxperc.core.exceptions import DimensionMismatch, InvalidParameter
from coxperc.core.window import Window

__all__ = ("MarkedPointSet",)


@dataclass(frozen=True)
class MarkedPointSet:
    """Cox points X_i with i.i.d. radii ρ_i on a padded window."""

    points: np.ndarray
    radii: np.ndarray
    window: Window
    intensity: float = 0.0
    env_seed: Optional[int] = None
    mark_seed: Optional[int] = None

    def __post_init__(self):
        if self.points.ndim != 2 or self.points.shape[1] != self.window.dim:
            raise DimensionMismatch(
                self.window.dim,
                self.points.shape[1] if self.points.ndim == 2 else 0,
            )
        if self.points.shape[0] != self.radii.shape[0]:
            raise InvalidParameter(
                "radii", "need exactly one radius per point"
            )
        if np.any(self.radii < 0):
            raise InvalidParameter("radii", "must be nonnegative")
        if not np.all(self.window.contains(self.points)):
            raise InvalidParameter(
                "points", "must lie inside the padded window"
            )

    @classmethod
    def from_arrays(
        cls,
        points,
        radii,
        window: Optional[Window] = None,
        intensity: float = 0.0,
    ) -> "MarkedPointSet":
        """Hand-built configuration; the default window is the smallest
        box around all balls.
        """
        radii = np.asarray(radii, dtype=float).reshape(-1)
        if window is None:
            points = np.asarray(points, dtype=float)
            dim = points.shape[1] if points.ndim == 2 else 1
            points = points.reshape(-1, dim)
            reach = np.abs(points) + radii[:, None] if radii.size else [1.0]
            window = Window(dim=dim, half_width=max(1.0, float(np.max(reach))))
        points = np.asarray(points, dtype=float).reshape(-1, window.dim)
        return cls(points, radii, window, intensity)

    @property
    def dim(self) -> int:
        return self.window.dim

    def __len__(self):
        return self.points.shape[0]

    def restrict(self, window: Window) -> "MarkedPointSet":
        """The points whose centers fall inside ``window`` (padded)."""
        keep = window.contains(self.points)
        return replace(
            self,
            points=self.points[keep],
            radii=self.radii[keep],
            window=window,
        )

    def to_csv(self, target: Target) -> None:
        header = [f"x{k + 1}" for k in range(self.dim)] + ["radius"]
        rows = (
            [*p, r] for p, r in zip(self.points.tolist(), self.radii.tolist())
        )
        write_rows(target, header, rows)
