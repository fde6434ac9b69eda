"""Poisson-Delaunay and Poisson-Voronoi edge sets on a padded window."""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay

from coxperc.core.geometry import clip_segments
from coxperc.core.sampling import poisson_in_box
from coxperc.environments.exceptions import TessellationPadError

__all__ = ("Tessellation", "sample_tessellation", "circumcircles")

_logger = logging.getLogger("coxperc.environments")

# pad = PAD_CELLS expected cell diameters times PAD_SAFETY
PAD_CELLS = 6
PAD_SAFETY = 2
PAD_DOUBLINGS = 3


def circumcircles(triangles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Circumcenters and circumradii of triangles of shape (n, 3, 2)."""
    a, b, c = triangles[:, 0], triangles[:, 1], triangles[:, 2]
    ab, ac = b - a, c - a
    d = 2 * (ab[:, 0] * ac[:, 1] - ab[:, 1] * ac[:, 0])
    ab2 = np.sum(ab**2, axis=1)
    ac2 = np.sum(ac**2, axis=1)
    ux = (ac[:, 1] * ab2 - ab[:, 1] * ac2) / d
    uy = (ab[:, 0] * ac2 - ac[:, 0] * ab2) / d
    offset = np.stack([ux, uy], axis=1)
    return a + offset, np.linalg.norm(offset, axis=1)


def _box_distance(points: np.ndarray, half_width: float) -> np.ndarray:
    return np.linalg.norm(np.maximum(np.abs(points) - half_width, 0), axis=1)


@dataclass(frozen=True)
class Tessellation:
    generators: np.ndarray
    # half-width of the box the generators were sampled on
    sampled_half_width: float
    triangulation: Delaunay
    centers: np.ndarray
    radii: np.ndarray
    relevant: np.ndarray

    def delaunay_edges(self, half_width: float):
        simplices = self.triangulation.simplices[self.relevant]
        pairs = np.concatenate(
            [simplices[:, [0, 1]], simplices[:, [1, 2]], simplices[:, [0, 2]]]
        )
        pairs = np.unique(np.sort(pairs, axis=1), axis=0)
        starts = self.generators[pairs[:, 0]]
        ends = self.generators[pairs[:, 1]]
        return clip_segments(starts, ends, half_width)

    def voronoi_edges(self, half_width: float):
        """Segments between circumcenters of adjacent triangles."""
        neighbors = self.triangulation.neighbors
        own = np.repeat(np.arange(neighbors.shape[0]), 3)
        other = neighbors.ravel()
        keep = (other > own) & (self.relevant[own] | self.relevant[other])
        starts = self.centers[own[keep]]
        ends = self.centers[other[keep]]
        return clip_segments(starts, ends, half_width)


def _certify(
    points: np.ndarray, sampled: float, half_width: float, dual: bool
):
    tri = Delaunay(points)
    centers, radii = circumcircles(points[tri.simplices])
    certified = np.all(np.abs(centers) + radii[:, None] <= sampled, axis=1)
    relevant = _box_distance(centers, half_width) < radii
    needed = relevant.copy()
    if dual:
        # the dual edge of a relevant triangle ends at its neighbours
        neighbors = tri.neighbors[relevant]
        if np.any(neighbors < 0):
            return None
        needed[neighbors.ravel()] = True
    corners = np.array(
        [[s * half_width, t * half_width] for s in (-1, 1) for t in (-1, 1)]
    )
    if np.any(tri.find_simplex(corners) < 0) or not np.all(
        certified[needed]
    ):
        return None
    return Tessellation(points, sampled, tri, centers, radii, relevant)


def sample_tessellation(
    rng: np.random.Generator, mu: float, half_width: float, dual: bool
) -> Tessellation:
    """Driving Poisson process and a triangulation exact on Q_half_width.

    Triangles whose circumdisk meets Q_half_width (and for the Voronoi
    dual, their neighbours) must have circumdisks inside the sampled box.
    The pad doubles up to PAD_DOUBLINGS times by adding independent points
    on the enlarged annulus.
    """
    pad = PAD_CELLS * PAD_SAFETY / np.sqrt(mu)
    sampled = half_width + pad
    points = poisson_in_box(rng, mu, sampled, 2)
    for attempt in range(PAD_DOUBLINGS + 1):
        if points.shape[0] >= 3:
            result = _certify(points, sampled, half_width, dual)
            if result is not None:
                return result
        if attempt == PAD_DOUBLINGS:
            break
        pad *= 2
        enlarged = half_width + pad
        _logger.warning(
            "tessellation not certified on Q_%g, enlarging pad to %g",
            half_width,
            pad,
        )
        extra = poisson_in_box(rng, mu, enlarged, 2)
        extra = extra[np.any(np.abs(extra) > sampled, axis=1)]
        points = np.concatenate([points, extra])
        sampled = enlarged
    raise TessellationPadError(pad)
