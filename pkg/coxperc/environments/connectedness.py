import logging
import math
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components
from scipy.spatial import cKDTree

from coxperc.common.models import AppBaseModel
from coxperc.core.exceptions import InvalidParameter
from coxperc.core.geometry import clip_segments
from coxperc.environments.exceptions import WindowTooSmall
from coxperc.environments.radius_field import radius_field
from coxperc.environments.realization import (
    DensityGrid,
    EnvRealization,
    Scalar,
    SegmentSet,
    count_covering,
)

__all__ = (
    "ConnectednessReport",
    "essential_connectedness_audit",
    "support_nodes",
)

_logger = logging.getLogger("coxperc.environments")


class ConnectednessReport(AppBaseModel):
    """Outcome of one audit.

    ``precondition_held`` is ``None`` when the variant has no
    connectivity field and the precondition cannot be evaluated.
    """

    r: float
    alpha: float
    precondition_held: Optional[bool]
    sup_radius: Optional[float]
    connected: bool
    support_nodes: int
    target_nodes: int
    witness_path: Optional[list[list[float]]] = None
    failing_pair: Optional[list[list[float]]] = None


def _lattice(dim: int, half_width: float, pitch: float) -> np.ndarray:
    n = int(math.floor(2 * half_width / pitch + 1e-9)) + 1
    axis = np.linspace(-half_width, half_width, n)
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _segment_nodes(rep: SegmentSet, half_width: float, pitch: float):
    starts, ends = clip_segments(rep.starts, rep.ends, half_width)
    nodes = []
    for start, end in zip(starts, ends):
        count = int(math.ceil(np.linalg.norm(end - start) / pitch)) + 1
        t = np.linspace(0.0, 1.0, count)[:, None]
        nodes.append(start + t * (end - start))
    if not nodes:
        return np.empty((0, rep.starts.shape[1]))
    return np.concatenate(nodes)


def support_nodes(
    env: EnvRealization, r: float, half_width: float
) -> np.ndarray:
    """Points of supp Λ ∩ Q_half_width spaced well below ``r``."""
    pitch = r / 4
    rep = env.representation
    dim = env.dim
    if isinstance(rep, SegmentSet):
        return _segment_nodes(rep, half_width, pitch)
    if isinstance(rep, Scalar):
        if rep.z > 0:
            return _lattice(dim, half_width, pitch)
        return np.empty((0, dim))
    if isinstance(rep, DensityGrid):
        if rep.constant is not None:
            if rep.constant > 0:
                return _lattice(dim, half_width, pitch)
            return np.empty((0, dim))
        if rep.step <= r / 2:
            centers = rep.cell_centers()
            inside = np.all(np.abs(centers) <= half_width, axis=1)
            centers = centers[inside]
            return centers[rep.value_at(centers) > 0]
        lattice = _lattice(dim, half_width, pitch)
        return lattice[rep.value_at(lattice) > 0]
    lattice = _lattice(dim, half_width, pitch)
    if rep.weight <= 0:
        return np.empty((0, dim))
    return lattice[count_covering(rep.centers, rep.radii, lattice) > 0]


def _pair(nodes, source: int, target: int) -> list[list[float]]:
    return [nodes[source].tolist(), nodes[target].tolist()]


def essential_connectedness_audit(
    env: EnvRealization, r: float, alpha: float
) -> ConnectednessReport:
    """Check that supp Λ ∩ Q_alpha is linked by hops shorter than ``r``
    through supp Λ ∩ Q_{2 alpha}.
    """
    if r <= 0 or alpha <= 0:
        raise InvalidParameter("r", "r and alpha must be positive")
    if 2 * alpha > env.window.padded_half_width:
        raise WindowTooSmall(2 * alpha, env.window.padded_half_width)

    precondition: Optional[bool] = None
    sup_radius: Optional[float] = None
    spec = env.spec
    if spec is not None and spec.radius_field_kind == "connectivity":
        field = radius_field(env)
        sup_radius = field.supremum(_lattice(env.dim, 2 * alpha, r / 4))
        precondition = bool(sup_radius < alpha / 2)
        if not math.isfinite(sup_radius):
            sup_radius = None

    nodes = support_nodes(env, r, 2 * alpha)
    targets = np.flatnonzero(np.all(np.abs(nodes) <= alpha, axis=1))
    report = dict(
        r=r,
        alpha=alpha,
        precondition_held=precondition,
        sup_radius=sup_radius,
        support_nodes=int(nodes.shape[0]),
        target_nodes=int(targets.size),
    )
    if targets.size <= 1:
        return ConnectednessReport(connected=True, **report)

    pairs = cKDTree(nodes).query_pairs(r, output_type="ndarray")
    if pairs.size:
        gaps = np.linalg.norm(
            nodes[pairs[:, 0]] - nodes[pairs[:, 1]], axis=1
        )
        pairs = pairs[gaps < r]
    graph = coo_matrix(
        (np.ones(pairs.shape[0]), (pairs[:, 0], pairs[:, 1])),
        shape=(nodes.shape[0], nodes.shape[0]),
    ).tocsr()
    _, labels = connected_components(graph, directed=False)
    target_labels = labels[targets]
    source = targets[0]
    if np.all(target_labels == target_labels[0]):
        far = targets[
            np.argmax(np.linalg.norm(nodes[targets] - nodes[source], axis=1))
        ]
        _, predecessors = breadth_first_order(
            graph, source, directed=False, return_predecessors=True
        )
        path = [far]
        while path[-1] != source:
            path.append(predecessors[path[-1]])
        witness = [nodes[i].tolist() for i in reversed(path)]
        return ConnectednessReport(
            connected=True, witness_path=witness, **report
        )

    other = targets[np.flatnonzero(target_labels != target_labels[0])[0]]
    _logger.debug("support split between nodes %d and %d", source, other)
    return ConnectednessReport(
        connected=False, failing_pair=_pair(nodes, source, other), **report
    )
