import numpy as np

__all__ = ("poisson_in_box", "uniform_in_box", "uniform_in_balls")


def uniform_in_box(
    rng: np.random.Generator, n: int, half_width: float, dim: int
) -> np.ndarray:
    return rng.uniform(-half_width, half_width, size=(n, dim))


def poisson_in_box(
    rng: np.random.Generator, intensity: float, half_width: float, dim: int
) -> np.ndarray:
    """Homogeneous Poisson process of the given intensity on Q_half_width."""
    if intensity <= 0:
        return np.empty((0, dim))
    n = rng.poisson(intensity * (2 * half_width) ** dim)
    return uniform_in_box(rng, n, half_width, dim)


def uniform_in_balls(
    rng: np.random.Generator,
    centers: np.ndarray,
    radii: np.ndarray,
    counts: np.ndarray,
) -> np.ndarray:
    """``counts[i]`` uniform points in each ball B_radii[i](centers[i])."""
    dim = centers.shape[1]
    total = int(np.sum(counts))
    if total == 0:
        return np.empty((0, dim))
    owner = np.repeat(np.arange(centers.shape[0]), counts)
    direction = rng.standard_normal((total, dim))
    direction /= np.linalg.norm(direction, axis=1)[:, None]
    length = radii[owner] * np.power(rng.random(total), 1.0 / dim)
    return centers[owner] + direction * length[:, None]
