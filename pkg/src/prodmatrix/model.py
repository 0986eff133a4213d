"""Exact sampler for the coupled product-matrix model.

The first ``m - 1`` factors are independent Ginibre matrices.  Completing the
square in ``-Tr G_m^* G_m + b Tr[Y + Y^*]`` shows that the last factor is a
Ginibre matrix shifted by ``b (G_{m-1} ... G_1)^*``, so every draw is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError, EmptyGrid, NumericalRankError

__all__ = [
    "ModelConfig",
    "RngStream",
    "PointConfiguration",
    "sample_matrices",
    "squared_singular_values",
    "sample_configurations",
    "empirical_density",
    "BLOCK_SIZE",
]

# samples per counter-based stream block; changing it changes sample streams
BLOCK_SIZE = 4096


@dataclass(frozen=True)
class ModelConfig:
    """Parameters ``(n, m, nu_1..nu_{m-1}, b)`` of the coupled model.

    ``G_l`` has shape ``(n + nu_l, n + nu_{l-1})`` with ``nu_0 = nu_m = 0``.
    """

    n: int
    m: int
    nus: tuple = ()
    b: float = 0.0

    def __post_init__(self):
        nus = tuple(int(v) for v in self.nus)
        object.__setattr__(self, "nus", nus)
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"n must be a positive integer, got {self.n}")
        if int(self.m) != self.m or self.m < 2:
            raise ConfigError(f"m must be an integer >= 2, got {self.m}")
        if len(nus) != self.m - 1:
            raise ConfigError(f"need m-1 = {self.m - 1} values of nu, got {len(nus)}")
        if any(v < 0 for v in nus):
            raise ConfigError("every nu must be >= 0")
        if not (np.isfinite(self.b) and self.b >= 0):
            raise ConfigError(f"b must be finite and >= 0, got {self.b}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "b", float(self.b))

    @property
    def nu_full(self) -> tuple:
        """``(nu_0, nu_1, ..., nu_m)`` with the implicit zeros at both ends."""
        return (0,) + self.nus + (0,)

    def shape(self, level: int) -> tuple:
        nu = self.nu_full
        return (self.n + nu[level], self.n + nu[level - 1])

    def with_b(self, b: float) -> "ModelConfig":
        return ModelConfig(self.n, self.m, self.nus, b)


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream keyed by ``(seed, stream_id)``."""

    seed: int
    stream_id: int = 0

    def generator(self, block: int = 0) -> np.random.Generator:
        ss = np.random.SeedSequence([self.seed & (2**64 - 1), self.stream_id & (2**64 - 1), block])
        return np.random.Generator(np.random.Philox(ss))


@dataclass
class PointConfiguration:
    """Squared singular values, ``points[l-1]`` sorted ascending for level ``l``."""

    points: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2:
            raise ValueError("points must have shape (m, n)")

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def level(self, l: int) -> np.ndarray:
        return self.points[l - 1]


def _ginibre(gen, size):
    # density e^{-|g|^2}: real and imaginary parts have variance 1/2
    g = gen.standard_normal(size + (2,))
    return (g[..., 0] + 1j * g[..., 1]) * np.sqrt(0.5)


def _draw(cfg: ModelConfig, gen: np.random.Generator, count: int):
    mats = []
    prod = None
    for l in range(1, cfg.m + 1):
        g = _ginibre(gen, (count,) + cfg.shape(l))
        if l == cfg.m and cfg.b != 0.0:
            g = g + cfg.b * np.conj(np.swapaxes(prod, -1, -2))
        mats.append(g)
        prod = g if prod is None else g @ prod
    return mats


def sample_matrices(cfg: ModelConfig, rng: RngStream) -> list:
    """One exact draw ``[G_1, ..., G_m]`` from the coupled model."""
    return [g[0] for g in _draw(cfg, rng.generator(), 1)]


def squared_singular_values(cfg: ModelConfig, matrices: Sequence[np.ndarray]) -> PointConfiguration:
    """Squared singular values of every partial product ``Y_l = G_l ... G_1``."""
    stacked = [np.asarray(g)[None] for g in matrices]
    return PointConfiguration(_levels(cfg, stacked)[0])


def _levels(cfg, mats):
    count = mats[0].shape[0]
    out = np.empty((count, cfg.m, cfg.n))
    prod = None
    for l, g in enumerate(mats, start=1):
        prod = g if prod is None else g @ prod
        sv = np.linalg.svd(prod, compute_uv=False)
        out[:, l - 1, :] = (sv ** 2)[:, ::-1]
    bad = out <= 0
    if np.any(bad):
        raise NumericalRankError("a squared singular value is not positive; the product is numerically singular")
    return out


def sample_configurations(cfg: ModelConfig, count: int, rng: RngStream) -> np.ndarray:
    """``count`` exact samples as an array of shape ``(count, m, n)``.

    Samples are produced in blocks of :data:`BLOCK_SIZE`, block ``k`` drawing
    from the stream ``(seed, stream_id, k)``, so the output is bit-identical
    however the blocks are scheduled.
    """
    count = int(count)
    if count < 0:
        raise ValueError("count must be >= 0")
    out = np.empty((count, cfg.m, cfg.n))
    for k, start in enumerate(range(0, count, BLOCK_SIZE)):
        size = min(BLOCK_SIZE, count - start)
        mats = _draw(cfg, rng.generator(k), size)
        out[start:start + size] = _levels(cfg, mats)
    return out


def empirical_density(samples, level: int, edges) -> tuple:
    """Binned one-point density of ``level`` with per-bin standard errors.

    Parameters
    ----------
    samples : array (N, m, n) or sequence of PointConfiguration
    level : int, 1-based
    edges : increasing bin edges

    Returns
    -------
    density, stderr : ndarray
        ``density[k]`` estimates ``int_bin rho_1 / width``; the error is the
        standard error of the per-sample count, divided by the width.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise EmptyGrid("need at least two strictly increasing bin edges")
    if isinstance(samples, np.ndarray):
        pts = samples[:, level - 1, :]
    else:
        pts = np.stack([s.level(level) for s in samples])
    if pts.shape[0] < 1:
        raise ValueError("need at least one sample")
    nb = edges.size - 1
    idx = np.searchsorted(edges, pts, side="right") - 1
    inside = (idx >= 0) & (idx < nb)
    rows = np.repeat(np.arange(pts.shape[0]), pts.shape[1]).reshape(pts.shape)
    counts = np.zeros((pts.shape[0], nb))
    np.add.at(counts, (rows[inside], idx[inside]), 1.0)
    width = np.diff(edges)
    N = pts.shape[0]
    dens = counts.mean(axis=0) / width
    if N > 1:
        se = counts.std(axis=0, ddof=1) / np.sqrt(N) / width
    else:
        se = np.full(nb, np.nan)
    return dens, se
