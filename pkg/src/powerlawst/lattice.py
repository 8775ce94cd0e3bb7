"""Lattice geometry, power-law couplings, and colored plaquette tilings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

CONFIG_KEYS = {"d", "extents", "alpha", "prefactor"}


@dataclass(frozen=True)
class Lattice:
    """Hypercubic region with unit spacing and integer coordinates."""

    d: int
    extents: tuple[int, ...]

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.d}")
        if len(self.extents) != self.d:
            raise ValueError(f"need {self.d} extents, got {len(self.extents)}")
        if any(int(e) < 1 for e in self.extents):
            raise ValueError("extents must be positive")
        object.__setattr__(self, "extents", tuple(int(e) for e in self.extents))

    @property
    def num_sites(self) -> int:
        return int(np.prod(self.extents))

    def coordinates(self) -> np.ndarray:
        """(N, d) integer coordinates in row-major site-index order."""
        grids = np.meshgrid(*[np.arange(e) for e in self.extents], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def site_index(self, coord) -> int:
        coord = tuple(int(c) for c in coord)
        for c, e in zip(coord, self.extents):
            if not 0 <= c < e:
                raise ValueError(f"coordinate {coord} outside extents {self.extents}")
        return int(np.ravel_multi_index(coord, self.extents))

    def coord_of(self, site: int) -> tuple[int, ...]:
        if not 0 <= site < self.num_sites:
            raise ValueError(f"site index {site} out of range")
        return tuple(int(c) for c in np.unravel_index(site, self.extents))


def hypercube(r: int, d: int) -> Lattice:
    """The r x ... x r region used by the r-parameterized benchmarks."""
    return Lattice(d=d, extents=(int(r),) * d)


@dataclass(frozen=True)
class CouplingModel:
    """Isotropic power-law coupling h(i,j) = prefactor / dist(i,j)**alpha."""

    alpha: float
    prefactor: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.prefactor <= 0:
            raise ValueError("prefactor must be positive")


def distance(lattice: Lattice, i: int, j: int) -> float:
    """Euclidean distance between two site indices."""
    a = np.asarray(lattice.coord_of(i), dtype=float)
    b = np.asarray(lattice.coord_of(j), dtype=float)
    return float(np.sqrt(np.sum((a - b) ** 2)))


def coupling(model: CouplingModel, dist: float) -> float:
    """Pair coupling at a given distance; distances below one site are rejected."""
    if dist < 1.0 - 1e-12:
        raise ValueError(f"distance {dist} below lattice spacing")
    return model.prefactor * float(dist) ** (-model.alpha)


def coupling_matrix(lattice: Lattice, model: CouplingModel) -> np.ndarray:
    """Dense symmetric h(i,j) matrix with zero diagonal."""
    coords = lattice.coordinates().astype(float)
    diff = coords[:, None, :] - coords[None, :, :]
    dist2 = np.sum(diff * diff, axis=2)
    with np.errstate(divide="ignore"):
        h = model.prefactor * dist2 ** (-model.alpha / 2.0)
    np.fill_diagonal(h, 0.0)
    return h


@dataclass(frozen=True)
class PlaquetteTiling:
    """Partition of a region into hypercubic blocks of edge L with a periodic coloring.

    Colors repeat with period ``supercell`` blocks per axis, so same-color block
    centers are at least ``supercell * L`` apart (the achieved minimum is
    reported exactly).
    """

    lattice: Lattice
    block_length: int
    blocks: tuple[tuple[int, ...], ...]
    color_of_block: tuple[int, ...]
    n_colors: int
    supercell: int
    min_same_color_distance: float
    has_truncated_blocks: bool
    colors_used: int = field(default=0)

    def block_center(self, b: int) -> np.ndarray:
        coords = self.lattice.coordinates()[list(self.blocks[b])]
        return coords.mean(axis=0)

    def same_color_pairs(self):
        for a in range(len(self.blocks)):
            for b in range(a + 1, len(self.blocks)):
                if self.color_of_block[a] == self.color_of_block[b]:
                    yield a, b


def tile_and_color(lattice: Lattice, L: int, n: int) -> PlaquetteTiling:
    """Tile the region with edge-L blocks and color them on a periodic supercell.

    The supercell edge is floor(n**(1/d)) blocks, which is the largest periodic
    pattern realizable with at most n colors; when n is not a perfect d-th
    power the surplus colors go unused (``colors_used`` reports the count
    actually assigned). Edge blocks of truncated size are permitted and
    flagged.
    """
    if L < 1:
        raise ValueError("block length must be >= 1")
    if n < 1:
        raise ValueError("need at least one color")
    d = lattice.d
    blocks_per_axis = [int(np.ceil(e / L)) for e in lattice.extents]
    n_blocks = int(np.prod(blocks_per_axis))
    if n > n_blocks:
        raise ValueError(f"{n} colors exceed the {n_blocks} available blocks")

    k = max(1, int(np.floor(n ** (1.0 / d) + 1e-9)))

    coords = lattice.coordinates()
    block_of_site = np.zeros(lattice.num_sites, dtype=int)
    block_axis_idx = coords // L
    block_of_site = np.ravel_multi_index(block_axis_idx.T, blocks_per_axis)

    blocks: list[list[int]] = [[] for _ in range(n_blocks)]
    for site, b in enumerate(block_of_site):
        blocks[int(b)].append(site)

    truncated = any(len(b) != L**d for b in blocks)

    colors = []
    for b in range(n_blocks):
        bcoord = np.unravel_index(b, blocks_per_axis)
        colors.append(int(np.ravel_multi_index([c % k for c in bcoord], (k,) * d)))

    # exact minimum same-color center distance (exhaustive when affordable)
    min_dist = float(k * L)
    if n_blocks <= 2500:
        centers = np.array(
            [coords[blocks[b]].mean(axis=0) for b in range(n_blocks)], dtype=float
        )
        carr = np.asarray(colors)
        best = np.inf
        for c in np.unique(carr):
            pts = centers[carr == c]
            if len(pts) < 2:
                continue
            diff = pts[:, None, :] - pts[None, :, :]
            dist = np.sqrt((diff**2).sum(axis=2))
            dist[dist == 0] = np.inf
            best = min(best, float(dist.min()))
        min_dist = best if np.isfinite(best) else float("inf")

    return PlaquetteTiling(
        lattice=lattice,
        block_length=int(L),
        blocks=tuple(tuple(b) for b in blocks),
        color_of_block=tuple(colors),
        n_colors=int(n),
        supercell=k,
        min_same_color_distance=min_dist,
        has_truncated_blocks=truncated,
        colors_used=k**d,
    )


def from_config(config: dict) -> tuple[Lattice, CouplingModel]:
    """Build (Lattice, CouplingModel) from a JSON-style mapping.

    Recognized keys: d, extents, alpha, prefactor. Unknown keys are rejected.
    """
    unknown = set(config) - CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    missing = {"d", "extents", "alpha"} - set(config)
    if missing:
        raise ValueError(f"missing config keys: {sorted(missing)}")
    lat = Lattice(d=int(config["d"]), extents=tuple(config["extents"]))
    model = CouplingModel(
        alpha=float(config["alpha"]), prefactor=float(config.get("prefactor", 1.0))
    )
    return lat, model


def load_config(path) -> tuple[Lattice, CouplingModel]:
    with open(path) as f:
        return from_config(json.load(f))
