"""Initial placements: random, packed into a corner, or already on the target."""

from __future__ import annotations

import random

from .grid import GridDims, reference_mis
from .model import Configuration

CORNERS = ("NE", "SE", "SW", "NW")


def random_placement(dims: GridDims, seed: int) -> Configuration:
    """ceil(m*n/2) green robots on nodes sampled uniformly without replacement."""
    rng = random.Random(seed)
    return Configuration.greens(dims, rng.sample(list(dims.coords()), dims.robot_count))


def packed_corner(dims: GridDims, corner: str = "SE") -> Configuration:
    """Greens filling nodes row-major starting from ``corner``.

    SE walks rows bottom-up and columns right-to-left; the other corners
    mirror that order.
    """
    corner = corner.upper()
    if corner not in CORNERS:
        raise ValueError(f"corner must be one of {CORNERS}, got {corner!r}")
    rows = range(dims.m, 0, -1) if corner[0] == "S" else range(1, dims.m + 1)
    cols = range(dims.n, 0, -1) if corner[1] == "E" else range(1, dims.n + 1)
    order = [(i, j) for i in rows for j in cols]
    return Configuration.greens(dims, order[: dims.robot_count])


def target_preset(dims: GridDims) -> Configuration:
    return Configuration.greens(dims, reference_mis(dims))


def named_placement(dims: GridDims, name: str, seed: int = 0) -> Configuration:
    """Resolve ``random``, ``target`` or ``packed-<corner>``."""
    name = name.lower()
    if name == "random":
        return random_placement(dims, seed)
    if name == "target":
        return target_preset(dims)
    if name.startswith("packed-"):
        return packed_corner(dims, name.split("-", 1)[1])
    raise ValueError(f"unknown placement {name!r}")
