"""Pairwise setup cost between bus types and the adjacency cost of a buffer grid."""

from __future__ import annotations

from typing import Mapping

from rbsched.model import FACTORS, MATRIX, BusType, SetupModel

Coord = tuple[int, int]
AdjacentPair = tuple[Coord, Coord]


class SetupLookupError(KeyError):
    pass


def setup_cost_between(model: SetupModel, a: BusType, b: BusType) -> int:
    """Changeover time when a bus of type ``b`` follows one of type ``a``."""
    if model.mode == MATRIX:
        try:
            return model.matrix[a][b]
        except KeyError:
            raise SetupLookupError(f"no setup entry for type pair ({a.key}, {b.key})") from None
    if model.mode == FACTORS:
        total = 0
        for name, table in model.factors.items():
            u, v = getattr(a, name), getattr(b, name)
            if u == v:
                continue
            try:
                total += table[u][v]
            except KeyError:
                raise SetupLookupError(f"no {name} change time for ({u}, {v})") from None
        return total
    raise ValueError(f"unknown setup mode {model.mode!r}")


def occupied_adjacent_pairs(grid) -> set[AdjacentPair]:
    """Unordered 4-neighbour pairs of cells that both hold a bus.

    Each pair is reported once as ``(a, b)`` with ``a`` the lexicographically
    smaller coordinate.
    """
    pairs = set()
    for (i, j), _ in grid.occupied():
        # look right and down only, so each pair is produced once
        for nb in ((i, j + 1), (i + 1, j)):
            if grid.in_bounds(nb) and grid[nb] is not None:
                pairs.add(((i, j), nb))
    return pairs


def total_buffer_setup_cost(grid, model: SetupModel, types: Mapping[int, BusType]) -> int:
    """Sum of setup costs over all occupied adjacent pairs of the grid."""
    total = 0
    for a, b in occupied_adjacent_pairs(grid):
        ta, tb = _resolve(types, grid[a]), _resolve(types, grid[b])
        total += setup_cost_between(model, ta, tb)
    return total


def _resolve(types: Mapping[int, BusType], bus_id: int) -> BusType:
    try:
        return types[bus_id]
    except KeyError:
        raise SetupLookupError(f"bus id {bus_id} on the grid has no known type") from None
