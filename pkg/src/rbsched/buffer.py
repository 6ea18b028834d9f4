"""Routing buffer state, legal moves and linkage chains.

Lanes are rows. Buses enter at column 1 and are dispatched from the lane
head, the occupied cell with the largest column. A bus may move forward
within its lane (column + 1) or sideways to the same column of an adjacent
lane. Coordinates are 1-based ``(row, col)`` tuples throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

from rbsched.model import BusType, SetupModel
from rbsched.setup_cost import Coord, total_buffer_setup_cost


class BufferError(ValueError):
    pass


class EntryBlocked(BufferError):
    """No vacant cell in the entry column."""


class IllegalMove(BufferError):
    def __init__(self, index: int, message: str):
        self.index = index
        super().__init__(f"move {index}: {message}")


@dataclass(frozen=True)
class BufferGrid:
    rows: int
    cols: int
    cells: tuple[tuple[Optional[int], ...], ...] = ()

    def __post_init__(self):
        if not self.cells:
            object.__setattr__(self, "cells", tuple((None,) * self.cols for _ in range(self.rows)))
        if len(self.cells) != self.rows or any(len(r) != self.cols for r in self.cells):
            raise BufferError(f"cells do not match a {self.rows}x{self.cols} grid")
        ids = [b for r in self.cells for b in r if b is not None]
        if len(ids) != len(set(ids)):
            raise BufferError("a bus id appears in more than one cell")

    @classmethod
    def empty(cls, rows: int, cols: int) -> "BufferGrid":
        return cls(rows, cols)

    @classmethod
    def from_placements(cls, rows: int, cols: int, placements: Mapping[Coord, int]) -> "BufferGrid":
        cells = [[None] * cols for _ in range(rows)]
        for (i, j), bus in placements.items():
            cells[i - 1][j - 1] = bus
        return cls(rows, cols, tuple(tuple(r) for r in cells))

    @classmethod
    def from_lists(cls, cells: Sequence[Sequence[Optional[int]]]) -> "BufferGrid":
        return cls(len(cells), len(cells[0]) if cells else 0, tuple(tuple(r) for r in cells))

    def to_lists(self) -> list[list[Optional[int]]]:
        return [list(r) for r in self.cells]

    @property
    def entry_col(self) -> int:
        return 1

    @property
    def exit_col(self) -> int:
        return self.cols

    def in_bounds(self, c: Coord) -> bool:
        return 1 <= c[0] <= self.rows and 1 <= c[1] <= self.cols

    def __getitem__(self, c: Coord) -> Optional[int]:
        if not self.in_bounds(c):
            raise IndexError(f"cell {c} outside {self.rows}x{self.cols} grid")
        return self.cells[c[0] - 1][c[1] - 1]

    def occupied(self) -> Iterator[tuple[Coord, int]]:
        for i, row in enumerate(self.cells, start=1):
            for j, bus in enumerate(row, start=1):
                if bus is not None:
                    yield (i, j), bus

    def bus_ids(self) -> list[int]:
        return [b for _, b in self.occupied()]

    def count(self) -> int:
        return sum(1 for _ in self.occupied())

    def locate(self, bus: int) -> Optional[Coord]:
        for c, b in self.occupied():
            if b == bus:
                return c
        return None

    def with_cells(self, updates: Mapping[Coord, Optional[int]]) -> "BufferGrid":
        cells = [list(r) for r in self.cells]
        for (i, j), bus in updates.items():
            cells[i - 1][j - 1] = bus
        return BufferGrid(self.rows, self.cols, tuple(tuple(r) for r in cells))

    def put(self, c: Coord, bus: int) -> "BufferGrid":
        if self[c] is not None:
            raise BufferError(f"cell {c} already holds J_{self[c]}")
        return self.with_cells({c: bus})

    def remove(self, c: Coord) -> "BufferGrid":
        if self[c] is None:
            raise BufferError(f"cell {c} is already empty")
        return self.with_cells({c: None})

    def render(self) -> str:
        width = max([len(str(b)) for b in self.bus_ids()] + [1])
        return "\n".join(
            " ".join(("." if b is None else str(b)).rjust(width) for b in row) for row in self.cells
        )


@dataclass(frozen=True)
class Move:
    bus: int
    src: Coord
    dst: Coord

    @property
    def is_forward(self) -> bool:
        return self.dst == (self.src[0], self.src[1] + 1)

    @property
    def is_lateral(self) -> bool:
        return self.dst[1] == self.src[1] and abs(self.dst[0] - self.src[0]) == 1

    def to_dict(self) -> dict:
        return {"bus": self.bus, "from": list(self.src), "to": list(self.dst)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "Move":
        return cls(d["bus"], tuple(d["from"]), tuple(d["to"]))


@dataclass(frozen=True)
class LinkageChain:
    trigger: Coord
    moves: tuple[Move, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.moves)

    @property
    def vacancy(self) -> Coord:
        """Cell left empty once the chain has been applied."""
        return self.moves[-1].src if self.moves else self.trigger


def eligible_feeders(grid: BufferGrid, vacant: Coord, already_moved=frozenset()) -> list[Move]:
    """Legal single moves into ``vacant``: forward from behind, then lateral by row."""
    if grid[vacant] is not None:
        raise BufferError(f"cell {vacant} is not vacant (holds J_{grid[vacant]})")
    i, j = vacant
    feeders = []
    for src in ((i, j - 1), (i - 1, j), (i + 1, j)):
        if not grid.in_bounds(src):
            continue
        bus = grid[src]
        if bus is not None and bus not in already_moved:
            feeders.append(Move(bus, src, vacant))
    return feeders


def _step(grid: BufferGrid, move: Move) -> BufferGrid:
    return grid.with_cells({move.src: None, move.dst: move.bus})


def enumerate_linkages(grid: BufferGrid, trigger: Coord, allow_early_stop: bool = False) -> list[LinkageChain]:
    """Every maximal linkage chain started by vacating ``trigger``.

    Depth-first over feeder choices, so the output order is lexicographic in
    feeder rank (forward before lateral, upper lane before lower). With
    ``allow_early_stop`` every prefix of a maximal chain, including the empty
    chain, is listed as well.
    """
    if grid[trigger] is not None:
        raise BufferError(f"trigger cell {trigger} is occupied by J_{grid[trigger]}")
    chains: list[LinkageChain] = []

    def walk(g: BufferGrid, vacant: Coord, moves: tuple[Move, ...], moved: frozenset[int]):
        feeders = eligible_feeders(g, vacant, moved)
        if allow_early_stop or not feeders:
            chains.append(LinkageChain(trigger, moves))
        for mv in feeders:
            walk(_step(g, mv), mv.src, moves + (mv,), moved | {mv.bus})

    walk(grid, trigger, (), frozenset())
    return chains


def apply_linkage(grid: BufferGrid, chain: LinkageChain) -> BufferGrid:
    """Apply ``chain`` move by move, checking legality at each step."""
    expected_dst = chain.trigger
    moved: set[int] = set()
    g = grid
    for k, mv in enumerate(chain.moves):
        if mv.dst != expected_dst:
            raise IllegalMove(k, f"fills {mv.dst} but the vacant cell is {expected_dst}")
        if not (g.in_bounds(mv.src) and g.in_bounds(mv.dst)):
            raise IllegalMove(k, f"{mv.src}->{mv.dst} leaves the grid")
        if not (mv.is_forward or mv.is_lateral):
            raise IllegalMove(k, f"{mv.src}->{mv.dst} is neither forward nor lateral")
        if g[mv.dst] is not None:
            raise IllegalMove(k, f"destination {mv.dst} is occupied")
        if g[mv.src] != mv.bus:
            raise IllegalMove(k, f"J_{mv.bus} is not at {mv.src}")
        if mv.bus in moved:
            raise IllegalMove(k, f"J_{mv.bus} already moved in this linkage")
        moved.add(mv.bus)
        g = _step(g, mv)
        expected_dst = mv.src
    return g


def select_min_cost_linkage(
    grid: BufferGrid,
    trigger: Coord,
    model: SetupModel,
    types: Mapping[int, BusType],
    allow_early_stop: bool = False,
) -> tuple[LinkageChain, int]:
    """The first enumerated chain whose resulting grid has minimal adjacency cost."""
    best: Optional[tuple[LinkageChain, int]] = None
    for chain in enumerate_linkages(grid, trigger, allow_early_stop):
        cost = total_buffer_setup_cost(apply_linkage(grid, chain), model, types)
        if best is None or cost < best[1]:
            best = (chain, cost)
    assert best is not None  # enumeration always yields at least one chain
    return best


def select_random_linkage(
    grid: BufferGrid,
    trigger: Coord,
    rng: np.random.Generator,
    allow_early_stop: bool = False,
) -> LinkageChain:
    """Grow one chain by picking uniformly among eligible feeders at each step.

    With ``allow_early_stop`` stopping is one more equally likely option.
    """
    if grid[trigger] is not None:
        raise BufferError(f"trigger cell {trigger} is occupied by J_{grid[trigger]}")
    g, vacant, moves, moved = grid, trigger, [], set()
    while True:
        feeders = eligible_feeders(g, vacant, moved)
        if not feeders:
            break
        k = int(rng.integers(len(feeders) + (1 if allow_early_stop else 0)))
        if k == len(feeders):
            break
        mv = feeders[k]
        moves.append(mv)
        moved.add(mv.bus)
        g = _step(g, mv)
        vacant = mv.src
    return LinkageChain(trigger, tuple(moves))


def roll_forward(grid: BufferGrid, cell: Coord) -> Coord:
    """Furthest cell the bus at ``cell`` reaches moving forward over empty cells."""
    i, j = cell
    while j < grid.cols and grid[(i, j + 1)] is None:
        j += 1
    return (i, j)


def place_entering_bus(
    grid: BufferGrid,
    bus: int,
    model: SetupModel,
    types: Mapping[int, BusType],
    roll: bool = False,
) -> tuple[BufferGrid, Coord]:
    """Park ``bus`` at the vacant entry cell giving the lowest adjacency cost.

    Ties go to the lowest row. With ``roll`` each candidate lane is scored
    with the bus already advanced to the end of the free run ahead of it and
    the returned coordinate is that final cell.
    """
    best: Optional[tuple[int, BufferGrid, Coord]] = None
    for i in range(1, grid.rows + 1):
        entry = (i, grid.entry_col)
        if grid[entry] is not None:
            continue
        cell = roll_forward(grid, entry) if roll else entry
        candidate = grid.put(cell, bus)
        cost = total_buffer_setup_cost(candidate, model, types)
        if best is None or cost < best[0]:
            best = (cost, candidate, cell)
    if best is None:
        raise EntryBlocked("entry column is full")
    return best[1], best[2]


def has_entry_vacancy(grid: BufferGrid) -> bool:
    return any(grid[(i, grid.entry_col)] is None for i in range(1, grid.rows + 1))


def lane_heads(grid: BufferGrid) -> list[tuple[int, Coord]]:
    """Per lane, the occupant closest to the exit; ordered by row."""
    heads = []
    for i in range(1, grid.rows + 1):
        for j in range(grid.cols, 0, -1):
            bus = grid[(i, j)]
            if bus is not None:
                heads.append((bus, (i, j)))
                break
    return heads
