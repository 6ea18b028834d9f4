"""Brute-force reference implementations used only by the tests.

These deliberately share no code with ``rbsched.buffer`` or
``rbsched.setup_cost``: grids are plain dicts, the setup table is the raw
5x5 list from the builtin instance, and neighbours are found by scanning every
pair of coordinates.
"""

from __future__ import annotations

from itertools import product

from rbsched.model import BUILTIN_MATRIX_ORDER, BUILTIN_MATRIX_ROWS

TYPE_INDEX = {t: k for k, t in enumerate(BUILTIN_MATRIX_ORDER)}


def table_cost(type_a, type_b) -> int:
    return BUILTIN_MATRIX_ROWS[TYPE_INDEX[type_a]][TYPE_INDEX[type_b]]


def double_loop_cost(cells: dict, rows: int, cols: int, types: dict) -> int:
    """Sum of setup cost over every unordered pair of 4-adjacent occupied cells."""
    coords = list(product(range(1, rows + 1), range(1, cols + 1)))
    total = 0
    for x, a in enumerate(coords):
        for b in coords[x + 1:]:
            if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
                continue
            if a in cells and b in cells:
                total += table_cost(types[cells[a]], types[cells[b]])
    return total


def _sources(cells: dict, vacant, moved) -> list:
    """Cells whose bus may legally move into ``vacant``, in no particular order."""
    out = []
    for src, bus in cells.items():
        if bus in moved:
            continue
        di, dj = vacant[0] - src[0], vacant[1] - src[1]
        if (di, dj) == (0, 1) or (dj == 0 and abs(di) == 1):
            out.append(src)
    return out


def all_terminal_states(cells: dict, trigger) -> list[dict]:
    """Every buffer state reachable by a maximal linkage from ``trigger``."""
    finals = []

    def rec(state, vacant, moved):
        srcs = _sources(state, vacant, moved)
        if not srcs:
            finals.append(state)
            return
        for src in srcs:
            bus = state[src]
            nxt = {c: b for c, b in state.items() if c != src}
            nxt[vacant] = bus
            rec(nxt, src, moved | {bus})

    rec(dict(cells), trigger, frozenset())
    return finals


def brute_min_linkage_cost(cells: dict, rows: int, cols: int, trigger, types: dict) -> int:
    return min(double_loop_cost(s, rows, cols, types) for s in all_terminal_states(cells, trigger))


def count_maximal_chains(cells: dict, trigger) -> int:
    return len(all_terminal_states(cells, trigger))
