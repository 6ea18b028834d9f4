import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import T11, T13, T21, T22, T32
from oracles import double_loop_cost
from rbsched.buffer import BufferGrid
from rbsched.model import BUILTIN_MATRIX_ORDER, BusType, paper_factors_instance
from rbsched.setup_cost import (
    SetupLookupError,
    occupied_adjacent_pairs,
    setup_cost_between,
    total_buffer_setup_cost,
)

TYPES = [T11, T21, T32, T22, T13]


def test_worked_example(matrix_model):
    # J_3 (Type3, Color2) followed by J_5 (Type1, Color3)
    assert setup_cost_between(matrix_model, T32, T13) == 16


@pytest.mark.parametrize("t", TYPES)
def test_same_type_costs_nothing(matrix_model, t):
    assert setup_cost_between(matrix_model, t, t) == 0
    assert setup_cost_between(paper_factors_instance().setup, t, t) == 0


def test_factors_mode_sums_changed_properties():
    model = paper_factors_instance().setup
    assert setup_cost_between(model, T11, T22) == 10 + 13
    # only the color differs
    assert setup_cost_between(model, T21, T22) == 13
    assert setup_cost_between(model, T32, T13) == 4 + 12


def test_unknown_pair(matrix_model):
    with pytest.raises(SetupLookupError):
        setup_cost_between(matrix_model, T11, BusType("Type9", "Color1"))
    with pytest.raises(SetupLookupError):
        setup_cost_between(paper_factors_instance().setup, T11, BusType("Type9", "Color1"))


@pytest.mark.parametrize("model_name", ["matrix", "factors"])
def test_symmetric_and_non_negative(matrix_model, model_name):
    model = matrix_model if model_name == "matrix" else paper_factors_instance().setup
    for a in TYPES:
        for b in TYPES:
            assert setup_cost_between(model, a, b) == setup_cost_between(model, b, a) >= 0


def test_pairs_empty():
    assert occupied_adjacent_pairs(BufferGrid.empty(3, 3)) == set()


def test_pairs_single_adjacency():
    g = BufferGrid.from_placements(2, 2, {(1, 1): 1, (1, 2): 2})
    assert occupied_adjacent_pairs(g) == {((1, 1), (1, 2))}


def test_pairs_exclude_diagonal():
    g = BufferGrid.from_placements(2, 2, {(1, 1): 1, (1, 2): 2, (2, 1): 3})
    assert occupied_adjacent_pairs(g) == {((1, 1), (1, 2)), ((1, 1), (2, 1))}


def test_total_cost_hand_sum(matrix_model):
    g = BufferGrid.from_placements(2, 2, {(1, 1): 1, (1, 2): 2, (2, 1): 3})
    assert total_buffer_setup_cost(g, matrix_model, {1: T11, 2: T21, 3: T32}) == 6 + 16


def test_total_cost_empty_and_uniform(matrix_model):
    assert total_buffer_setup_cost(BufferGrid.empty(4, 3), matrix_model, {}) == 0
    full = BufferGrid.from_placements(2, 3, {(i, j): 3 * i + j for i in (1, 2) for j in (1, 2, 3)})
    assert total_buffer_setup_cost(full, matrix_model, {b: T22 for b in full.bus_ids()}) == 0


def test_total_cost_unknown_bus(matrix_model):
    g = BufferGrid.from_placements(1, 2, {(1, 1): 1, (1, 2): 2})
    with pytest.raises(SetupLookupError):
        total_buffer_setup_cost(g, matrix_model, {1: T11})


@st.composite
def typed_grids(draw, max_side=4):
    rows, cols = draw(st.integers(1, max_side)), draw(st.integers(1, max_side))
    cells = [(i, j) for i in range(1, rows + 1) for j in range(1, cols + 1)]
    occupied = draw(st.lists(st.sampled_from(cells), unique=True))
    placements = {c: k for k, c in enumerate(occupied, start=1)}
    types = {k: draw(st.sampled_from(BUILTIN_MATRIX_ORDER)) for k in placements.values()}
    return BufferGrid.from_placements(rows, cols, placements), placements, types


@settings(max_examples=200, deadline=None)
@given(typed_grids())
def test_decomposition_matches_double_loop(matrix_model, data):
    grid, placements, types = data
    assert total_buffer_setup_cost(grid, matrix_model, types) == double_loop_cost(
        placements, grid.rows, grid.cols, types
    )


@settings(max_examples=100, deadline=None)
@given(typed_grids(), st.sampled_from(BUILTIN_MATRIX_ORDER))
def test_isolated_bus_leaves_cost_unchanged(matrix_model, data, t):
    grid, placements, types = data
    lonely = [
        (i, j)
        for i in range(1, grid.rows + 1)
        for j in range(1, grid.cols + 1)
        if grid[(i, j)] is None
        and not any(
            grid.in_bounds(nb) and grid[nb] is not None
            for nb in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1))
        )
    ]
    if not lonely:
        return
    before = total_buffer_setup_cost(grid, matrix_model, types)
    after = total_buffer_setup_cost(grid.put(lonely[0], 999), matrix_model, {**types, 999: t})
    assert after == before
