import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import T11, T13, T21, T22, T32, small_instance
from rbsched.model import (
    BufferSpec,
    BusType,
    Instance,
    InstanceParseError,
    instance_to_dict,
    paper_factors_instance,
    parse_instance,
    serialize_instance,
    validate_instance,
)

ROOT = Path(__file__).resolve().parents[1]


def test_builtin_shape(builtin):
    assert builtin.stages == (3, 2, 3, 3)
    assert builtin.buffer == BufferSpec(after_stage=1, rows=4, cols=3)
    assert len(builtin.buses) == 22
    assert builtin.setup.mode == "matrix"
    assert builtin.setup.applies_to_stages == frozenset({2})


def test_builtin_table_values(builtin):
    assert builtin.bus(3).bus_type == BusType("Type2", "Color1")
    assert builtin.bus(1).proc_times == (8, 30, 34, 42)
    assert builtin.setup.matrix[T21][T22] == 8
    assert builtin.bus(22).proc_times == (13, 32, 36, 40)


def test_builtin_uses_exactly_five_types(builtin):
    assert {b.bus_type for b in builtin.buses} == {T11, T21, T32, T22, T13}


def test_builtin_is_valid(builtin):
    assert validate_instance(builtin) == []
    assert validate_instance(paper_factors_instance()) == []


def test_shipped_fixture_matches_builtin(builtin):
    text = (ROOT / "instances" / "builtin.json").read_text(encoding="utf-8")
    assert parse_instance(text) == builtin
    text = (ROOT / "instances" / "builtin_factors.json").read_text(encoding="utf-8")
    assert parse_instance(text) == paper_factors_instance()


def test_parse_builtin_document(builtin):
    inst = parse_instance(serialize_instance(builtin))
    assert inst.stages == (3, 2, 3, 3)
    assert (inst.buffer.rows, inst.buffer.cols) == (4, 3)
    assert len(inst.buses) == 22


def test_parse_empty_bus_list(builtin):
    doc = instance_to_dict(builtin)
    doc["buses"] = []
    inst = parse_instance(json.dumps(doc))
    assert inst.buses == ()
    assert validate_instance(inst) == []


def test_parse_missing_processing_time(builtin):
    doc = instance_to_dict(builtin)
    doc["buses"][0]["proc_times"] = [8, 30, 34]
    with pytest.raises(InstanceParseError, match="missing processing time") as exc:
        parse_instance(json.dumps(doc))
    assert "J_1" in exc.value.locus


def test_parse_unknown_label(builtin):
    doc = instance_to_dict(builtin)
    doc["buses"][4]["color"] = "Color9"
    with pytest.raises(InstanceParseError, match="unknown type/color label"):
        parse_instance(json.dumps(doc))


def test_parse_reports_json_locus():
    with pytest.raises(InstanceParseError, match="line 2"):
        parse_instance('{\n  "stages": [1,, 2]}')


@pytest.mark.parametrize("field", ["stages", "buffer", "buses", "setup"])
def test_parse_missing_top_level_field(builtin, field):
    doc = instance_to_dict(builtin)
    del doc[field]
    with pytest.raises(InstanceParseError, match=field):
        parse_instance(json.dumps(doc))


def test_validate_asymmetric_matrix(builtin):
    doc = instance_to_dict(builtin)
    doc["setup"]["matrix"]["Type1|Color1"]["Type2|Color1"] = 7
    report = validate_instance(parse_instance(json.dumps(doc)))
    assert len(report) == 1
    assert report[0].code == "asymmetric"
    assert "Type1|Color1" in report[0].message and "Type2|Color1" in report[0].message


def test_validate_nonzero_diagonal(builtin):
    doc = instance_to_dict(builtin)
    doc["setup"]["matrix"]["Type3|Color2"]["Type3|Color2"] = 2
    codes = [v.code for v in validate_instance(parse_instance(json.dumps(doc)))]
    assert codes == ["diagonal"]


def test_validate_buffer_after_last_stage(builtin):
    inst = Instance(builtin.stages, BufferSpec(4, 4, 3), builtin.buses, builtin.setup)
    assert [v.code for v in validate_instance(inst)] == ["bounds"]


def test_validate_collects_several_violations():
    inst = small_instance([1], (1, 0, 2), [(T11, [0])])
    codes = {v.code for v in validate_instance(inst)}
    assert {"bounds", "proc_time"} <= codes


def test_validate_non_contiguous_ids(builtin):
    inst = Instance(builtin.stages, builtin.buffer, builtin.buses[1:], builtin.setup)
    assert [v.code for v in validate_instance(inst)] == ["ids"]


types = st.sampled_from([T11, T21, T32, T22, T13])


@st.composite
def instances(draw):
    q = draw(st.integers(2, 4))
    stages = draw(st.lists(st.integers(1, 3), min_size=q, max_size=q))
    after = draw(st.integers(1, q - 1))
    rows, cols = draw(st.integers(1, 4)), draw(st.integers(1, 4))
    buses = draw(st.lists(st.tuples(types, st.lists(st.integers(1, 60), min_size=q, max_size=q)), max_size=8))
    applies = draw(st.sets(st.integers(1, q)))
    return small_instance(stages, (after, rows, cols), buses, applies=sorted(applies))


@settings(max_examples=60, deadline=None)
@given(instances())
def test_round_trip(inst):
    text = serialize_instance(inst)
    again = parse_instance(text)
    assert again == inst
    assert serialize_instance(again) == text
