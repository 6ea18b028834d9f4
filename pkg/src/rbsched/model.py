"""Instance data model: buses, setup model, buffer geometry, JSON format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

MATRIX = "matrix"
FACTORS = "factors"
# factor name -> BusType attribute it reads
FACTOR_PROPERTIES = ("model", "color")


class InstanceParseError(ValueError):
    """Raised when an instance document cannot be turned into an Instance."""

    def __init__(self, locus: str, message: str):
        self.locus = locus
        super().__init__(f"{locus}: {message}")


@dataclass(frozen=True, order=True)
class BusType:
    model: str
    color: str

    @property
    def key(self) -> str:
        return f"{self.model}|{self.color}"

    @classmethod
    def from_key(cls, key: str) -> "BusType":
        model, sep, color = key.partition("|")
        if not sep or not model or not color:
            raise ValueError(f"bus type key {key!r} is not of the form 'model|color'")
        return cls(model, color)

    def __str__(self) -> str:
        return f"{self.model}·{self.color}"


@dataclass(frozen=True)
class Bus:
    id: int
    bus_type: BusType
    proc_times: tuple[int, ...]


@dataclass(frozen=True)
class SetupModel:
    """Sequence-dependent setup durations.

    In ``matrix`` mode ``matrix[a][b]`` is the changeover time from type ``a``
    to type ``b``. In ``factors`` mode ``factors[name][u][v]`` is the time for
    property ``name`` changing from value ``u`` to ``v``; a type change costs
    the sum over factors whose property differs.
    """

    mode: str
    applies_to_stages: frozenset[int]
    matrix: dict[BusType, dict[BusType, int]] = field(default_factory=dict)
    factors: dict[str, dict[str, dict[str, int]]] = field(default_factory=dict)

    def known_types(self) -> set[BusType]:
        types = set(self.matrix)
        for row in self.matrix.values():
            types.update(row)
        return types

    def known_values(self, factor: str) -> set[str]:
        table = self.factors.get(factor, {})
        values = set(table)
        for row in table.values():
            values.update(row)
        return values

    def applies_to(self, stage: int) -> bool:
        return stage in self.applies_to_stages


@dataclass(frozen=True)
class BufferSpec:
    after_stage: int
    rows: int
    cols: int


@dataclass(frozen=True)
class Instance:
    stages: tuple[int, ...]
    buffer: BufferSpec
    buses: tuple[Bus, ...]
    setup: SetupModel

    @property
    def num_stages(self) -> int:
        return len(self.stages)

    @property
    def next_stage(self) -> int:
        """1-based index of the stage fed by the routing buffer."""
        return self.buffer.after_stage + 1

    def bus(self, bus_id: int) -> Bus:
        bus = self.bus_by_id().get(bus_id)
        if bus is None:
            raise KeyError(f"unknown bus id {bus_id}")
        return bus

    def bus_by_id(self) -> dict[int, Bus]:
        return {b.id: b for b in self.buses}

    def types_by_id(self) -> dict[int, BusType]:
        return {b.id: b.bus_type for b in self.buses}


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


ValidationReport = list[Violation]


# ---------------------------------------------------------------- parsing


def _require(obj: Mapping[str, Any], key: str, locus: str) -> Any:
    if not isinstance(obj, Mapping):
        raise InstanceParseError(locus, "expected an object")
    if key not in obj:
        raise InstanceParseError(f"{locus}.{key}" if locus else key, "missing field")
    return obj[key]


def _int(value: Any, locus: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceParseError(locus, f"expected an integer, got {value!r}")
    return value


def _parse_matrix(doc: Any, locus: str) -> dict[BusType, dict[BusType, int]]:
    if not isinstance(doc, Mapping):
        raise InstanceParseError(locus, "expected a nested object")
    matrix: dict[BusType, dict[BusType, int]] = {}
    for a_key, row in doc.items():
        try:
            a = BusType.from_key(a_key)
        except ValueError as exc:
            raise InstanceParseError(f"{locus}.{a_key}", str(exc)) from None
        if not isinstance(row, Mapping):
            raise InstanceParseError(f"{locus}.{a_key}", "expected an object")
        parsed_row = {}
        for b_key, value in row.items():
            try:
                b = BusType.from_key(b_key)
            except ValueError as exc:
                raise InstanceParseError(f"{locus}.{a_key}.{b_key}", str(exc)) from None
            parsed_row[b] = _int(value, f"{locus}.{a_key}.{b_key}")
        matrix[a] = parsed_row
    return matrix


def _parse_factors(doc: Any, locus: str) -> dict[str, dict[str, dict[str, int]]]:
    if not isinstance(doc, Mapping):
        raise InstanceParseError(locus, "expected an object keyed by factor name")
    factors = {}
    for name, table in doc.items():
        if name not in FACTOR_PROPERTIES:
            raise InstanceParseError(
                f"{locus}.{name}", f"unknown setup factor; expected one of {FACTOR_PROPERTIES}"
            )
        if not isinstance(table, Mapping):
            raise InstanceParseError(f"{locus}.{name}", "expected a nested object")
        factors[name] = {
            u: {v: _int(t, f"{locus}.{name}.{u}.{v}") for v, t in row.items()}
            for u, row in table.items()
        }
    return factors


def instance_from_dict(doc: Mapping[str, Any]) -> Instance:
    if not isinstance(doc, Mapping):
        raise InstanceParseError("<root>", "expected an object")
    raw_stages = _require(doc, "stages", "")
    if not isinstance(raw_stages, list):
        raise InstanceParseError("stages", "expected an array of workstation counts")
    stages = tuple(_int(v, f"stages[{k}]") for k, v in enumerate(raw_stages))

    raw_buffer = _require(doc, "buffer", "")
    buffer = BufferSpec(
        after_stage=_int(_require(raw_buffer, "after_stage", "buffer"), "buffer.after_stage"),
        rows=_int(_require(raw_buffer, "rows", "buffer"), "buffer.rows"),
        cols=_int(_require(raw_buffer, "cols", "buffer"), "buffer.cols"),
    )

    raw_setup = _require(doc, "setup", "")
    mode = _require(raw_setup, "mode", "setup")
    if mode not in (MATRIX, FACTORS):
        raise InstanceParseError("setup.mode", f"expected 'matrix' or 'factors', got {mode!r}")
    raw_applies = _require(raw_setup, "applies_to_stages", "setup")
    if not isinstance(raw_applies, list):
        raise InstanceParseError("setup.applies_to_stages", "expected an array")
    applies = frozenset(_int(v, f"setup.applies_to_stages[{k}]") for k, v in enumerate(raw_applies))
    if mode == MATRIX:
        setup = SetupModel(MATRIX, applies, matrix=_parse_matrix(_require(raw_setup, "matrix", "setup"), "setup.matrix"))
    else:
        setup = SetupModel(FACTORS, applies, factors=_parse_factors(_require(raw_setup, "factors", "setup"), "setup.factors"))

    raw_buses = _require(doc, "buses", "")
    if not isinstance(raw_buses, list):
        raise InstanceParseError("buses", "expected an array")
    buses = []
    for k, raw in enumerate(raw_buses):
        locus = f"buses[{k}]"
        bus_id = _int(_require(raw, "id", locus), f"{locus}.id")
        locus = f"buses[{k}] (J_{bus_id})"
        model = _require(raw, "model", locus)
        color = _require(raw, "color", locus)
        if not isinstance(model, str) or not isinstance(color, str):
            raise InstanceParseError(locus, "model and color must be strings")
        proc = _require(raw, "proc_times", locus)
        if not isinstance(proc, list):
            raise InstanceParseError(f"{locus}.proc_times", "expected an array")
        if len(proc) < len(stages):
            raise InstanceParseError(
                f"{locus}.proc_times",
                f"missing processing time: {len(proc)} given for {len(stages)} stages",
            )
        if len(proc) > len(stages):
            raise InstanceParseError(
                f"{locus}.proc_times", f"{len(proc)} processing times given for {len(stages)} stages"
            )
        bus_type = BusType(model, color)
        _check_label(setup, bus_type, locus)
        buses.append(Bus(bus_id, bus_type, tuple(_int(v, f"{locus}.proc_times[{q}]") for q, v in enumerate(proc))))
    return Instance(stages, buffer, tuple(buses), setup)


def _check_label(setup: SetupModel, bus_type: BusType, locus: str) -> None:
    if setup.mode == MATRIX:
        if bus_type not in setup.known_types():
            raise InstanceParseError(locus, f"unknown type/color label {bus_type.key!r} (not in setup matrix)")
        return
    for name in setup.factors:
        value = getattr(bus_type, name)
        if value not in setup.known_values(name):
            raise InstanceParseError(locus, f"unknown {name} label {value!r} (not in factor table)")


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"line {exc.lineno} col {exc.colno}", exc.msg) from None
    return instance_from_dict(doc)


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def instance_to_dict(inst: Instance) -> dict[str, Any]:
    setup: dict[str, Any] = {
        "mode": inst.setup.mode,
        "applies_to_stages": sorted(inst.setup.applies_to_stages),
    }
    if inst.setup.mode == MATRIX:
        setup["matrix"] = {
            a.key: {b.key: v for b, v in row.items()} for a, row in inst.setup.matrix.items()
        }
    else:
        setup["factors"] = {
            name: {u: dict(row) for u, row in table.items()} for name, table in inst.setup.factors.items()
        }
    return {
        "stages": list(inst.stages),
        "buffer": {
            "after_stage": inst.buffer.after_stage,
            "rows": inst.buffer.rows,
            "cols": inst.buffer.cols,
        },
        "buses": [
            {"id": b.id, "model": b.bus_type.model, "color": b.bus_type.color, "proc_times": list(b.proc_times)}
            for b in inst.buses
        ],
        "setup": setup,
    }


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2, ensure_ascii=False) + "\n"


# ------------------------------------------------------------- validation


def _check_table(rows: Mapping[Any, Mapping[Any, int]], label, name: str) -> Iterable[Violation]:
    for a, row in rows.items():
        for b, value in row.items():
            if value < 0:
                yield Violation("negative", f"{name}: entry ({label(a)}, {label(b)}) = {value} is negative")
            if a == b and value != 0:
                yield Violation("diagonal", f"{name}: diagonal entry ({label(a)}, {label(a)}) = {value}, expected 0")
    keys = set(rows)
    for row in rows.values():
        keys.update(row)
    ordered = sorted(keys, key=label)
    for x, a in enumerate(ordered):
        for b in ordered[x + 1:]:
            ab = rows.get(a, {}).get(b)
            ba = rows.get(b, {}).get(a)
            if ab != ba:
                yield Violation(
                    "asymmetric",
                    f"{name}: entry ({label(a)}, {label(b)}) = {ab} but ({label(b)}, {label(a)}) = {ba}",
                )


def validate_instance(inst: Instance) -> ValidationReport:
    """List every invariant violation; an empty list means the instance is usable."""
    report: ValidationReport = []
    q = inst.num_stages
    if q < 2:
        report.append(Violation("bounds", f"need at least 2 stages, got {q}"))
    for k, count in enumerate(inst.stages, start=1):
        if count < 1:
            report.append(Violation("bounds", f"stage {k} has {count} workstations"))
    buf = inst.buffer
    if not 1 <= buf.after_stage <= q - 1:
        report.append(Violation("bounds", f"buffer.after_stage = {buf.after_stage} outside 1..{q - 1}"))
    if buf.rows < 1 or buf.cols < 1:
        report.append(Violation("bounds", f"buffer is {buf.rows}x{buf.cols}; both sides must be >= 1"))

    ids = [b.id for b in inst.buses]
    if sorted(ids) != list(range(1, len(ids) + 1)):
        report.append(Violation("ids", f"bus ids must be unique and contiguous from 1, got {sorted(ids)}"))
    for b in inst.buses:
        if len(b.proc_times) != q:
            report.append(Violation("arity", f"J_{b.id} has {len(b.proc_times)} processing times for {q} stages"))
        if any(p <= 0 for p in b.proc_times):
            report.append(Violation("proc_time", f"J_{b.id} has non-positive processing time {list(b.proc_times)}"))

    setup = inst.setup
    for stage in sorted(setup.applies_to_stages):
        if not 1 <= stage <= q:
            report.append(Violation("bounds", f"setup applies to stage {stage} outside 1..{q}"))
    if setup.mode == MATRIX:
        report.extend(_check_table(setup.matrix, lambda t: t.key, "setup matrix"))
        known = setup.known_types()
        for b in inst.buses:
            if b.bus_type not in known:
                report.append(Violation("label", f"J_{b.id} type {b.bus_type.key} missing from setup matrix"))
    elif setup.mode == FACTORS:
        for name, table in setup.factors.items():
            report.extend(_check_table(table, str, f"factor {name}"))
    else:
        report.append(Violation("mode", f"unknown setup mode {setup.mode!r}"))
    return report


# ------------------------------------------------------- built-in fixture

_BUILTIN_TYPES = {
    1: ("Type1", "Color1"), 2: ("Type3", "Color2"), 3: ("Type2", "Color1"),
    4: ("Type2", "Color1"), 5: ("Type1", "Color1"), 6: ("Type2", "Color2"),
    7: ("Type1", "Color3"), 8: ("Type1", "Color1"), 9: ("Type2", "Color2"),
    10: ("Type3", "Color2"), 11: ("Type1", "Color3"), 12: ("Type1", "Color3"),
    13: ("Type3", "Color2"), 14: ("Type2", "Color2"), 15: ("Type2", "Color1"),
    16: ("Type1", "Color1"), 17: ("Type1", "Color3"), 18: ("Type3", "Color2"),
    19: ("Type2", "Color1"), 20: ("Type2", "Color2"), 21: ("Type3", "Color2"),
    22: ("Type2", "Color1"),
}

_BUILTIN_PROC = {
    1: (8, 30, 34, 42), 2: (11, 38, 38, 36), 3: (15, 28, 44, 26),
    4: (19, 25, 42, 24), 5: (10, 26, 52, 34), 6: (16, 36, 40, 30),
    7: (12, 20, 46, 28), 8: (21, 24, 48, 32), 9: (22, 22, 35, 38),
    10: (13, 32, 36, 40), 11: (20, 35, 45, 44), 12: (14, 34, 50, 22),
    13: (8, 30, 34, 42), 14: (11, 38, 38, 36), 15: (15, 28, 44, 26),
    16: (19, 25, 42, 24), 17: (10, 26, 52, 34), 18: (16, 36, 40, 30),
    19: (12, 20, 46, 28), 20: (21, 24, 48, 32), 21: (22, 22, 35, 38),
    22: (13, 32, 36, 40),
}

BUILTIN_MATRIX_ORDER = (
    BusType("Type1", "Color1"),
    BusType("Type2", "Color1"),
    BusType("Type3", "Color2"),
    BusType("Type2", "Color2"),
    BusType("Type1", "Color3"),
)

BUILTIN_MATRIX_ROWS = (
    (0, 6, 16, 14, 9),
    (6, 0, 16, 8, 15),
    (16, 16, 0, 8, 16),
    (14, 8, 8, 0, 14),
    (9, 15, 16, 14, 0),
)

BUILTIN_FACTORS = {
    "model": {("Type1", "Type2"): 10, ("Type1", "Type3"): 4, ("Type2", "Type3"): 14},
    "color": {("Color1", "Color2"): 13, ("Color1", "Color3"): 17, ("Color2", "Color3"): 12},
}


def _builtin_buses() -> tuple[Bus, ...]:
    return tuple(Bus(s, BusType(*_BUILTIN_TYPES[s]), _BUILTIN_PROC[s]) for s in range(1, 23))


def _symmetric_table(pairs: Mapping[tuple[str, str], int]) -> dict[str, dict[str, int]]:
    labels = sorted({x for pair in pairs for x in pair})
    table = {u: {u: 0} for u in labels}
    for (u, v), value in pairs.items():
        table[u][v] = value
        table[v][u] = value
    return table


def builtin_paper_instance() -> Instance:
    """The 22-bus, 4-stage workshop with a 4x3 routing buffer after stage 1."""
    matrix = {
        a: {b: BUILTIN_MATRIX_ROWS[x][y] for y, b in enumerate(BUILTIN_MATRIX_ORDER)}
        for x, a in enumerate(BUILTIN_MATRIX_ORDER)
    }
    return Instance(
        stages=(3, 2, 3, 3),
        buffer=BufferSpec(after_stage=1, rows=4, cols=3),
        buses=_builtin_buses(),
        setup=SetupModel(MATRIX, frozenset({2}), matrix=matrix),
    )


def paper_factors_instance() -> Instance:
    """Same workshop, but setup driven by per-property change times (factors mode)."""
    factors = {name: _symmetric_table(pairs) for name, pairs in BUILTIN_FACTORS.items()}
    base = builtin_paper_instance()
    return Instance(base.stages, base.buffer, base.buses, SetupModel(FACTORS, frozenset({2}), factors=factors))
