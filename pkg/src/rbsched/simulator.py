"""Event-driven simulation of the multi-stage shop with a routing buffer.

Stages are 1-based. The routing buffer sits between stage ``b`` and stage
``b + 1``; a bus finishing stage ``b`` holds its workstation until it can be
parked in the buffer's entry column. Workstations at stage ``b + 1`` pull
lane heads from the buffer; every other stage is fed by an unbounded FIFO
queue (stage 1 by the release sequence).
"""

from __future__ import annotations

import heapq
import json
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import Any, Optional, Sequence

from rbsched import buffer as rb
from rbsched.model import Instance
from rbsched.rng import stream
from rbsched.setup_cost import setup_cost_between, total_buffer_setup_cost

MIN_SETUP_COST = "min-setup-cost"
RANDOM = "random"
MOVEMENTS = (MIN_SETUP_COST, RANDOM)

DISPATCH_MIN_SETUP = "min-setup-vs-last"
DISPATCH_FIFO = "fifo-entry"
DISPATCHES = (DISPATCH_MIN_SETUP, DISPATCH_FIFO)


class DeadlockError(RuntimeError):
    def __init__(self, time: int, blocked: list[str]):
        self.time = time
        self.blocked = blocked
        super().__init__(f"deadlock at t={time}: no event can fire; blocked: {', '.join(blocked) or 'none'}")


@dataclass(frozen=True)
class SchemeConfig:
    movement: str = MIN_SETUP_COST
    dispatch: str = DISPATCH_MIN_SETUP
    allow_early_stop: bool = False
    seed: int = 0
    # entering bus advances along its lane over free cells
    entry_roll: bool = True

    def __post_init__(self):
        if self.movement not in MOVEMENTS:
            raise ValueError(f"movement must be one of {MOVEMENTS}, got {self.movement!r}")
        if self.dispatch not in DISPATCHES:
            raise ValueError(f"dispatch must be one of {DISPATCHES}, got {self.dispatch!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


@dataclass
class TimelineEntry:
    bus: int
    setup_start: int
    start: int
    end: int
    # when the workstation is free again; later than ``end`` while blocked
    release: int

    @property
    def setup(self) -> int:
        return self.start - self.setup_start


@dataclass
class WorkstationTimeline:
    stage: int
    index: int
    entries: list[TimelineEntry] = field(default_factory=list)


@dataclass
class Metrics:
    t_sum: list[list[int]]
    a: list[list[int]]
    wsend_next: int
    makespan: int
    tsum_bj_trace: list[int]

    def t_sum_stage(self, stage: int) -> list[int]:
        return self.t_sum[stage - 1]


@dataclass
class ScheduleResult:
    timelines: list[WorkstationTimeline]
    buffer_trace: list[dict[str, Any]]
    sequence: list[int]
    metrics: Optional[Metrics] = None
    config: Optional[SchemeConfig] = None

    def stage_timelines(self, stage: int) -> list[WorkstationTimeline]:
        return [tl for tl in self.timelines if tl.stage == stage]

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": asdict(self.config) if self.config else None,
            "sequence": list(self.sequence),
            "timelines": [
                {"stage": tl.stage, "index": tl.index, "entries": [asdict(e) for e in tl.entries]}
                for tl in self.timelines
            ],
            "buffer_trace": self.buffer_trace,
            "metrics": asdict(self.metrics) if self.metrics else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ScheduleResult":
        timelines = [
            WorkstationTimeline(tl["stage"], tl["index"], [TimelineEntry(**e) for e in tl["entries"]])
            for tl in d["timelines"]
        ]
        return cls(
            timelines=timelines,
            buffer_trace=d.get("buffer_trace", []),
            sequence=list(d.get("sequence", [])),
            metrics=Metrics(**d["metrics"]) if d.get("metrics") else None,
            config=SchemeConfig(**d["config"]) if d.get("config") else None,
        )


def _cell(c) -> list[int]:
    return [c[0], c[1]]


class _Run:
    def __init__(self, inst: Instance, cfg: SchemeConfig):
        self.inst = inst
        self.cfg = cfg
        self.q = inst.num_stages
        self.b = inst.buffer.after_stage
        self.nxt = self.b + 1
        self.types = inst.types_by_id()
        self.proc = {bus.id: bus.proc_times for bus in inst.buses}
        self.grid = rb.BufferGrid.empty(inst.buffer.rows, inst.buffer.cols)
        self.rng = stream(cfg.seed, "movement")

        self.holding: dict[tuple[int, int], Optional[int]] = {}
        self.last_bus: dict[tuple[int, int], Optional[int]] = {}
        self.current: dict[tuple[int, int], TimelineEntry] = {}
        self.timelines: dict[tuple[int, int], WorkstationTimeline] = {}
        for l, count in enumerate(inst.stages, start=1):
            for t in range(1, count + 1):
                self.holding[l, t] = None
                self.last_bus[l, t] = None
                self.timelines[l, t] = WorkstationTimeline(l, t)

        self.queues: dict[int, deque[int]] = {l: deque() for l in range(1, self.q + 1) if l != self.nxt}
        self.waiting_entry: deque[tuple[int, int]] = deque()  # (bus, stage-b workstation)
        self.entered_at: dict[int, int] = {}
        self.events: list[tuple[int, int, int]] = []
        self.trace: list[dict[str, Any]] = []
        self.finished = 0

    def setup_time(self, stage: int, prev: Optional[int], bus: int) -> int:
        if prev is None or not self.inst.setup.applies_to(stage):
            return 0
        return setup_cost_between(self.inst.setup, self.types[prev], self.types[bus])

    def run(self, sequence: Sequence[int]) -> ScheduleResult:
        self.queues[1].extend(sequence)
        now = 0
        self.settle(now)
        while self.events:
            now = self.events[0][0]
            batch = []
            while self.events and self.events[0][0] == now:
                batch.append(heapq.heappop(self.events))
            for _, l, t in sorted(batch):
                self.complete(now, l, t)
            self.settle(now)
        if self.finished != len(self.inst.buses):
            raise DeadlockError(now, self.blocked_resources())
        timelines = [self.timelines[key] for key in sorted(self.timelines)]
        return ScheduleResult(timelines, self.trace, list(sequence), config=self.cfg)

    def blocked_resources(self) -> list[str]:
        out = [f"WS({l},{t}) holding J_{bus}" for (l, t), bus in self.holding.items() if bus is not None]
        out += [f"J_{bus} queued for stage {l}" for l, qu in self.queues.items() for bus in qu]
        out += [f"J_{bus} parked at {c}" for c, bus in self.grid.occupied()]
        return out

    def release(self, now: int, l: int, t: int) -> None:
        self.current[l, t].release = now
        self.holding[l, t] = None

    def complete(self, now: int, l: int, t: int) -> None:
        bus = self.holding[l, t]
        if l == self.q:
            self.finished += 1
            self.release(now, l, t)
        elif l == self.b:
            # stays on the workstation until the buffer accepts it
            self.waiting_entry.append((bus, t))
        else:
            self.queues[l + 1].append(bus)
            self.release(now, l, t)

    def settle(self, now: int) -> None:
        changed = True
        while changed:
            changed = False
            while self.waiting_entry and rb.has_entry_vacancy(self.grid):
                bus, t = self.waiting_entry.popleft()
                self.enter_buffer(now, bus)
                self.release(now, self.b, t)
                changed = True
            for l in range(1, self.q + 1):
                for t in range(1, self.inst.stages[l - 1] + 1):
                    if self.holding[l, t] is not None:
                        continue
                    if l == self.nxt:
                        if self.grid.count() == 0:
                            break
                        bus = self.dispatch(now, t)
                    else:
                        if not self.queues[l]:
                            break
                        bus = self.queues[l].popleft()
                    self.start(now, l, t, bus)
                    changed = True

    def start(self, now: int, l: int, t: int, bus: int) -> None:
        setup = self.setup_time(l, self.last_bus[l, t], bus)
        begin = now + setup
        end = begin + self.proc[bus][l - 1]
        entry = TimelineEntry(bus, now, begin, end, end)
        self.timelines[l, t].entries.append(entry)
        self.current[l, t] = entry
        self.holding[l, t] = bus
        self.last_bus[l, t] = bus
        heapq.heappush(self.events, (end, l, t))

    def enter_buffer(self, now: int, bus: int) -> None:
        self.grid, cell = rb.place_entering_bus(
            self.grid, bus, self.inst.setup, self.types, roll=self.cfg.entry_roll
        )
        self.entered_at[bus] = now
        self.trace.append({
            "time": now,
            "kind": "enter",
            "bus": bus,
            "entry": [cell[0], self.grid.entry_col],
            "cell": _cell(cell),
            "tsum_bj": total_buffer_setup_cost(self.grid, self.inst.setup, self.types),
        })

    def dispatch(self, now: int, t: int) -> int:
        heads = rb.lane_heads(self.grid)
        if self.cfg.dispatch == DISPATCH_MIN_SETUP:
            prev = self.last_bus[self.nxt, t]
            bus, cell = min(
                heads,
                key=lambda h: (self.setup_time(self.nxt, prev, h[0]), h[1][0], self.entered_at[h[0]]),
            )
        else:
            bus, cell = min(heads, key=lambda h: (self.entered_at[h[0]], h[1][0]))
        self.grid = self.grid.remove(cell)
        self.trace.append({
            "time": now, "kind": "exit", "bus": bus, "cell": _cell(cell),
            "stage": self.nxt, "workstation": t,
        })
        before = self.grid
        if self.cfg.movement == MIN_SETUP_COST:
            chain, cost = rb.select_min_cost_linkage(
                before, cell, self.inst.setup, self.types, self.cfg.allow_early_stop
            )
        else:
            chain = rb.select_random_linkage(before, cell, self.rng, self.cfg.allow_early_stop)
        self.grid = rb.apply_linkage(before, chain)
        if self.cfg.movement != MIN_SETUP_COST:
            cost = total_buffer_setup_cost(self.grid, self.inst.setup, self.types)
        self.trace.append({
            "time": now,
            "kind": "linkage",
            "trigger": _cell(cell),
            "grid_before": before.to_lists(),
            "moves": [mv.to_dict() for mv in chain.moves],
            "tsum_bj": cost,
        })
        return bus


def simulate(inst: Instance, sequence: Sequence[int], cfg: SchemeConfig = SchemeConfig()) -> ScheduleResult:
    """Run one schedule of ``inst`` releasing buses in ``sequence`` order."""
    ids = sorted(b.id for b in inst.buses)
    if sorted(sequence) != ids:
        raise ValueError(f"sequence {list(sequence)} is not a permutation of the bus ids")
    result = _Run(inst, cfg).run(sequence)
    result.metrics = compute_metrics(inst, result)
    return result


def compute_metrics(inst: Instance, result: ScheduleResult) -> Metrics:
    t_sum = [[0] * m for m in inst.stages]
    a = [[0] * m for m in inst.stages]
    for tl in result.timelines:
        setups = [e.start - e.setup_start for e in tl.entries]
        t_sum[tl.stage - 1][tl.index - 1] = sum(setups)
        a[tl.stage - 1][tl.index - 1] = sum(1 for s in setups if s > 0)

    def last_end(stage: int) -> int:
        return max((e.end for tl in result.stage_timelines(stage) for e in tl.entries), default=0)

    return Metrics(
        t_sum=t_sum,
        a=a,
        wsend_next=last_end(inst.next_stage),
        makespan=last_end(inst.num_stages),
        tsum_bj_trace=[ev["tsum_bj"] for ev in result.buffer_trace if ev["kind"] == "linkage"],
    )
