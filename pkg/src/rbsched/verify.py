"""Independent feasibility check of a ScheduleResult.

Nothing here reuses the simulator or the buffer module: the buffer is
replayed from the trace with its own bookkeeping so that a bug in the
simulator's movement code cannot hide itself.
"""

from __future__ import annotations

from collections import defaultdict

from rbsched.model import Instance
from rbsched.setup_cost import setup_cost_between
from rbsched.simulator import ScheduleResult


def verify_schedule(inst: Instance, result: ScheduleResult) -> list[str]:
    """Return a list of human-readable violations; empty iff feasible."""
    v: list[str] = []
    buses = inst.bus_by_id()
    q = inst.num_stages
    b = inst.buffer.after_stage
    nxt = b + 1

    # which workstations exist, and placement of every bus per stage
    expected_ws = {(l, t) for l, m in enumerate(inst.stages, start=1) for t in range(1, m + 1)}
    seen_ws = set()
    placed = defaultdict(list)  # (bus, stage) -> [(ws, entry)]
    for tl in result.timelines:
        key = (tl.stage, tl.index)
        if key not in expected_ws:
            v.append(f"timeline for unknown workstation WS({tl.stage},{tl.index})")
            continue
        if key in seen_ws:
            v.append(f"duplicate timeline for WS({tl.stage},{tl.index})")
        seen_ws.add(key)
        prev = None
        for e in tl.entries:
            if e.bus not in buses:
                v.append(f"WS{key}: unknown bus J_{e.bus}")
                continue
            placed[e.bus, tl.stage].append((tl.index, e))
            tw = buses[e.bus].proc_times[tl.stage - 1]
            if e.end != e.start + tw:
                v.append(f"duration: J_{e.bus} on WS{key} ends {e.end} != start {e.start} + {tw}")
            if tw > 0 and not e.end > e.start:
                v.append(f"positive-duration: J_{e.bus} on WS{key} has end {e.end} <= start {e.start}")
            if not e.setup_start <= e.start:
                v.append(f"J_{e.bus} on WS{key}: setup_start {e.setup_start} after start {e.start}")
            if e.setup_start < 0:
                v.append(f"J_{e.bus} on WS{key}: negative time {e.setup_start}")
            if e.release < e.end:
                v.append(f"J_{e.bus} on WS{key}: released at {e.release} before end {e.end}")
            if e.release != e.end and tl.stage != b:
                v.append(f"J_{e.bus} on WS{key}: blocked off the pre-buffer stage")
            if prev is not None and e.setup_start < prev.release:
                v.append(
                    f"exclusivity: WS{key} J_{e.bus} occupies from {e.setup_start} "
                    f"while J_{prev.bus} holds it until {prev.release}"
                )
            want = 0
            if prev is not None and inst.setup.applies_to(tl.stage):
                want = setup_cost_between(inst.setup, buses[prev.bus].bus_type, buses[e.bus].bus_type)
            if e.start - e.setup_start != want:
                v.append(
                    f"setup: J_{e.bus} on WS{key} has setup {e.start - e.setup_start}, expected {want}"
                )
            prev = e
    for key in sorted(expected_ws - seen_ws):
        v.append(f"missing timeline for WS{key}")

    for bus in buses:
        for l in range(1, q + 1):
            n = len(placed[bus, l])
            if n != 1:
                v.append(f"completeness: J_{bus} processed {n} times at stage {l}")
        for l in range(1, q):
            if placed[bus, l] and placed[bus, l + 1]:
                here = placed[bus, l][0][1]
                there = placed[bus, l + 1][0][1]
                if there.start < here.end:
                    v.append(f"stage-order: J_{bus} starts stage {l + 1} at {there.start} before ending stage {l} at {here.end}")
                if there.setup_start < here.release:
                    v.append(f"J_{bus} claims stage {l + 1} at {there.setup_start} while still on stage {l}")

    v.extend(_replay_buffer(inst, result, placed, nxt))
    return v


def _replay_buffer(inst: Instance, result: ScheduleResult, placed, nxt: int) -> list[str]:
    v: list[str] = []
    n, m = inst.buffer.rows, inst.buffer.cols
    b = inst.buffer.after_stage
    cells: dict[tuple[int, int], int] = {}
    where: dict[int, tuple[int, int]] = {}
    entered, exited = {}, {}
    last_time = 0
    pending_trigger = None
    snapshots: list[tuple[int, bool]] = []  # (time, entry column full) after each event

    def inside(c):
        return 1 <= c[0] <= n and 1 <= c[1] <= m

    for k, ev in enumerate(result.buffer_trace):
        time = ev["time"]
        if time < last_time:
            v.append(f"trace[{k}]: time {time} goes backwards")
        last_time = time
        kind = ev["kind"]
        if kind == "enter":
            bus = ev["bus"]
            entry, cell = tuple(ev["entry"]), tuple(ev["cell"])
            if bus in entered:
                v.append(f"trace[{k}]: J_{bus} enters the buffer twice")
            if entry[1] != 1 or not inside(entry):
                v.append(f"trace[{k}]: J_{bus} enters at {entry}, not an entry cell")
            if cell[0] != entry[0] or cell[1] < entry[1] or not inside(cell):
                v.append(f"trace[{k}]: J_{bus} rolls from {entry} to {cell}")
            for j in range(entry[1], cell[1] + 1):
                if (entry[0], j) in cells:
                    v.append(f"trace[{k}]: J_{bus} passes occupied cell {(entry[0], j)}")
            cells[cell] = bus
            where[bus] = cell
            entered[bus] = time
            if len(cells) > n * m:
                v.append(f"trace[{k}]: buffer holds {len(cells)} buses, capacity {n * m}")
            if placed[bus, b] and placed[bus, b][0][1].release != time:
                v.append(f"trace[{k}]: J_{bus} enters at {time} but leaves stage {b} at {placed[bus, b][0][1].release}")
        elif kind == "exit":
            bus, cell = ev["bus"], tuple(ev["cell"])
            if pending_trigger is not None:
                v.append(f"trace[{k}]: exit before the previous linkage was recorded")
            if where.get(bus) != cell:
                v.append(f"trace[{k}]: J_{bus} leaves {cell} but is at {where.get(bus)}")
            elif any((cell[0], j) in cells for j in range(cell[1] + 1, m + 1)):
                v.append(f"trace[{k}]: J_{bus} leaves {cell} but is not its lane head")
            cells.pop(cell, None)
            where.pop(bus, None)
            exited[bus] = time
            pending_trigger = cell
            if placed[bus, nxt] and placed[bus, nxt][0][1].setup_start != time:
                v.append(f"trace[{k}]: J_{bus} leaves the buffer at {time} but stage {nxt} claims it at "
                         f"{placed[bus, nxt][0][1].setup_start}")
        elif kind == "linkage":
            trigger = tuple(ev["trigger"])
            if pending_trigger != trigger:
                v.append(f"trace[{k}]: linkage triggered at {trigger}, expected {pending_trigger}")
            pending_trigger = None
            snapshot = {(i, j): bus for i, row in enumerate(ev["grid_before"], start=1)
                        for j, bus in enumerate(row, start=1) if bus is not None}
            if snapshot != cells:
                v.append(f"trace[{k}]: recorded grid_before disagrees with replayed buffer")
            vacant = trigger
            moved = set()
            for x, mv in enumerate(ev["moves"]):
                bus, src, dst = mv["bus"], tuple(mv["from"]), tuple(mv["to"])
                forward = dst == (src[0], src[1] + 1)
                lateral = dst[1] == src[1] and abs(dst[0] - src[0]) == 1
                if dst != vacant:
                    v.append(f"trace[{k}] move {x}: fills {dst}, vacant cell is {vacant}")
                if not (forward or lateral):
                    v.append(f"trace[{k}] move {x}: {src}->{dst} is not a legal move")
                if cells.get(src) != bus or dst in cells:
                    v.append(f"trace[{k}] move {x}: J_{bus} {src}->{dst} inconsistent with buffer")
                if bus in moved:
                    v.append(f"trace[{k}] move {x}: J_{bus} moves twice")
                moved.add(bus)
                cells.pop(src, None)
                cells[dst] = bus
                where[bus] = dst
                vacant = src
        else:
            v.append(f"trace[{k}]: unknown event kind {kind!r}")
        full = all((i, 1) in cells for i in range(1, n + 1))
        if snapshots and snapshots[-1][0] == time:
            snapshots[-1] = (time, full)
        else:
            snapshots.append((time, full))

    if cells:
        v.append(f"buffer not empty at the end: {sorted(cells.values())}")
    for bus in inst.bus_by_id():
        if bus not in entered or bus not in exited:
            v.append(f"flow: J_{bus} entered={bus in entered} exited={bus in exited}")
        elif exited[bus] < entered[bus]:
            v.append(f"flow: J_{bus} leaves the buffer before entering it")

    # a bus may only be held on its workstation while the entry column is full
    for bus in inst.bus_by_id():
        if not placed[bus, b]:
            continue
        e = placed[bus, b][0][1]
        if e.release == e.end:
            continue
        state_at_end = [full for t, full in snapshots if t <= e.end]
        during = [full for t, full in snapshots if e.end < t < e.release]
        if (state_at_end and not state_at_end[-1]) or not state_at_end or not all(during):
            v.append(f"blocking: J_{bus} held stage {b} from {e.end} to {e.release} with entry space free")
    return v
