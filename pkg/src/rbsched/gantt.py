"""SVG Gantt chart of a ScheduleResult.

Black bars are processing, red bars setups, green bars buffer residency
(entry to dispatch) with linkage instants drawn as green ticks. Every bar
carries its exact start/end in ``data-`` attributes.
"""

from __future__ import annotations

from xml.sax.saxutils import quoteattr

from rbsched.simulator import ScheduleResult

BLACK, RED, GREEN, GREY = "#000000", "#d62728", "#2ca02c", "#9e9e9e"

ROW_H = 18
GAP = 6
LEFT = 90
RIGHT = 20
TOP = 30
PLOT_W = 900


def _rect(cls: str, x0: float, x1: float, y: float, h: float, fill: str, **data) -> str:
    attrs = " ".join(f"data-{k}={quoteattr(str(v))}" for k, v in data.items())
    return (
        f'<rect class="{cls}" x="{x0:.2f}" y="{y:.2f}" width="{max(x1 - x0, 0):.2f}" '
        f'height="{h:.2f}" fill="{fill}" {attrs}/>'
    )


def buffer_residency(result: ScheduleResult) -> list[tuple[int, int, int]]:
    """(bus, entry time, exit time) for every bus that passed the buffer."""
    entered, spans = {}, []
    for ev in result.buffer_trace:
        if ev["kind"] == "enter":
            entered[ev["bus"]] = ev["time"]
        elif ev["kind"] == "exit" and ev["bus"] in entered:
            spans.append((ev["bus"], entered.pop(ev["bus"]), ev["time"]))
    return sorted(spans, key=lambda s: (s[1], s[0]))


def render_gantt(result: ScheduleResult, title: str = "") -> str:
    timelines = sorted(result.timelines, key=lambda tl: (tl.stage, tl.index))
    residency = buffer_residency(result)
    ticks = sorted({ev["time"] for ev in result.buffer_trace if ev["kind"] == "linkage" and ev["moves"]})
    horizon = max(
        [e.release for tl in timelines for e in tl.entries] + [s[2] for s in residency] + [1]
    )
    scale = PLOT_W / horizon

    def x(t: float) -> float:
        return LEFT + t * scale

    body: list[str] = []
    y = TOP
    prev_stage = None
    for tl in timelines:
        if prev_stage is not None and tl.stage != prev_stage:
            y += GAP
        prev_stage = tl.stage
        body.append(f'<text x="{LEFT - 6}" y="{y + ROW_H * 0.75:.2f}" text-anchor="end" font-size="11">'
                    f'OP{tl.stage} WS{tl.index}</text>')
        for e in tl.entries:
            if e.start > e.setup_start:
                body.append(_rect("setup", x(e.setup_start), x(e.start), y, ROW_H, RED,
                                  bus=e.bus, start=e.setup_start, end=e.start))
            body.append(_rect("proc", x(e.start), x(e.end), y, ROW_H, BLACK,
                              bus=e.bus, start=e.start, end=e.end))
            if e.release > e.end:
                body.append(_rect("blocked", x(e.end), x(e.release), y + ROW_H / 3, ROW_H / 3, GREY,
                                  bus=e.bus, start=e.end, end=e.release))
            body.append(f'<text x="{x(e.start) + 2:.2f}" y="{y + ROW_H * 0.75:.2f}" font-size="9" '
                        f'fill="#ffffff">{e.bus}</text>')
        y += ROW_H

    y += GAP * 2
    if residency:
        body.append(f'<text x="{LEFT - 6}" y="{y + 8}" text-anchor="end" font-size="11">buffer</text>')
    lane_h = 6
    for bus, t0, t1 in residency:
        body.append(_rect("buffer", x(t0), x(t1), y, lane_h - 1, GREEN, bus=bus, start=t0, end=t1))
        y += lane_h
    for t in ticks:
        body.append(f'<line class="move-tick" x1="{x(t):.2f}" x2="{x(t):.2f}" y1="{y + 2:.2f}" '
                    f'y2="{y + 10:.2f}" stroke="{GREEN}" data-time="{t}"/>')
    y += 14

    # time axis
    axis_y = y + 4
    body.append(f'<line x1="{LEFT}" x2="{LEFT + PLOT_W}" y1="{axis_y}" y2="{axis_y}" stroke="#000"/>')
    step = _tick_step(horizon)
    for t in range(0, horizon + 1, step):
        body.append(f'<line x1="{x(t):.2f}" x2="{x(t):.2f}" y1="{axis_y}" y2="{axis_y + 4}" stroke="#000"/>')
        body.append(f'<text x="{x(t):.2f}" y="{axis_y + 15}" text-anchor="middle" font-size="10">{t}</text>')
    body.append(f'<text x="{LEFT + PLOT_W / 2}" y="{axis_y + 30}" text-anchor="middle" '
                f'font-size="11">time (min)</text>')

    legend_y = axis_y + 44
    legend = []
    for k, (label, color) in enumerate((("processing", BLACK), ("setup", RED), ("buffer", GREEN))):
        lx = LEFT + k * 130
        legend.append(f'<rect x="{lx}" y="{legend_y}" width="14" height="10" fill="{color}"/>')
        legend.append(f'<text x="{lx + 18}" y="{legend_y + 9}" font-size="11">{label}</text>')

    height = legend_y + 24
    width = LEFT + PLOT_W + RIGHT
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="#ffffff"/>',
    ]
    if title:
        head.append(f'<text x="{LEFT}" y="18" font-size="13">{_escape(title)}</text>')
    return "\n".join(head + body + ['<g class="legend">'] + legend + ["</g>", "</svg>"]) + "\n"


def _tick_step(horizon: int) -> int:
    for step in (1, 2, 5, 10, 20, 25, 50, 100, 200, 500, 1000):
        if horizon / step <= 12:
            return step
    return 10 ** len(str(horizon))


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
