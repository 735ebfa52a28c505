"""Deterministic SVG rendering of a traced pipe dream."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .pipedream import PipeDream, Routing

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)

# midpoints of box sides relative to the lower-left corner
_MID = {"W": (0.0, 0.5), "S": (0.5, 0.0), "N": (0.5, 1.0), "E": (1.0, 0.5)}


# sweep flags: SVG draws flag 1 clockwise on screen; a W->N bump turns
# counterclockwise about the box's NW corner, an S->E bump clockwise about its SE corner


def _num(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("", "-0") else s


def render_svg(
    pd: PipeDream,
    routing: Routing,
    scale: float = 40.0,
    labels: bool = True,
    grid: bool = True,
    margin: float | None = None,
) -> str:
    s = pd.shape
    margin = scale if margin is None else margin
    if len(s):
        x0, x1 = int(s.xs.min()), int(s.xs.max()) + 1
        y0, y1 = int(s.ys.min()), int(s.ys.max()) + 1
    else:
        x0 = x1 = y0 = y1 = 0
    width = (x1 - x0) * scale + 2 * margin
    height = (y1 - y0) * scale + 2 * margin

    def pt(x: float, y: float) -> str:
        return f"{_num((x - x0) * scale + margin)} {_num((y1 - y) * scale + margin)}"

    r = _num(scale / 2)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_num(width)}" '
        f'height="{_num(height)}" viewBox="0 0 {_num(width)} {_num(height)}">',
        f'<rect x="0" y="0" width="{_num(width)}" height="{_num(height)}" fill="white"/>',
    ]
    if grid:
        out.append('<g id="grid" fill="none" stroke="#cccccc" stroke-width="1">')
        for bx, by in zip(s.xs.tolist(), s.ys.tolist()):
            X, Y = pt(bx, by + 1).split()
            out.append(f'<rect x="{X}" y="{Y}" width="{_num(scale)}" height="{_num(scale)}"/>')
        out.append("</g>")

    out.append(f'<g id="pipes" fill="none" stroke-width="{_num(max(1.0, scale / 10))}" stroke-linecap="round">')
    for label, path in enumerate(routing.paths, start=1):
        if not path:
            continue
        first = path[0]
        mx, my = _MID[first.enter]
        cmds = [f"M {pt(first.box.x + mx, first.box.y + my)}"]
        prev = None
        for v in path:
            bx, by = v.box
            if prev is not None and (bx, by) == (prev.box.x + 1, prev.box.y + 1):
                # boundary elbow around the corner shared with the previous box
                ex, ey = _MID[v.enter]
                sweep = 1 if prev.exit == "N" else 0
                cmds.append(f"A {r} {r} 0 0 {sweep} {pt(bx + ex, by + ey)}")
            ex, ey = _MID[v.exit]
            if v.cross:
                cmds.append(f"L {pt(bx + ex, by + ey)}")
            else:
                sweep = 0 if v.enter == "W" else 1
                cmds.append(f"A {r} {r} 0 0 {sweep} {pt(bx + ex, by + ey)}")
            prev = v
        colour = PALETTE[(label - 1) % len(PALETTE)]
        out.append(f'<path id="pipe-{label}" stroke="{colour}" d="{" ".join(cmds)}"/>')
    out.append("</g>")

    if labels:
        size = _num(scale / 3)
        out.append(f'<g id="labels" font-family="sans-serif" font-size="{size}" fill="black">')
        for label, e in enumerate(routing.entries, start=1):
            if e.box is None:
                continue
            mx, my = _MID[e.side]
            dx, dy = (-0.3, 0.0) if e.side == "W" else (0.0, -0.3)
            out.append(
                f'<text x="{pt(e.box.x + mx + dx, e.box.y + my + dy).split()[0]}" '
                f'y="{pt(e.box.x + mx + dx, e.box.y + my + dy).split()[1]}" '
                f'text-anchor="middle">{escape(str(label))}</text>'
            )
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
