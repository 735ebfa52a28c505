import math
import re
import xml.etree.ElementTree as ET

import numpy as np

from pipedreams.pipedream import from_tiles, sample, trace
from pipedreams.shape import staircase, strip
from pipedreams.svg import render_svg

NS = "{http://www.w3.org/2000/svg}"


def arc_centre(x1, y1, r, sweep, x2, y2):
    """Centre of a small SVG arc (endpoint parameterisation, equal radii, no rotation)."""
    mx, my = (x1 + x2) / 2, (y1 + y2) / 2
    dx, dy = (x2 - x1) / 2, (y2 - y1) / 2
    half = math.hypot(dx, dy)
    h = math.sqrt(max(r * r - half * half, 0.0))
    # SVG endpoint-to-centre conversion with large-arc = 0
    sign = 1 if sweep == 1 else -1
    return mx + sign * (-dy) * h / half, my + sign * dx * h / half


def parse_path(d):
    tokens = re.findall(r"[MLA]|-?\d+(?:\.\d+)?", d)
    pos, i, segs = None, 0, []
    while i < len(tokens):
        cmd = tokens[i]
        if cmd == "M":
            pos = (float(tokens[i + 1]), float(tokens[i + 2]))
            i += 3
        elif cmd == "L":
            nxt = (float(tokens[i + 1]), float(tokens[i + 2]))
            segs.append(("L", pos, nxt))
            pos, i = nxt, i + 3
        else:
            r, sweep = float(tokens[i + 1]), int(tokens[i + 5])
            nxt = (float(tokens[i + 6]), float(tokens[i + 7]))
            segs.append(("A", pos, nxt, arc_centre(*pos, r, sweep, *nxt)))
            pos, i = nxt, i + 8
    return segs


def test_single_cross_box():
    pd = from_tiles(staircase(2), [1])
    svg = render_svg(pd, trace(pd))
    root = ET.fromstring(svg)
    paths = root.findall(f".//{NS}path")
    assert len(paths) == 2
    for p in paths:
        kinds = [s[0] for s in parse_path(p.get("d"))]
        assert kinds == ["L"]


def test_staircase_structure_and_determinism():
    pd = sample(staircase(8), 0.5, 17)
    r = trace(pd)
    a = render_svg(pd, r)
    b = render_svg(pd, trace(pd))
    assert a == b
    root = ET.fromstring(a)
    paths = root.findall(f".//{NS}path")
    assert len(paths) == sum(1 for l in r.lengths if l >= 0) == 8
    assert len(root.findall(f".//{NS}g[@id='grid']/{NS}rect")) == len(pd.shape)


def test_arcs_turn_about_box_corners():
    # every arc centre must sit on a lattice corner of the grid, and bump arcs
    # must stay inside their box (centre on the box's NW or SE corner)
    scale = 40.0
    pd = sample(strip(6, 3), 0.5, 5)
    r = trace(pd)
    svg = render_svg(pd, r, scale=scale, labels=False)
    root = ET.fromstring(svg)
    for p in root.findall(f".//{NS}path"):
        for seg in parse_path(p.get("d")):
            if seg[0] != "A":
                continue
            (x1, y1), (x2, y2), (cx, cy) = seg[1], seg[2], seg[3]
            assert abs(cx / scale - round(cx / scale)) < 1e-6
            assert abs(cy / scale - round(cy / scale)) < 1e-6
            # the arc midpoint lies between the chord and the centre's opposite side
            mx, my = (x1 + x2) / 2, (y1 + y2) / 2
            assert math.hypot(mx - cx, my - cy) < scale / 2


def test_bump_arc_centres_inside_shape_boxes():
    scale = 10.0
    s = staircase(5)
    pd = from_tiles(s, np.zeros(len(s)))
    r = trace(pd)
    svg = render_svg(pd, r, scale=scale, labels=False, margin=0)
    x0, y1 = int(s.xs.min()), int(s.ys.max()) + 1
    corners = set()
    for b in s.boxes():
        corners.add((b.x, b.y + 1))  # NW corner
        corners.add((b.x + 1, b.y))  # SE corner
    root = ET.fromstring(svg)
    for p in root.findall(f".//{NS}path"):
        for seg in parse_path(p.get("d")):
            cx, cy = seg[3]
            corner = (round(cx / scale) + x0, y1 - round(cy / scale))
            assert corner in corners
