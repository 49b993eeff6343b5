"""Static CSV and SVG rendering of solve trajectories.

Both formats walk the same series of per-iteration sets: every flip's
preprocessed set followed by the terminal set.  The SVG shows one frame
per set with the member parallelogram and the four halfspace boundary
lines; the CSV carries the numbers behind it.
"""

from __future__ import annotations

import csv
import io
import math

from .engine import Certificate
from .lattice import bounding_box
from .numerics import format_scalar


def _frames(cert: Certificate):
    """(members, halfspaces, label, min_f) per visited set, terminal last."""
    frames = []
    for entry in cert.trace:
        frames.append((entry.before.members(), entry.halfspaces,
                       entry.case.value, entry.f_before))
    frames.append((cert.final_set.members(), cert.gp.halfspaces,
                   cert.status, cert.argmin_value))
    return frames


def certificate_to_csv(cert: Certificate) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["iteration", "case",
                     "m0_x", "m0_y", "m1_x", "m1_y",
                     "m2_x", "m2_y", "m3_x", "m3_y", "min_f"])
    for index, (members, _, label, min_f) in enumerate(_frames(cert)):
        row = [index, label]
        for point in members:
            row.extend(point)
        row.append(format_scalar(min_f))
        writer.writerow(row)
    return out.getvalue()


_FRAME_SIZE = 220
_PAD = 10


def certificate_to_svg(cert: Certificate) -> str:
    frames = _frames(cert)
    all_points = [p for members, _, _, _ in frames for p in members]
    low, high = bounding_box(all_points)
    low = (low[0] - 2, low[1] - 2)
    high = (high[0] + 2, high[1] + 2)
    span = max(high[0] - low[0], high[1] - low[1])
    scale = (_FRAME_SIZE - 2 * _PAD) / span

    def to_px(point):
        x = _PAD + (float(point[0]) - low[0]) * scale
        y = _PAD + (high[1] - float(point[1])) * scale
        return x, y

    total_width = _FRAME_SIZE * len(frames)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{total_width}" height="{_FRAME_SIZE}" '
        f'viewBox="0 0 {total_width} {_FRAME_SIZE}">'
    ]
    for index, (members, halfspaces, label, _) in enumerate(frames):
        parts.append(
            f'<svg x="{index * _FRAME_SIZE}" y="0" '
            f'width="{_FRAME_SIZE}" height="{_FRAME_SIZE}">'
        )
        parts.append(
            f'<rect x="0" y="0" width="{_FRAME_SIZE}" height="{_FRAME_SIZE}" '
            'fill="white" stroke="#cccccc"/>'
        )
        for gx in range(low[0], high[0] + 1):
            for gy in range(low[1], high[1] + 1):
                px, py = to_px((gx, gy))
                parts.append(
                    f'<circle cx="{px:.3f}" cy="{py:.3f}" r="1.5" fill="#999999"/>'
                )
        hull = [members[0], members[1], members[3], members[2]]
        coords = " ".join("{:.3f},{:.3f}".format(*to_px(p)) for p in hull)
        parts.append(
            f'<polygon points="{coords}" fill="none" stroke="black" '
            'stroke-dasharray="4 3" stroke-width="1.5"/>'
        )
        for w, g in halfspaces:
            parts.append(_halfspace_line(w, g, to_px))
        parts.append(
            f'<text x="{_PAD}" y="{_FRAME_SIZE - 4}" font-size="10" '
            f'fill="black">{index}: {label}</text>'
        )
        parts.append("</svg>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _halfspace_line(w, g, to_px) -> str:
    """Boundary of grad . (x - w) <= 0: the line through w orthogonal to g.

    A zero gradient has no boundary; a degenerate zero-length line keeps
    the per-frame element count fixed at four.
    """
    gx, gy = float(g[0]), float(g[1])
    wx, wy = to_px(w)
    norm = math.hypot(gx, gy)
    if norm == 0.0:
        return (f'<line x1="{wx:.3f}" y1="{wy:.3f}" x2="{wx:.3f}" y2="{wy:.3f}" '
                'stroke="#cc2222" stroke-width="1"/>')
    # Perpendicular direction, long enough to cross the frame.
    dx, dy = -gy / norm, gx / norm
    reach = 2 * _FRAME_SIZE
    x1, y1 = wx - dx * reach, wy + dy * reach
    x2, y2 = wx + dx * reach, wy - dy * reach
    return (f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" '
            'stroke="#cc2222" stroke-width="1"/>')


def line_element_count(svg_text: str) -> int:
    return svg_text.count("<line ")
