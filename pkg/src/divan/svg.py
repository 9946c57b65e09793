"""Minimal deterministic SVG writer.

Everything is plain string assembly with fixed two-decimal coordinate
formatting and no timestamps, so identical inputs always produce
byte-identical files.
"""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

__all__ = ["PALETTE", "SvgDoc", "fmt", "lerp_color"]

# Fixed 8-color palette for cluster markers and legends.
PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
)


def fmt(x: float) -> str:
    return f"{float(x):.2f}"


def lerp_color(low: tuple[int, int, int], high: tuple[int, int, int], t: float) -> str:
    """Linear interpolation between two RGB colors, ``t`` clamped to [0, 1]."""
    t = min(max(t, 0.0), 1.0)
    channels = (round(lo + (hi - lo) * t) for lo, hi in zip(low, high))
    return "#{:02x}{:02x}{:02x}".format(*channels)


class SvgDoc:
    """Accumulates SVG elements and writes a standalone UTF-8 document."""

    def __init__(self, width: float, height: float):
        self.width = width
        self.height = height
        self.parts: list[str] = []

    def _attrs(self, attrs: dict) -> str:
        return "".join(f" {k.replace('_', '-')}={quoteattr(str(v))}" for k, v in attrs.items() if v is not None)

    def rect(self, x, y, w, h, **attrs):
        self.parts.append(f"<rect x={quoteattr(fmt(x))} y={quoteattr(fmt(y))} width={quoteattr(fmt(w))} height={quoteattr(fmt(h))}{self._attrs(attrs)}/>")

    def circle(self, cx, cy, r, title: str | None = None, **attrs):
        head = f"<circle cx={quoteattr(fmt(cx))} cy={quoteattr(fmt(cy))} r={quoteattr(fmt(r))}{self._attrs(attrs)}"
        if title is None:
            self.parts.append(head + "/>")
        else:
            self.parts.append(head + f"><title>{escape(title)}</title></circle>")

    def line(self, x1, y1, x2, y2, **attrs):
        attrs.setdefault("stroke", "#333333")
        self.parts.append(
            f"<line x1={quoteattr(fmt(x1))} y1={quoteattr(fmt(y1))} x2={quoteattr(fmt(x2))} y2={quoteattr(fmt(y2))}{self._attrs(attrs)}/>"
        )

    def text(self, x, y, content: str, **attrs):
        self.parts.append(
            f"<text x={quoteattr(fmt(x))} y={quoteattr(fmt(y))}{self._attrs(attrs)}>{escape(content)}</text>"
        )

    def tostring(self) -> str:
        header = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{fmt(self.width)}" height="{fmt(self.height)}" '
            f'viewBox="0 0 {fmt(self.width)} {fmt(self.height)}">'
        )
        return "\n".join([header, *self.parts, "</svg>"]) + "\n"

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(self.tostring(), encoding="utf-8", newline="\n")
        return path
