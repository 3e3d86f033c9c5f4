"""Quick-look dataset reports: a delimited placemark summary plus rendered
overview figures, for eyeballing an attribute database before serving it."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from mpl_toolkits.mplot3d.art3d import Poly3DCollection

from .geo import GeoPoint
from .kml import Document, Polygon
from .spatial import SpatialIndex

# Rough meters-per-degree at city scale; plotting only.
_M_PER_DEG_LAT = 110_540.0
_M_PER_DEG_LNG_EQUATOR = 111_320.0


def write_placemark_table(document: Document, index: SpatialIndex, out_path: Path) -> None:
    """Tab-separated summary, one placemark per row, document order."""
    lines = ["id\tkind\tlat\tlng\tname"]
    names = {pm.id: pm.name for pm in document.placemarks}
    kinds = {pm.id: ("polygon" if isinstance(pm.geometry, Polygon) else "point")
             for pm in document.placemarks}
    for entry in index.entries:
        name = names.get(entry.placemark_id, "").replace("\t", " ")
        lines.append(f"{entry.placemark_id}\t{kinds[entry.placemark_id]}\t"
                     f"{entry.point.lat_deg:.9f}\t{entry.point.lng_deg:.9f}\t{name}")
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _ring_xy(vertices) -> tuple[list[float], list[float]]:
    return [v.lng_deg for v in vertices], [v.lat_deg for v in vertices]


def render_overview_map(document: Document, index: SpatialIndex, out_path: Path) -> None:
    """2D map: polygon footprints, representative-point markers, id labels."""
    fig, ax = plt.subplots(figsize=(8, 8))
    for pm in document.placemarks:
        if isinstance(pm.geometry, Polygon):
            xs, ys = _ring_xy(pm.geometry.outer.vertices)
            ax.fill(xs, ys, alpha=0.35, edgecolor="tab:blue", facecolor="tab:blue")
            for inner in pm.geometry.inners:
                xs, ys = _ring_xy(inner.vertices)
                ax.fill(xs, ys, edgecolor="tab:blue", facecolor="white")
    for entry in index.entries:
        ax.plot(entry.point.lng_deg, entry.point.lat_deg, marker="v", color="tab:red",
                markersize=8)
        ax.annotate(entry.placemark_id, (entry.point.lng_deg, entry.point.lat_deg),
                    textcoords="offset points", xytext=(6, 6), fontsize=8)
    if index.entries:
        mean_lat = sum(e.point.lat_deg for e in index.entries) / len(index.entries)
        cos_lat = max(math.cos(math.radians(mean_lat)), 1e-6)
        ax.set_aspect(1.0 / cos_lat)
    ax.set_xlabel("longitude (°)")
    ax.set_ylabel("latitude (°)")
    ax.set_title("placemark overview")
    ax.grid(True, linewidth=0.3, alpha=0.5)
    fig.savefig(out_path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def render_scene_preview(document: Document, index: SpatialIndex, out_path: Path) -> None:
    """2.5D preview: extruded footprints and pedestal markers in local meters."""
    fig = plt.figure(figsize=(8, 6))
    ax = fig.add_subplot(projection="3d")
    if index.entries:
        lat0 = sum(e.point.lat_deg for e in index.entries) / len(index.entries)
        lng0 = sum(e.point.lng_deg for e in index.entries) / len(index.entries)
    else:
        lat0 = lng0 = 0.0
    m_per_deg_lng = _M_PER_DEG_LNG_EQUATOR * math.cos(math.radians(lat0))

    def xy(p: GeoPoint) -> tuple[float, float]:
        return (p.lng_deg - lng0) * m_per_deg_lng, (p.lat_deg - lat0) * _M_PER_DEG_LAT

    for pm in document.placemarks:
        if isinstance(pm.geometry, Polygon):
            base = [xy(v) for v in pm.geometry.outer.vertices[:-1]]
            h = pm.geometry.extrude_height_m
            faces = [[(x, y, 0.0) for x, y in base],
                     [(x, y, h) for x, y in base]]
            for i in range(len(base)):
                j = (i + 1) % len(base)
                faces.append([(*base[i], 0.0), (*base[j], 0.0), (*base[j], h), (*base[i], h)])
            ax.add_collection3d(Poly3DCollection(
                faces, alpha=0.6, facecolor="tab:blue", edgecolor="black", linewidths=0.4))
        elif isinstance(pm.geometry, GeoPoint):
            x, y = xy(pm.geometry)
            ax.plot([x, x], [y, y], [0.0, 10.0], color="tab:red", linewidth=2)
            ax.scatter([x], [y], [10.0], color="tab:red", s=24)
    if index.entries:
        xs, ys = zip(*(xy(e.point) for e in index.entries))
        pad = 30.0
        ax.set_xlim(min(xs) - pad, max(xs) + pad)
        ax.set_ylim(min(ys) - pad, max(ys) + pad)
    ax.set_zlim(0, 25)
    ax.set_xlabel("east (m)")
    ax.set_ylabel("north (m)")
    ax.set_zlabel("height (m)")
    ax.set_title("extruded footprint preview")
    ax.view_init(elev=20.0, azim=-85.0)
    fig.savefig(out_path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def write_report(document: Document, index: SpatialIndex, out_dir: str | Path) -> list[Path]:
    """Write the TSV summary and both figures; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = [
        out_dir / "placemarks.tsv",
        out_dir / "overview_map.png",
        out_dir / "scene_preview.png",
    ]
    write_placemark_table(document, index, outputs[0])
    render_overview_map(document, index, outputs[1])
    render_scene_preview(document, index, outputs[2])
    return outputs
