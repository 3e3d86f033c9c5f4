"""Parser, validator, and serializer for the KML-subset attribute database.

The accepted grammar is the subset: kml, Document, Style (IconStyle, color,
Icon, href), Placemark, name, description, styleUrl, Point, Polygon,
tessellate, outerBoundaryIs, innerBoundaryIs, LinearRing, coordinates.
Anything else is skipped with an UNKNOWN_ELEMENT warning in lenient mode.

Issue codes:
    parse-time: MALFORMED_XML, MULTIPLE_NAMES, UNCLOSED_RING, DEGENERATE_RING,
        BAD_COORDINATE, UNKNOWN_ELEMENT, MISSING_GEOMETRY, EXTRA_GEOMETRY
    validation: UNRESOLVED_STYLE, DUPLICATE_ID, EMPTY_NAME, TESSELLATE_RANGE

In strict mode the first violation of MULTIPLE_NAMES, UNCLOSED_RING,
DEGENERATE_RING or BAD_COORDINATE (evaluated in that order per placemark)
aborts the parse with the offending line number; everything else stays a
warning in both modes.
"""

from __future__ import annotations

import math
import re
import xml.parsers.expat
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

from .geo import GeoPoint, InvalidCoordinateError

MEDIA_TYPE_KML = "application/vnd.google-earth.kml+xml"

AXIS_LON_LAT = "lon-lat"  # KML standard tuple order
AXIS_LAT_LON = "lat-lon"  # order used by legacy attribute files
MODE_LENIENT = "lenient"
MODE_STRICT = "strict"

SEVERITY_WARNING = "warning"
SEVERITY_ERROR = "error"

# Heights are a viewer hint only; the attribute files carry none, so a
# constant keeps the scene view deterministic. Not serialized.
DEFAULT_EXTRUDE_HEIGHT_M = 8.0

_RING_CLOSURE_TOL_DEG = 1e-12


class MalformedXmlError(ValueError):
    """Input is not parseable XML."""

    code = "MALFORMED_XML"

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class StrictParseError(ValueError):
    """Strict-mode parse abort; carries the violated rule and line."""

    def __init__(self, code: str, message: str, line: int | None = None,
                 placemark_id: str | None = None):
        super().__init__(message)
        self.code = code
        self.line = line
        self.placemark_id = placemark_id


class BadCoordinateError(ValueError):
    """A coordinate string has wrong arity, bad numbers, or out-of-range values."""

    code = "BAD_COORDINATE"


class PlacemarkNotFoundError(KeyError):
    code = "NOT_FOUND"


@dataclass(frozen=True)
class ParseOptions:
    axis_order: str = AXIS_LON_LAT
    mode: str = MODE_LENIENT

    def __post_init__(self) -> None:
        if self.axis_order not in (AXIS_LON_LAT, AXIS_LAT_LON):
            raise ValueError(f"unknown axis order {self.axis_order!r}")
        if self.mode not in (MODE_LENIENT, MODE_STRICT):
            raise ValueError(f"unknown parse mode {self.mode!r}")


@dataclass(frozen=True)
class ValidationIssue:
    severity: str
    code: str
    message: str
    placemark_id: str | None = None
    line: int | None = None


@dataclass(frozen=True)
class LinearRing:
    """Closed ring: first vertex equals last, at least 3 distinct vertices."""

    vertices: tuple[GeoPoint, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 4:
            raise ValueError(f"ring needs >= 4 vertices after closure, got {len(self.vertices)}")
        first, last = self.vertices[0], self.vertices[-1]
        if (abs(first.lat_deg - last.lat_deg) > _RING_CLOSURE_TOL_DEG
                or abs(first.lng_deg - last.lng_deg) > _RING_CLOSURE_TOL_DEG):
            raise ValueError("ring is not closed")
        if len({(v.lat_deg, v.lng_deg) for v in self.vertices}) < 3:
            raise ValueError("ring needs >= 3 distinct vertices")


@dataclass(frozen=True)
class Polygon:
    outer: LinearRing
    inners: tuple[LinearRing, ...] = ()
    tessellate: bool = False
    extrude_height_m: float = DEFAULT_EXTRUDE_HEIGHT_M
    # Raw <tessellate> text, kept so validation can flag values other than
    # "0"/"1". Not part of the document's semantic identity.
    tessellate_source: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Placemark:
    id: str
    name: str
    geometry: GeoPoint | Polygon | None
    description: str = ""
    style_ref: str | None = None
    attributes: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("placemark id must be non-empty")
        if self.style_ref is not None and not self.style_ref.startswith("#"):
            raise ValueError(f"style_ref must start with '#', got {self.style_ref!r}")


@dataclass(frozen=True)
class Style:
    id: str
    icon_hint: str = ""
    color_hint: str = ""  # 8-hex aabbggrr when present

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("style id must be non-empty")


@dataclass(frozen=True)
class Document:
    placemarks: tuple[Placemark, ...] = ()
    styles: dict[str, Style] = field(default_factory=dict)
    source_uri: str = field(default="", compare=False)


# ---------------------------------------------------------------------------
# Raw XML layer (expat, so every node knows its line number)


class _XmlNode:
    __slots__ = ("tag", "attrs", "line", "children", "text_parts")

    def __init__(self, tag: str, attrs: dict[str, str], line: int):
        self.tag = tag
        self.attrs = attrs
        self.line = line
        self.children: list[_XmlNode] = []
        self.text_parts: list[str] = []

    @property
    def raw_text(self) -> str:
        return "".join(self.text_parts)

    @property
    def text(self) -> str:
        """Element text with whitespace runs collapsed to single spaces."""
        return " ".join(self.raw_text.split())

    def first(self, tag: str) -> "_XmlNode | None":
        for child in self.children:
            if child.tag == tag:
                return child
        return None


def _local_name(tag: str) -> str:
    return tag.rpartition(":")[2]


def _parse_xml(text: str) -> _XmlNode:
    parser = xml.parsers.expat.ParserCreate()
    root: list[_XmlNode] = []
    stack: list[_XmlNode] = []

    def start(tag, attrs):
        node = _XmlNode(_local_name(tag), dict(attrs), parser.CurrentLineNumber)
        if stack:
            stack[-1].children.append(node)
        else:
            root.append(node)
        stack.append(node)

    def end(_tag):
        stack.pop()

    def chars(data):
        if stack:
            stack[-1].text_parts.append(data)

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    try:
        parser.Parse(text, True)
    except xml.parsers.expat.ExpatError as e:
        raise MalformedXmlError(str(e), line=e.lineno) from e
    if not root:
        raise MalformedXmlError("no root element")
    return root[0]


# ---------------------------------------------------------------------------
# Coordinate strings


_COORD_TOKEN = re.compile(r"[^\s,]+|,")


def _scan_coordinate_tuples(s: str) -> tuple[list[list[str]], list[str], bool]:
    """Split a coordinates string into raw tuples.

    Commas separate components and may carry whitespace on either side (a
    tuple can span lines after a comma); bare whitespace between numbers
    separates tuples. Returns (tuples, separator errors, trailing comma?).
    """
    tuples: list[list[str]] = []
    errors: list[str] = []
    cur: list[str] = []
    pending_comma = False
    for m in _COORD_TOKEN.finditer(s):
        tok = m.group()
        if tok == ",":
            if pending_comma:
                errors.append("empty component between commas")
            elif not cur:
                errors.append("comma with no leading component")
            pending_comma = True
        else:
            if cur and not pending_comma:
                tuples.append(cur)
                cur = []
            cur.append(tok)
            pending_comma = False
    trailing_comma = pending_comma and bool(cur)
    if cur:
        tuples.append(cur)
    return tuples, errors, trailing_comma


def _tuple_to_point(components: list[str], axis_order: str) -> GeoPoint:
    """Convert one raw tuple; raises BadCoordinateError."""
    if len(components) not in (2, 3):
        raise BadCoordinateError(
            f"expected 2 or 3 components, got {len(components)}: {','.join(components)}")
    try:
        values = [float(c) for c in components]
    except ValueError:
        raise BadCoordinateError(f"non-numeric component in {','.join(components)}") from None
    if not all(math.isfinite(v) for v in values):
        raise BadCoordinateError(f"non-finite component in {','.join(components)}")
    if axis_order == AXIS_LAT_LON:
        lat, lng = values[0], values[1]
    else:
        lng, lat = values[0], values[1]
    alt = values[2] if len(values) == 3 else 0.0
    try:
        return GeoPoint(lat, lng, alt)
    except InvalidCoordinateError as e:
        raise BadCoordinateError(str(e)) from None


def parse_coordinate_string(s: str, axis_order: str = AXIS_LON_LAT,
                            strict: bool = False) -> list[GeoPoint]:
    """Parse a KML coordinates string into points.

    A trailing comma after the last tuple is tolerated unless strict.
    """
    tuples, errors, trailing_comma = _scan_coordinate_tuples(s)
    if errors:
        raise BadCoordinateError(errors[0])
    if trailing_comma and strict:
        raise BadCoordinateError("trailing comma after coordinate tuple")
    return [_tuple_to_point(t, axis_order) for t in tuples]


# ---------------------------------------------------------------------------
# Document parsing


_KNOWN_CHILDREN = {
    "kml": {"Document"},
    "Document": {"Style", "Placemark"},
    "Style": {"IconStyle"},
    "IconStyle": {"color", "Icon"},
    "Icon": {"href"},
    "Placemark": {"name", "description", "styleUrl", "Point", "Polygon"},
    "Point": {"coordinates"},
    "Polygon": {"tessellate", "outerBoundaryIs", "innerBoundaryIs"},
    "outerBoundaryIs": {"LinearRing"},
    "innerBoundaryIs": {"LinearRing"},
    "LinearRing": {"coordinates"},
}


class _PlacemarkParser:
    """Parses one <Placemark>, applying the fixed rule order.

    Rules fire as MULTIPLE_NAMES, then UNCLOSED_RING, then DEGENERATE_RING,
    then BAD_COORDINATE so that strict mode's first error is deterministic.
    A degenerate ring supersedes the unclosed check.
    """

    def __init__(self, node: _XmlNode, pm_id: str, opts: ParseOptions):
        self.node = node
        self.pm_id = pm_id
        self.opts = opts
        self.strict = opts.mode == MODE_STRICT
        self.issues: list[ValidationIssue] = []
        # (line, message) pairs collected while reading coordinate text
        self.bad_coords: list[tuple[int, str]] = []

    def _warn(self, code: str, message: str, line: int | None) -> None:
        self.issues.append(ValidationIssue(
            SEVERITY_WARNING, code, message, placemark_id=self.pm_id, line=line))

    def _violation(self, code: str, message: str, line: int | None) -> None:
        if self.strict:
            raise StrictParseError(code, message, line=line, placemark_id=self.pm_id)
        self._warn(code, message, line)

    def _unknown(self, child: _XmlNode, context: str) -> None:
        self._warn("UNKNOWN_ELEMENT",
                   f"element <{child.tag}> not supported under <{context}>, skipped",
                   child.line)

    def parse(self) -> Placemark:
        names: list[_XmlNode] = []
        description: _XmlNode | None = None
        style_ref: str | None = None
        geometry_nodes: list[_XmlNode] = []
        for child in self.node.children:
            if child.tag == "name":
                names.append(child)
            elif child.tag == "description":
                if description is None:
                    description = child
                else:
                    self._warn("UNKNOWN_ELEMENT", "extra <description> ignored", child.line)
            elif child.tag == "styleUrl":
                ref = "".join(child.raw_text.split())
                if not ref.startswith("#"):
                    self._warn("UNKNOWN_ELEMENT",
                               f"external styleUrl {ref!r} unsupported, dropped", child.line)
                elif style_ref is None:
                    style_ref = ref
                else:
                    self._warn("UNKNOWN_ELEMENT", "extra <styleUrl> ignored", child.line)
            elif child.tag in ("Point", "Polygon"):
                geometry_nodes.append(child)
            else:
                self._unknown(child, "Placemark")

        if len(names) > 1:
            self._violation("MULTIPLE_NAMES",
                            f"{len(names)} <name> elements; first kept as display name",
                            names[1].line)

        geometry = self._parse_geometry(geometry_nodes)

        for line, message in self.bad_coords:
            self._violation("BAD_COORDINATE", message, line)

        return Placemark(
            id=self.pm_id,
            name=names[0].text if names else "",
            geometry=geometry,
            description=description.text if description is not None else "",
            style_ref=style_ref,
            attributes=tuple(("name", n.text) for n in names),
        )

    def _parse_geometry(self, nodes: list[_XmlNode]) -> GeoPoint | Polygon | None:
        for extra in nodes[1:]:
            self._warn("EXTRA_GEOMETRY", f"extra <{extra.tag}> geometry ignored", extra.line)
        if not nodes:
            self._warn("MISSING_GEOMETRY", "placemark has no Point or Polygon", self.node.line)
            return None
        node = nodes[0]
        geometry = self._parse_point(node) if node.tag == "Point" else self._parse_polygon(node)
        if geometry is None:
            self._warn("MISSING_GEOMETRY", "placemark geometry is empty", node.line)
        return geometry

    def _coordinates(self, parent: _XmlNode) -> tuple[list[GeoPoint], int]:
        """Points from a <coordinates> child; component errors are queued."""
        coords = parent.first("coordinates")
        for child in parent.children:
            if child.tag != "coordinates":
                self._unknown(child, parent.tag)
        if coords is None:
            return [], parent.line
        raw_tuples, errors, trailing_comma = _scan_coordinate_tuples(coords.raw_text)
        for message in errors:
            self.bad_coords.append((coords.line, message))
        if trailing_comma and self.strict:
            self.bad_coords.append((coords.line, "trailing comma after coordinate tuple"))
        points = []
        for raw in raw_tuples:
            try:
                points.append(_tuple_to_point(raw, self.opts.axis_order))
            except BadCoordinateError as e:
                self.bad_coords.append((coords.line, str(e)))
        return points, coords.line

    def _parse_point(self, node: _XmlNode) -> GeoPoint | None:
        points, line = self._coordinates(node)
        if not points:
            return None
        if len(points) > 1:
            self.bad_coords.append((line, f"Point expects one tuple, got {len(points)}"))
        return points[0]

    def _parse_polygon(self, node: _XmlNode) -> GeoPoint | Polygon | None:
        tessellate = False
        tessellate_source: str | None = None
        outer_node: _XmlNode | None = None
        inner_nodes: list[_XmlNode] = []
        for child in node.children:
            if child.tag == "tessellate":
                tessellate_source = child.text
                tessellate = tessellate_source == "1"
            elif child.tag == "outerBoundaryIs":
                if outer_node is None:
                    outer_node = child
                else:
                    self._warn("EXTRA_GEOMETRY", "extra <outerBoundaryIs> ignored", child.line)
            elif child.tag == "innerBoundaryIs":
                inner_nodes.append(child)
            else:
                self._unknown(child, "Polygon")

        rings = []  # (vertices, line), outer first
        outer = self._boundary_vertices(outer_node) if outer_node is not None else None
        if outer is not None:
            rings.append(outer)
        for inner in inner_nodes:
            parsed = self._boundary_vertices(inner)
            if parsed is not None:
                rings.append(parsed)
        if outer is None or not outer[0]:
            return None

        # UNCLOSED_RING pass, then DEGENERATE_RING pass over all rings.
        for vertices, line in rings:
            if self._distinct_count(vertices) >= 3 and not self._is_closed(vertices):
                self._violation("UNCLOSED_RING", "ring first vertex != last; closed", line)
        for vertices, line in rings:
            if self._distinct_count(vertices) < 3:
                self._violation("DEGENERATE_RING",
                                f"ring has {self._distinct_count(vertices)} distinct vertices",
                                line)

        outer_vertices = rings[0][0]
        if self._distinct_count(outer_vertices) < 3:
            # Lenient demotion: the file plainly means a located feature.
            return outer_vertices[0]
        outer_ring = LinearRing(tuple(self._closed(outer_vertices)))
        inner_rings = tuple(
            LinearRing(tuple(self._closed(vertices)))
            for vertices, _ in rings[1:]
            if self._distinct_count(vertices) >= 3
        )
        return Polygon(outer=outer_ring, inners=inner_rings, tessellate=tessellate,
                       tessellate_source=tessellate_source)

    def _boundary_vertices(self, boundary: _XmlNode) -> tuple[list[GeoPoint], int] | None:
        ring_node = boundary.first("LinearRing")
        for child in boundary.children:
            if child.tag != "LinearRing":
                self._unknown(child, boundary.tag)
        if ring_node is None:
            return None
        vertices, line = self._coordinates(ring_node)
        if not vertices:
            return None
        return vertices, line

    @staticmethod
    def _distinct_count(vertices: list[GeoPoint]) -> int:
        return len({(v.lat_deg, v.lng_deg) for v in vertices})

    @staticmethod
    def _is_closed(vertices: list[GeoPoint]) -> bool:
        first, last = vertices[0], vertices[-1]
        return (abs(first.lat_deg - last.lat_deg) <= _RING_CLOSURE_TOL_DEG
                and abs(first.lng_deg - last.lng_deg) <= _RING_CLOSURE_TOL_DEG)

    @classmethod
    def _closed(cls, vertices: list[GeoPoint]) -> list[GeoPoint]:
        return vertices if cls._is_closed(vertices) else vertices + [vertices[0]]


def _parse_style(node: _XmlNode, issues: list[ValidationIssue]) -> Style | None:
    style_id = node.attrs.get("id", "")
    if not style_id:
        issues.append(ValidationIssue(
            SEVERITY_WARNING, "UNKNOWN_ELEMENT", "<Style> without id skipped", line=node.line))
        return None
    icon_hint = ""
    color_hint = ""
    for child in node.children:
        if child.tag == "IconStyle":
            for sub in child.children:
                if sub.tag == "color":
                    color_hint = sub.text
                elif sub.tag == "Icon":
                    href = sub.first("href")
                    if href is not None:
                        icon_hint = href.text
                else:
                    issues.append(ValidationIssue(
                        SEVERITY_WARNING, "UNKNOWN_ELEMENT",
                        f"element <{sub.tag}> not supported under <IconStyle>, skipped",
                        line=sub.line))
        else:
            issues.append(ValidationIssue(
                SEVERITY_WARNING, "UNKNOWN_ELEMENT",
                f"element <{child.tag}> not supported under <Style>, skipped", line=child.line))
    return Style(id=style_id, icon_hint=icon_hint, color_hint=color_hint)


def _assign_ids(placemark_nodes: list[_XmlNode]) -> list[str]:
    """Explicit ids win; missing ids become pm-<ordinal>, dodging collisions."""
    explicit = {n.attrs["id"] for n in placemark_nodes if n.attrs.get("id")}
    assigned: list[str] = []
    taken = set(explicit)
    for ordinal, node in enumerate(placemark_nodes, start=1):
        explicit_id = node.attrs.get("id")
        if explicit_id:
            assigned.append(explicit_id)
            continue
        candidate = f"pm-{ordinal}"
        n = 0
        while candidate in taken:
            n += 1
            candidate = f"pm-{ordinal}-dup{n}"
        taken.add(candidate)
        assigned.append(candidate)
    return assigned


def parse_document(text: str | bytes, opts: ParseOptions | None = None,
                   source_uri: str = "") -> tuple[Document, list[ValidationIssue]]:
    """Parse KML-subset text into a Document plus the deviations found.

    Lenient mode never raises on well-formed XML; strict mode aborts with
    StrictParseError on the first rule violation. Raises MalformedXmlError
    for unparseable input.
    """
    opts = opts or ParseOptions()
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise MalformedXmlError(f"not valid UTF-8: {e}") from e

    root = _parse_xml(text)
    issues: list[ValidationIssue] = []

    doc_node: _XmlNode | None = None
    if root.tag == "kml":
        for child in root.children:
            if child.tag == "Document" and doc_node is None:
                doc_node = child
            else:
                issues.append(ValidationIssue(
                    SEVERITY_WARNING, "UNKNOWN_ELEMENT",
                    f"element <{child.tag}> not supported under <kml>, skipped",
                    line=child.line))
    elif root.tag == "Document":
        doc_node = root
    else:
        issues.append(ValidationIssue(
            SEVERITY_WARNING, "UNKNOWN_ELEMENT",
            f"unsupported root element <{root.tag}>", line=root.line))

    styles: dict[str, Style] = {}
    placemark_nodes: list[_XmlNode] = []
    if doc_node is not None:
        for child in doc_node.children:
            if child.tag == "Style":
                style = _parse_style(child, issues)
                if style is not None:
                    styles[style.id] = style
            elif child.tag == "Placemark":
                placemark_nodes.append(child)
            else:
                issues.append(ValidationIssue(
                    SEVERITY_WARNING, "UNKNOWN_ELEMENT",
                    f"element <{child.tag}> not supported under <Document>, skipped",
                    line=child.line))

    placemarks = []
    for node, pm_id in zip(placemark_nodes, _assign_ids(placemark_nodes)):
        parser = _PlacemarkParser(node, pm_id, opts)
        placemarks.append(parser.parse())
        issues.extend(parser.issues)

    return Document(placemarks=tuple(placemarks), styles=styles,
                    source_uri=source_uri), issues


# ---------------------------------------------------------------------------
# Serialization


def _format_coordinate(p: GeoPoint) -> str:
    out = f"{p.lng_deg:.9f},{p.lat_deg:.9f}"
    if p.alt_m:
        out += f",{p.alt_m:.9f}"
    return out


def _ring_lines(ring: LinearRing, boundary_tag: str, indent: str) -> list[str]:
    coords = " ".join(_format_coordinate(v) for v in ring.vertices)
    return [
        f"{indent}<{boundary_tag}>",
        f"{indent}  <LinearRing>",
        f"{indent}    <coordinates>{coords}</coordinates>",
        f"{indent}  </LinearRing>",
        f"{indent}</{boundary_tag}>",
    ]


def _placemark_lines(pm: Placemark) -> list[str]:
    lines = [f"    <Placemark id={quoteattr(pm.id)}>"]
    name_values = [v for k, v in pm.attributes if k == "name"] or [pm.name]
    for value in name_values:
        lines.append(f"      <name>{escape(value)}</name>")
    if pm.description:
        lines.append(f"      <description>{escape(pm.description)}</description>")
    if pm.style_ref is not None:
        lines.append(f"      <styleUrl>{escape(pm.style_ref)}</styleUrl>")
    if isinstance(pm.geometry, GeoPoint):
        lines.append("      <Point>")
        lines.append(f"        <coordinates>{_format_coordinate(pm.geometry)}</coordinates>")
        lines.append("      </Point>")
    elif isinstance(pm.geometry, Polygon):
        lines.append("      <Polygon>")
        lines.append(f"        <tessellate>{1 if pm.geometry.tessellate else 0}</tessellate>")
        lines.extend(_ring_lines(pm.geometry.outer, "outerBoundaryIs", "        "))
        for inner in pm.geometry.inners:
            lines.extend(_ring_lines(inner, "innerBoundaryIs", "        "))
        lines.append("      </Polygon>")
    lines.append("    </Placemark>")
    return lines


def _style_lines(style: Style) -> list[str]:
    if not style.icon_hint and not style.color_hint:
        return [f"    <Style id={quoteattr(style.id)}></Style>"]
    lines = [f"    <Style id={quoteattr(style.id)}>", "      <IconStyle>"]
    if style.color_hint:
        lines.append(f"        <color>{escape(style.color_hint)}</color>")
    if style.icon_hint:
        lines.append("        <Icon>")
        lines.append(f"          <href>{escape(style.icon_hint)}</href>")
        lines.append("        </Icon>")
    lines.append("      </IconStyle>")
    lines.append("    </Style>")
    return lines


def serialize_document(d: Document) -> str:
    """Canonical KML text: fixed element order, lng,lat order, 9 decimals."""
    lines = ['<?xml version="1.0" encoding="UTF-8"?>', "<kml>"]
    if not d.placemarks and not d.styles:
        lines.append("  <Document></Document>")
    else:
        lines.append("  <Document>")
        for style in d.styles.values():
            lines.extend(_style_lines(style))
        for pm in d.placemarks:
            lines.extend(_placemark_lines(pm))
        lines.append("  </Document>")
    lines.append("</kml>")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Validation and attribute lookup


def validate_document(d: Document, styles_required: bool = False) -> list[ValidationIssue]:
    """Consistency issues over a parsed Document, never raises.

    styles_required escalates UNRESOLVED_STYLE from warning to error.
    Issues come back sorted by (severity, placemark document order).
    """
    found: list[tuple[int, int, ValidationIssue]] = []  # (severity rank, doc order, issue)

    def add(severity: str, code: str, message: str, index: int, pm_id: str | None) -> None:
        rank = 0 if severity == SEVERITY_ERROR else 1
        found.append((rank, index, ValidationIssue(severity, code, message, placemark_id=pm_id)))

    seen_ids: dict[str, int] = {}
    duplicates: dict[str, int] = {}  # id -> doc order of second occurrence
    for i, pm in enumerate(d.placemarks):
        if pm.id in seen_ids:
            duplicates.setdefault(pm.id, i)
        else:
            seen_ids[pm.id] = i
        if not pm.name:
            add(SEVERITY_WARNING, "EMPTY_NAME", "placemark has no display name", i, pm.id)
        if isinstance(pm.geometry, Polygon):
            source = pm.geometry.tessellate_source
            if source is not None and source not in ("0", "1"):
                add(SEVERITY_ERROR, "TESSELLATE_RANGE",
                    f"tessellate must be \"0\" or \"1\", got {source!r}", i, pm.id)
        if pm.style_ref is not None and pm.style_ref[1:] not in d.styles:
            severity = SEVERITY_ERROR if styles_required else SEVERITY_WARNING
            add(severity, "UNRESOLVED_STYLE",
                f"style {pm.style_ref!r} is not defined in the document", i, pm.id)
    for dup_id, index in duplicates.items():
        count = sum(1 for pm in d.placemarks if pm.id == dup_id)
        add(SEVERITY_ERROR, "DUPLICATE_ID", f"id {dup_id!r} used by {count} placemarks",
            index, dup_id)

    found.sort(key=lambda item: (item[0], item[1]))
    return [issue for _, _, issue in found]


def get_attribute_text(d: Document, placemark_id: str) -> list[tuple[str, str]]:
    """Attribute pairs for one placemark, led by its display name.

    Returns an empty list when the placemark carries no attribute content
    at all (no attributes and no description).
    """
    for pm in d.placemarks:
        if pm.id == placemark_id:
            if not pm.attributes and not pm.description:
                return []
            pairs = list(pm.attributes)
            if not any(key == "name" for key, _ in pairs):
                pairs.insert(0, ("name", pm.name))
            return pairs
    raise PlacemarkNotFoundError(placemark_id)


def load_document(path: str | Path, opts: ParseOptions | None = None,
                  styles_required: bool = False) -> tuple[Document, list[ValidationIssue]]:
    """Read, parse, and validate a data file; issues are parse + validation."""
    path = Path(path)
    text = path.read_bytes()
    document, issues = parse_document(text, opts, source_uri=str(path))
    issues = issues + validate_document(document, styles_required=styles_required)
    return document, issues
