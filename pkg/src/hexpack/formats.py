"""Text formats: mesh and pattern documents, VTK/OBJ export, witnesses.

All formats are line oriented, whitespace tolerant and comment friendly
('#' starts a comment).  Headers are a format word plus integer counts;
see docs/formats.md for the byte-exact grammar.
"""

from __future__ import annotations

import math

from .errors import MissingCoordinates, ParseError
from .hexmodel import HexComplex, build_complex
from .moves import Placement
from .surface import build_pattern


def _data_lines(text):
    """(1-based line number, token list) for non-comment non-blank lines."""
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            out.append((no, body.split()))
    return out


def _fmt(x):
    """Shortest round-trip decimal for a float, integers without dot."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite coordinate {x}")
    return repr(x)


def parse_mesh(text):
    """Parse a hexmesh document -> (HexComplex, coords-or-None).

    Layout: header `hexmesh V H`, then V coordinate lines (optional,
    detected by line count), then H hex lines of 8 vertex ids.
    """
    lines = _data_lines(text)
    if not lines:
        raise ParseError("empty document")
    no, head = lines[0]
    if len(head) != 3 or head[0] != "hexmesh":
        raise ParseError("expected header 'hexmesh V H'", no)
    try:
        nv, nh = int(head[1]), int(head[2])
    except ValueError:
        raise ParseError("expected header 'hexmesh V H'", no) from None
    if nv < 0 or nh < 0:
        raise ParseError("negative count in header", no)
    body = lines[1:]
    if len(body) == nh:
        coord_rows = []
    elif len(body) == nv + nh:
        coord_rows = body[:nv]
    else:
        raise ParseError(
            f"expected {nh} or {nv + nh} data lines, found {len(body)}"
        )
    coords = None
    if coord_rows:
        coords = []
        for no, toks in coord_rows:
            if len(toks) != 3:
                raise ParseError(f"expected 3 coordinates, got {len(toks)}", no)
            try:
                coords.append(tuple(float(t) for t in toks))
            except ValueError:
                raise ParseError("bad coordinate value", no) from None
    hexes = []
    for no, toks in body[len(coord_rows):]:
        if len(toks) != 8:
            raise ParseError(f"expected 8 vertex ids, got {len(toks)}", no)
        try:
            hexes.append(tuple(int(t) for t in toks))
        except ValueError:
            raise ParseError("bad vertex id", no) from None
    return build_complex(hexes, nv), coords


def write_mesh(c, coords=None):
    """Serialize a complex (and optional coordinates) as a hexmesh document."""
    out = [f"hexmesh {c.vertex_count} {len(c.hexes)}"]
    if coords is not None:
        if len(coords) != c.vertex_count:
            raise MissingCoordinates(
                f"{len(coords)} coordinate rows for {c.vertex_count} vertices"
            )
        for row in coords:
            out.append(" ".join(_fmt(x) for x in row))
    for h in c.hexes:
        out.append(" ".join(str(v) for v in h))
    return "\n".join(out) + "\n"


def parse_pattern(text):
    """Parse a quadpattern document -> SurfacePattern."""
    lines = _data_lines(text)
    if not lines:
        raise ParseError("empty document")
    no, head = lines[0]
    if len(head) != 2 or head[0] != "quadpattern":
        raise ParseError("expected header 'quadpattern F'", no)
    try:
        nf = int(head[1])
    except ValueError:
        raise ParseError("expected header 'quadpattern F'", no) from None
    body = lines[1:]
    if len(body) != nf:
        raise ParseError(f"expected {nf} quad lines, found {len(body)}")
    quads = []
    for no, toks in body:
        if len(toks) != 4:
            raise ParseError(f"expected 4 vertex ids, got {len(toks)}", no)
        try:
            quads.append(tuple(int(t) for t in toks))
        except ValueError:
            raise ParseError("bad vertex id", no) from None
    return build_pattern(quads)


def write_pattern(p):
    out = [f"quadpattern {len(p.quads)}"]
    for q in p.quads:
        out.append(" ".join(str(v) for v in q))
    return "\n".join(out) + "\n"


def parse_coords(text):
    """Parse a coords document -> dict of vertex id to (x, y, z)."""
    lines = _data_lines(text)
    if not lines:
        raise ParseError("empty document")
    no, head = lines[0]
    if len(head) != 2 or head[0] != "coords":
        raise ParseError("expected header 'coords N'", no)
    try:
        n = int(head[1])
    except ValueError:
        raise ParseError("expected header 'coords N'", no) from None
    body = lines[1:]
    if len(body) != n:
        raise ParseError(f"expected {n} rows, found {len(body)}")
    out = {}
    for no, toks in body:
        if len(toks) != 4:
            raise ParseError("expected 'id x y z'", no)
        try:
            vid = int(toks[0])
            xyz = tuple(float(t) for t in toks[1:])
        except ValueError:
            raise ParseError("bad value", no) from None
        if vid in out:
            raise ParseError(f"vertex {vid} listed twice", no)
        out[vid] = xyz
    return out


def write_coords(mapping):
    out = [f"coords {len(mapping)}"]
    for vid in sorted(mapping):
        out.append(f"{vid} " + " ".join(_fmt(x) for x in mapping[vid]))
    return "\n".join(out) + "\n"


def parse_witness(text):
    """Parse a witness document -> tuple of Placements."""
    lines = _data_lines(text)
    if not lines:
        raise ParseError("empty document")
    no, head = lines[0]
    if len(head) != 2 or head[0] != "witness":
        raise ParseError("expected header 'witness N'", no)
    try:
        n = int(head[1])
    except ValueError:
        raise ParseError("expected header 'witness N'", no) from None
    body = lines[1:]
    if len(body) != n:
        raise ParseError(f"expected {n} placements, found {len(body)}")
    out = []
    for no, toks in body:
        if len(toks) != 1:
            raise ParseError("expected one placement token per line", no)
        try:
            out.append(Placement.from_token(toks[0]))
        except ValueError:
            raise ParseError(f"bad placement token {toks[0]!r}", no) from None
    return tuple(out)


def write_witness(witness):
    out = [f"witness {len(witness)}"]
    out.extend(pl.token() for pl in witness)
    return "\n".join(out) + "\n"


def _require_coords(coords, needed, what):
    if coords is None:
        raise MissingCoordinates(f"{what} requires vertex coordinates")
    missing = [v for v in needed if v >= len(coords)] if not isinstance(
        coords, dict
    ) else [v for v in needed if v not in coords]
    if missing:
        raise MissingCoordinates(
            f"no coordinates for vertices {missing[:8]}{'...' if len(missing) > 8 else ''}"
        )


def export_vtk(c, coords, title="hexpack mesh"):
    """Legacy ASCII VTK unstructured grid with hexahedron cells.

    The viewer's hexahedron node order coincides with the cube corner
    order used throughout this package (bottom cycle 0..3 under top
    cycle 4..7), so connectivity is emitted unchanged.
    """
    _require_coords(coords, range(c.vertex_count), "VTK export")
    out = [
        "# vtk DataFile Version 3.0",
        title,
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {c.vertex_count} double",
    ]
    for v in range(c.vertex_count):
        out.append(" ".join(_fmt(x) for x in coords[v]))
    out.append(f"CELLS {len(c.hexes)} {9 * len(c.hexes)}")
    for h in c.hexes:
        out.append("8 " + " ".join(str(v) for v in h))
    out.append(f"CELL_TYPES {len(c.hexes)}")
    out.extend("12" for _ in c.hexes)
    return "\n".join(out) + "\n"


def parse_vtk(text):
    """Read back a legacy ASCII VTK hexahedron grid -> (HexComplex, coords)."""
    lines = text.splitlines()
    if len(lines) < 3:
        raise ParseError("truncated VTK document")
    toks = []
    for raw in lines[2:]:  # skip the version banner and the title line
        toks.extend(raw.split())
    def expect(word, got):
        if got != word:
            raise ParseError(f"expected {word!r}, found {got!r}")
    it = iter(toks)
    try:
        expect("ASCII", next(it))
        expect("DATASET", next(it))
        expect("UNSTRUCTURED_GRID", next(it))
        expect("POINTS", next(it))
        nv = int(next(it))
        next(it)  # dtype
        coords = [
            (float(next(it)), float(next(it)), float(next(it)))
            for _ in range(nv)
        ]
        expect("CELLS", next(it))
        nh = int(next(it))
        int(next(it))
        hexes = []
        for _ in range(nh):
            n = int(next(it))
            if n != 8:
                raise ParseError(f"cell with {n} nodes is not a hexahedron")
            hexes.append(tuple(int(next(it)) for _ in range(8)))
        expect("CELL_TYPES", next(it))
        int(next(it))
        for _ in range(nh):
            if int(next(it)) != 12:
                raise ParseError("non-hexahedron cell type")
    except StopIteration:
        raise ParseError("truncated VTK document") from None
    except ValueError as err:
        raise ParseError(f"bad VTK token: {err}") from None
    return build_complex(hexes, nv), coords


def export_obj_surface(p, coords):
    """Wavefront OBJ with one quad face per pattern quad, outward, 1-based."""
    verts = p.vertices
    _require_coords(coords, verts, "OBJ export")
    number = {v: i + 1 for i, v in enumerate(verts)}
    out = []
    for v in verts:
        out.append("v " + " ".join(_fmt(x) for x in coords[v]))
    for q in p.quads:
        out.append("f " + " ".join(str(number[v]) for v in q))
    return "\n".join(out) + "\n"
