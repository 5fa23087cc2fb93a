"""Line-oriented sheaf documents.

A document is a sequence of sectioned blocks:

    [poset]                  carrier and generating relation
    [sheaf]                  dims and covering-pair matrices ("main" sheaf)
    [sheaf NAME]             additional sheaves on the same poset
    [open NAME]              named open sets (stars = ... or members = ...)
    [morphism NAME]          per-point matrices between two named sheaves

Keys are `name = value`; `#` starts a comment; rational entries are written
`a/b`. Unknown keys and unknown block kinds are rejected with the offending
line number. Parsing is split from realization so that parse errors (exit
code 2 territory) stay distinct from semantic failures such as a relation
that is not antisymmetric or matrices whose chains disagree (exit code 1).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from .errors import DocumentError
from .linalg import Matrix, field_from_name
from .morphism import SheafMorphism, build_morphism
from .order import PreOrder, as_poset, build_preorder, hasse_edges
from .sheaf import CellularSheaf, build_sheaf
from .topology import OpenSet, union_of_stars

_IDENT = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.'-]*$")
_BLOCK = re.compile(r"^\[\s*([a-z]+)(?:\s+(\S+))?\s*\]$")
_ENTRY_TOKEN = re.compile(r"^-?\d+(?:/\d+)?$")

MAIN_SHEAF = "main"


@dataclass
class MatrixLiteral:
    kind: str  # "rows", "id", or "zero"
    rows: tuple[tuple[str, ...], ...]
    line: int


@dataclass
class SheafSpec:
    name: str
    line: int
    field_name: str | None = None
    dims: dict = dc_field(default_factory=dict)       # element -> (int, line)
    maps: dict = dc_field(default_factory=dict)       # (p, q) -> MatrixLiteral


@dataclass
class OpenSpec:
    name: str
    line: int
    stars: tuple[str, ...] | None = None
    members: tuple[str, ...] | None = None


@dataclass
class MorphismSpec:
    name: str
    line: int
    source: str = MAIN_SHEAF
    target: str = MAIN_SHEAF
    maps: dict = dc_field(default_factory=dict)       # element -> MatrixLiteral


@dataclass
class SheafDocument:
    """Parsed but not yet realized document."""

    preorder: PreOrder
    sheaf_specs: dict
    open_specs: dict
    morphism_specs: dict


@dataclass
class RealizedDocument:
    """Semantic content: poset, sheaves, opens, morphisms."""

    poset: object
    sheaves: dict[str, CellularSheaf]
    opens: dict[str, OpenSet]
    morphisms: dict[str, SheafMorphism]
    field_names: dict[str, str]


def _strip(line: str) -> str:
    cut = line.find("#")
    if cut >= 0:
        line = line[:cut]
    return line.strip()


def _check_ident(token: str, line: int) -> str:
    if not _IDENT.match(token):
        raise DocumentError(f"invalid identifier {token!r}", line)
    return token


def _split_pair(token: str, line: int) -> tuple[str, str]:
    if "<=" in token:
        a, b = token.split("<=", 1)
    elif "<" in token:
        a, b = token.split("<", 1)
    else:
        raise DocumentError(f"relation token {token!r} must look like x<y", line)
    return _check_ident(a.strip(), line), _check_ident(b.strip(), line)


def _parse_matrix_value(text: str, line: int) -> MatrixLiteral:
    text = text.strip()
    if text == "id":
        return MatrixLiteral("id", (), line)
    if text == "zero":
        return MatrixLiteral("zero", (), line)
    if not (text.startswith("[") and text.endswith("]")):
        raise DocumentError("matrix value must be [[...], ...], id, or zero", line)
    inner = text[1:-1].strip()
    if not inner:
        return MatrixLiteral("rows", (), line)
    if not (inner.startswith("[") and inner.endswith("]")):
        raise DocumentError("matrix rows must be bracketed", line)
    rows = []
    depth = 0
    start = None
    for i, ch in enumerate(inner):
        if ch == "[":
            if depth == 0:
                start = i + 1
            depth += 1
            if depth > 1:
                raise DocumentError("matrix literals do not nest deeper than rows", line)
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise DocumentError("unbalanced brackets in matrix literal", line)
            row_text = inner[start:i].strip()
            entries = []
            if row_text:
                for tok in row_text.split(","):
                    tok = tok.strip()
                    if not _ENTRY_TOKEN.match(tok):
                        raise DocumentError(f"bad matrix entry {tok!r}", line)
                    entries.append(tok)
            rows.append(tuple(entries))
        elif depth == 0 and ch not in ", \t":
            raise DocumentError(f"unexpected {ch!r} between matrix rows", line)
    if depth != 0:
        raise DocumentError("unbalanced brackets in matrix literal", line)
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DocumentError("matrix rows have differing lengths", line)
    return MatrixLiteral("rows", tuple(rows), line)


def parse_document(text: str) -> SheafDocument:
    blocks: list[tuple[str, str | None, int, list[tuple[str, str, int]]]] = []
    current: list[tuple[str, str, int]] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if line.startswith("["):
            m = _BLOCK.match(line)
            if not m:
                raise DocumentError(f"malformed block header {line!r}", lineno)
            kind, label = m.group(1), m.group(2)
            current = []
            blocks.append((kind, label, lineno, current))
            continue
        if current is None:
            raise DocumentError("content before any block header", lineno)
        if "=" not in line:
            raise DocumentError("expected key = value", lineno)
        key, value = line.split("=", 1)
        current.append((key.strip(), value.strip(), lineno))

    elements: list[str] = []
    pairs: list[tuple[str, str]] = []
    poset_seen = False
    sheaf_specs: dict[str, SheafSpec] = {}
    open_specs: dict[str, OpenSpec] = {}
    morphism_specs: dict[str, MorphismSpec] = {}

    for kind, label, header_line, entries in blocks:
        if kind == "poset":
            if label is not None:
                raise DocumentError("[poset] takes no name", header_line)
            if poset_seen:
                raise DocumentError("duplicate [poset] block", header_line)
            poset_seen = True
            for key, value, lineno in entries:
                if key == "elements":
                    for tok in value.split():
                        elements.append(_check_ident(tok, lineno))
                elif key in ("relation", "hasse"):
                    for tok in value.replace(",", " ").split():
                        pairs.append(_split_pair(tok, lineno))
                else:
                    raise DocumentError(f"unknown key {key!r} in [poset]", lineno)
            if not elements:
                raise DocumentError("[poset] must list elements", header_line)
        elif kind == "sheaf":
            name = label if label is not None else MAIN_SHEAF
            _check_ident(name, header_line)
            if name in sheaf_specs:
                raise DocumentError(f"duplicate sheaf {name!r}", header_line)
            spec = SheafSpec(name, header_line)
            for key, value, lineno in entries:
                parts = key.split()
                if parts[0] == "field" and len(parts) == 1:
                    spec.field_name = value
                elif parts[0] == "dim" and len(parts) == 2:
                    el = _check_ident(parts[1], lineno)
                    if el in spec.dims:
                        raise DocumentError(f"duplicate dim for {el!r}", lineno)
                    try:
                        d = int(value)
                    except ValueError:
                        raise DocumentError("dimension must be an integer", lineno)
                    if d < 0:
                        raise DocumentError("dimension must be non-negative", lineno)
                    spec.dims[el] = (d, lineno)
                elif parts[0] == "map" and len(parts) == 2:
                    if "->" not in parts[1]:
                        raise DocumentError("map key must look like `map p->q`", lineno)
                    a, b = parts[1].split("->", 1)
                    edge = (_check_ident(a, lineno), _check_ident(b, lineno))
                    if edge in spec.maps:
                        raise DocumentError(
                            f"duplicate map for {a}->{b}", lineno)
                    spec.maps[edge] = _parse_matrix_value(value, lineno)
                else:
                    raise DocumentError(f"unknown key {key!r} in [sheaf]", lineno)
            sheaf_specs[name] = spec
        elif kind == "open":
            if label is None:
                raise DocumentError("[open] blocks need a name", header_line)
            name = _check_ident(label, header_line)
            if name in open_specs:
                raise DocumentError(f"duplicate open {name!r}", header_line)
            spec_o = OpenSpec(name, header_line)
            for key, value, lineno in entries:
                if key == "stars":
                    spec_o.stars = tuple(_check_ident(t, lineno) for t in value.split())
                elif key == "members":
                    spec_o.members = tuple(_check_ident(t, lineno) for t in value.split())
                else:
                    raise DocumentError(f"unknown key {key!r} in [open]", lineno)
            if (spec_o.stars is None) == (spec_o.members is None):
                raise DocumentError(
                    "[open] blocks need exactly one of `stars` or `members`",
                    header_line,
                )
            open_specs[name] = spec_o
        elif kind == "morphism":
            if label is None:
                raise DocumentError("[morphism] blocks need a name", header_line)
            name = _check_ident(label, header_line)
            if name in morphism_specs:
                raise DocumentError(f"duplicate morphism {name!r}", header_line)
            spec_m = MorphismSpec(name, header_line)
            for key, value, lineno in entries:
                parts = key.split()
                if parts[0] == "source" and len(parts) == 1:
                    spec_m.source = _check_ident(value, lineno)
                elif parts[0] == "target" and len(parts) == 1:
                    spec_m.target = _check_ident(value, lineno)
                elif parts[0] == "map" and len(parts) == 2:
                    el = _check_ident(parts[1], lineno)
                    if el in spec_m.maps:
                        raise DocumentError(f"duplicate map for {el!r}", lineno)
                    spec_m.maps[el] = _parse_matrix_value(value, lineno)
                else:
                    raise DocumentError(f"unknown key {key!r} in [morphism]", lineno)
            morphism_specs[name] = spec_m
        else:
            raise DocumentError(f"unknown block kind {kind!r}", header_line)

    if not poset_seen:
        raise DocumentError("document has no [poset] block")
    try:
        preorder = build_preorder(elements, pairs)
    except Exception as exc:  # duplicate elements / unknown endpoints
        raise DocumentError(str(exc)) from None
    for name, spec in sheaf_specs.items():
        for el in spec.dims:
            if el not in preorder:
                raise DocumentError(
                    f"unknown element {el!r}", spec.dims[el][1])
        for (a, b), lit in spec.maps.items():
            if a not in preorder or b not in preorder:
                raise DocumentError(f"unknown element in map {a}->{b}", lit.line)
    for name, spec_m in morphism_specs.items():
        for el, lit in spec_m.maps.items():
            if el not in preorder:
                raise DocumentError(
                    f"unknown element {el!r} in morphism {name!r}", lit.line)
    return SheafDocument(preorder, sheaf_specs, open_specs, morphism_specs)


def _realize_matrix(lit: MatrixLiteral, field, rows: int, cols: int,
                    edge_desc: str) -> Matrix:
    if lit.kind == "id":
        if rows != cols:
            raise DocumentError(
                f"`id` needs equal dimensions for {edge_desc} ({rows} vs {cols})",
                lit.line,
            )
        return Matrix.identity(field, rows)
    if lit.kind == "zero":
        return Matrix.zeros(field, rows, cols)
    data = lit.rows
    got_rows = len(data)
    got_cols = len(data[0]) if data else 0
    if got_rows != rows or (rows > 0 and got_cols != cols):
        raise DocumentError(
            f"matrix for {edge_desc} is {got_rows}x{got_cols}, expected {rows}x{cols}",
            lit.line,
        )
    return Matrix.build(field, [[field.coerce(tok) for tok in row] for row in data],
                        cols=cols)


def realize(doc: SheafDocument, field_override: str | None = None) -> RealizedDocument:
    """Build the semantic objects a document describes.

    Raises ValidationError subclasses for semantic failures (non-poset
    relation, chain disagreement, naturality failure, non-open member list)
    and DocumentError for structural ones (shapes, unknown names).
    """
    poset = as_poset(doc.preorder)
    sheaves: dict[str, CellularSheaf] = {}
    field_names: dict[str, str] = {}
    for name, spec in doc.sheaf_specs.items():
        field_name = field_override or spec.field_name or "q"
        try:
            field = field_from_name(field_name)
        except ValueError as exc:
            raise DocumentError(str(exc), spec.line) from None
        dims = {}
        for el in poset.elements:
            if el not in spec.dims:
                raise DocumentError(
                    f"sheaf {name!r} gives no dimension for {el!r}", spec.line)
            dims[el] = spec.dims[el][0]
        edges = hasse_edges(poset)
        edge_set = set(edges)
        for pair, lit in spec.maps.items():
            if pair not in edge_set:
                raise DocumentError(
                    f"{pair[0]}->{pair[1]} is not a covering pair of the poset",
                    lit.line,
                )
        edge_maps = {}
        for p, q in edges:
            lit = spec.maps.get((p, q))
            if lit is None:
                if dims[p] == 0 or dims[q] == 0:
                    continue
                raise DocumentError(
                    f"sheaf {name!r} is missing `map {p}->{q}`", spec.line)
            edge_maps[(p, q)] = _realize_matrix(
                lit, field, dims[q], dims[p], f"{p}->{q}")
        sheaves[name] = build_sheaf(poset, dims, edge_maps, field)
        field_names[name] = field.name

    opens: dict[str, OpenSet] = {}
    for name, spec_o in doc.open_specs.items():
        if spec_o.stars is not None:
            for x in spec_o.stars:
                if x not in poset:
                    raise DocumentError(
                        f"unknown element {x!r} in open {name!r}", spec_o.line)
            opens[name] = union_of_stars(poset, spec_o.stars)
        else:
            for x in spec_o.members:
                if x not in poset:
                    raise DocumentError(
                        f"unknown element {x!r} in open {name!r}", spec_o.line)
            opens[name] = OpenSet(poset, frozenset(spec_o.members))

    morphisms: dict[str, SheafMorphism] = {}
    for name, spec_m in doc.morphism_specs.items():
        if spec_m.source not in sheaves:
            raise DocumentError(
                f"morphism {name!r} names unknown sheaf {spec_m.source!r}",
                spec_m.line,
            )
        if spec_m.target not in sheaves:
            raise DocumentError(
                f"morphism {name!r} names unknown sheaf {spec_m.target!r}",
                spec_m.line,
            )
        src = sheaves[spec_m.source]
        tgt = sheaves[spec_m.target]
        if src.field != tgt.field:
            raise DocumentError(
                f"morphism {name!r} mixes fields {src.field.name} and {tgt.field.name}",
                spec_m.line,
            )
        components = {}
        for el in poset.elements:
            lit = spec_m.maps.get(el)
            if lit is None:
                if src.dim(el) == 0 or tgt.dim(el) == 0:
                    components[el] = Matrix.zeros(src.field, tgt.dim(el), src.dim(el))
                    continue
                raise DocumentError(
                    f"morphism {name!r} is missing `map {el}`", spec_m.line)
            components[el] = _realize_matrix(
                lit, src.field, tgt.dim(el), src.dim(el), f"morphism map at {el}")
        morphisms[name] = build_morphism(src, tgt, components)
    return RealizedDocument(poset, sheaves, opens, morphisms, field_names)


def parse_text(text: str, field_override: str | None = None) -> RealizedDocument:
    return realize(parse_document(text), field_override)


def _format_matrix(m: Matrix) -> str:
    rows = ", ".join(
        "[" + ", ".join(m.field.format(v) for v in row) + "]" for row in m.data
    )
    return f"[{rows}]"


def render_document(realized: RealizedDocument) -> str:
    """Canonical text for a realized document; reparsing gives equal objects."""
    poset = realized.poset
    lines = ["[poset]"]
    lines.append("elements = " + " ".join(poset.elements))
    edges = hasse_edges(poset)
    if edges:
        lines.append("relation = " + " ".join(f"{a}<{b}" for a, b in edges))
    for name in sorted(realized.sheaves):
        sheaf = realized.sheaves[name]
        lines.append("")
        lines.append("[sheaf]" if name == MAIN_SHEAF else f"[sheaf {name}]")
        lines.append(f"field = {sheaf.field.name}")
        for el in poset.elements:
            lines.append(f"dim {el} = {sheaf.dim(el)}")
        for p, q in edges:
            m = sheaf.restriction(p, q)
            if m.rows == 0 or m.cols == 0:
                continue
            lines.append(f"map {p}->{q} = {_format_matrix(m)}")
    for name in sorted(realized.opens):
        U = realized.opens[name]
        lines.append("")
        lines.append(f"[open {name}]")
        lines.append("members = " + " ".join(U.sorted_members))
    for name in sorted(realized.morphisms):
        mor = realized.morphisms[name]
        src = next(k for k, v in realized.sheaves.items() if v == mor.source)
        tgt = next(k for k, v in realized.sheaves.items() if v == mor.target)
        lines.append("")
        lines.append(f"[morphism {name}]")
        lines.append(f"source = {src}")
        lines.append(f"target = {tgt}")
        for el in poset.elements:
            m = mor.components[el]
            if m.rows == 0 or m.cols == 0:
                continue
            lines.append(f"map {el} = {_format_matrix(m)}")
    return "\n".join(lines) + "\n"
