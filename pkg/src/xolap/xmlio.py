"""Canonical warehouse XML.

::

    <w>
      <fact>
        <dim name="project">
          <lvl name="Project" v="A">
            <lvl name="Team" v="1"/>
          </lvl>
        </dim>
        <msr name="cost" v="1000"/>
        <agg fn="sum" measure="cost" v="2500"/>
      </fact>
    </w>

Serialization writes one element per line, two-space indentation, attributes
in a fixed order (``name``/``fn``, ``measure``, ``v``, then the remaining
ones sorted), UTF-8, with a final newline.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import IO, Optional, Union

from .errors import DomainViolation, ShapeViolation, XmlSyntaxError
from .model import Kind, MDDataTree, Node, format_number, parse_number
from .schema import HierarchySchema, WarehouseSchema, base_level

_CHUNK = 1 << 16
_ALLOWED = {
    None: {"w"},
    "w": {"fact"},
    "fact": {"dim", "msr", "agg"},
    "dim": {"lvl"},
    "lvl": {"lvl"},
    "msr": set(),
    "agg": set(),
}
_AGG_FNS = {"sum", "count", "min", "max", "avg"}


class _Frame:
    __slots__ = ("tag", "kind", "label", "value", "attrs", "children", "path", "rank", "hierarchy", "dims", "facts")

    def __init__(self, tag, path):
        self.tag = tag
        self.path = path
        self.children = []
        self.label = tag
        self.value = None
        self.attrs = ()
        self.rank = 0
        self.hierarchy = None
        self.dims = None
        self.facts = 0


def _require(attrib, key, path):
    try:
        return attrib[key]
    except KeyError:
        raise ShapeViolation(f"missing attribute {key!r}", path) from None


def _open(frame: _Frame, parent: Optional[_Frame], attrib: dict, schema: Optional[WarehouseSchema]):
    tag, path = frame.tag, frame.path
    if tag == "w":
        frame.kind = Kind.WAREHOUSE
        if attrib:
            raise ShapeViolation("the warehouse root takes no attributes", path)
    elif tag == "fact":
        frame.kind = Kind.FACT
        frame.dims = set()
        if attrib:
            raise ShapeViolation("fact elements take no attributes", path)
    elif tag == "dim":
        frame.kind = Kind.DIMENSION
        name = _require(attrib, "name", path)
        if name in parent.dims:
            raise ShapeViolation(f"dimension {name!r} repeated in one fact", path)
        parent.dims.add(name)
        frame.label = name
        if schema is not None:
            if not schema.has_dimension(name):
                raise ShapeViolation(f"unknown dimension {name!r}", path)
            frame.hierarchy = schema.dimension(name)
    elif tag == "lvl":
        frame.kind = Kind.LEVEL
        name = _require(attrib, "name", path)
        value = _require(attrib, "v", path)
        frame.label, frame.value = name, value
        frame.attrs = tuple(sorted((k, v) for k, v in attrib.items() if k not in ("name", "v")))
        hierarchy: Optional[HierarchySchema] = parent.hierarchy
        frame.hierarchy = hierarchy
        if hierarchy is not None:
            if not hierarchy.has_level(name):
                raise ShapeViolation(f"dimension {hierarchy.dimension_name!r} has no level {name!r}", path)
            rank = hierarchy.rank(name)
            if rank <= parent.rank:
                raise ShapeViolation(f"level {name!r} does not roll up from {parent.label!r}", path)
            frame.rank = rank
            if not hierarchy.level(base_level(name)).accepts(value):
                raise DomainViolation(name, value, path)
    elif tag == "msr":
        frame.kind = Kind.MEASURE
        frame.label = _require(attrib, "name", path)
        frame.value = _number(_require(attrib, "v", path), path)
        if set(attrib) - {"name", "v"}:
            raise ShapeViolation("unexpected measure attributes", path)
        if schema is not None and schema.measures and frame.label not in schema.measures:
            raise ShapeViolation(f"unknown measure {frame.label!r}", path)
    elif tag == "agg":
        frame.kind = Kind.AGGREGATE
        fn = _require(attrib, "fn", path)
        if fn not in _AGG_FNS:
            raise ShapeViolation(f"unknown aggregation function {fn!r}", path)
        frame.label = _require(attrib, "measure", path)
        frame.value = _number(_require(attrib, "v", path), path)
        extra = {k: v for k, v in attrib.items() if k not in ("measure", "v")}
        if set(extra) - {"fn", "n", "sum"}:
            raise ShapeViolation("unexpected aggregate attributes", path)
        frame.attrs = tuple(sorted(extra.items()))


def _number(text, path):
    try:
        return parse_number(text)
    except ValueError:
        raise ShapeViolation(f"non-numeric value {text!r}", path) from None


def _check_text(elem, path):
    if elem.text and elem.text.strip():
        raise ShapeViolation("unexpected character data", path)
    for child in elem:
        if child.tail and child.tail.strip():
            raise ShapeViolation("unexpected character data", path)


def parse_warehouse(source: Union[bytes, str, IO[bytes]], schema: Optional[WarehouseSchema] = None) -> MDDataTree:
    """Stream-parse a warehouse document into an immutable tree.

    ``source`` is the document bytes (or text) or a binary file object.
    With a schema, dimension/level names, roll-up order and level value
    domains are checked as well as the element grammar.
    """
    if isinstance(source, str):
        source = source.encode("utf-8")
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
        chunks = (data[i:i + _CHUNK] for i in range(0, len(data), _CHUNK))
    else:
        chunks = iter(lambda: source.read(_CHUNK), b"")

    parser = ET.XMLPullParser(events=("start", "end"))
    stack: list[_Frame] = []
    root: Optional[Node] = None

    def drain():
        nonlocal root
        for event, elem in parser.read_events():
            if event == "start":
                parent = stack[-1] if stack else None
                if root is not None:
                    raise ShapeViolation("content after the warehouse root", "/")
                tag = elem.tag
                ptag = parent.tag if parent else None
                ppath = parent.path if parent else ""
                if tag not in _ALLOWED.get(ptag, set()):
                    raise ShapeViolation(f"<{tag}> is not allowed under <{ptag or 'document'}>", f"{ppath}/{tag}")
                if tag == "fact":
                    parent.facts += 1
                    seg = f"fact[{parent.facts}]"
                elif tag == "dim":
                    seg = f"dim[{elem.get('name')}]"
                elif tag == "lvl":
                    seg = f"lvl[{elem.get('name')}={elem.get('v')}]"
                else:
                    seg = tag
                frame = _Frame(tag, f"{ppath}/{seg}")
                _open(frame, parent, dict(elem.attrib), schema)
                stack.append(frame)
            else:
                frame = stack.pop()
                _check_text(elem, frame.path)
                elem.clear()
                node = Node(frame.kind, frame.label, frame.value, frame.attrs, tuple(frame.children))
                if stack:
                    stack[-1].children.append(node)
                else:
                    root = node

    try:
        for chunk in chunks:
            parser.feed(chunk)
            drain()
        parser.close()
        drain()
    except ET.ParseError as exc:
        raise XmlSyntaxError(f"malformed XML: {exc}") from exc
    if root is None:
        raise XmlSyntaxError("document has no root element")
    return MDDataTree(root)


def load_warehouse(path, schema: Optional[WarehouseSchema] = None) -> MDDataTree:
    with open(path, "rb") as fh:
        return parse_warehouse(fh, schema)


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
        .replace("\n", "&#10;")
        .replace("\r", "&#13;")
        .replace("\t", "&#9;")
    )


def _attributes(node: Node) -> list[tuple[str, str]]:
    kind = node.kind
    if kind is Kind.DIMENSION:
        return [("name", node.label)]
    if kind is Kind.LEVEL:
        return [("name", node.label), ("v", node.value), *node.attrs]
    if kind is Kind.MEASURE:
        return [("name", node.label), ("v", format_number(node.value))]
    if kind is Kind.AGGREGATE:
        extra = [(k, v) for k, v in node.attrs if k != "fn"]
        return [("fn", node.attr("fn")), ("measure", node.label), ("v", format_number(node.value)), *extra]
    return []


def _write(node: Node, depth: int, out: list) -> None:
    pad = "  " * depth
    tag = node.kind.value
    attrs = "".join(f' {k}="{_escape(str(v))}"' for k, v in _attributes(node))
    if not node.children:
        out.append(f"{pad}<{tag}{attrs}/>\n")
        return
    out.append(f"{pad}<{tag}{attrs}>\n")
    for child in node.children:
        _write(child, depth + 1, out)
    out.append(f"{pad}</{tag}>\n")


def serialize_warehouse(tree: MDDataTree) -> bytes:
    out: list[str] = []
    _write(tree.root, 0, out)
    return "".join(out).encode("utf-8")


def dump_warehouse(tree: MDDataTree, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_warehouse(tree))
