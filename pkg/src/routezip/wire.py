"""Binary wire format for compressed routes.

A message is a self-delimiting byte string:

    magic        4 bytes   b"RTC1"
    map_version  u64 little-endian
    method       u8        0 via edges, 1 hierarchy path, 2 combined,
                           3 via nodes
    source       uleb128
    target       uleb128
    count        uleb128   number of edges (methods 0..2) or nodes (3)
    body         method-specific, see below

Methods 0..2 carry `count` edges, each as two zigzag-uleb128 deltas:
first tail minus the running reference, then head minus the same
reference; the reference starts at `source` and moves to each edge's
head. Methods 1 and 2 append a shortcut bitmap, one bit per edge,
least significant bit first, zero-padded to a whole byte. Method 3
carries `count` node ids, each a zigzag-uleb128 delta against the
previous one (starting from `source`).

Node ids live in [0, 2**63); map_version is any u64. Exactly one byte
string encodes a given message: decoding rejects non-minimal varints,
out-of-range ids, set padding bits, unknown method tags, and trailing
bytes, so decode(encode(m)) == m and encode(decode(b)) == b whenever
either side succeeds.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .graph import EdgeRef
from .hierarchy import ChEdge, ChPath, CombinedRepr
from .via_edges import ViaEdgeRepr, ViaNodeRepr

MAGIC = b"RTC1"
_ID_LIMIT = 1 << 63
_U64_LIMIT = 1 << 64


class CodecError(ValueError):
    """Root of everything decode or encode can reject."""


class FormatError(CodecError):
    """Structurally invalid bytes: bad magic, loose varints, stray bits."""


class LengthError(CodecError):
    """The stream ends before the announced content does."""


class UnknownMethodError(CodecError):
    """Method tag outside the assigned range."""


class Method(IntEnum):
    VIA_EDGES = 0
    CH_PATH = 1
    COMBINED = 2
    VIA_NODES = 3


_EDGE_METHODS = (Method.VIA_EDGES, Method.CH_PATH, Method.COMBINED)
_FLAG_METHODS = (Method.CH_PATH, Method.COMBINED)


@dataclass(frozen=True)
class RouteMessage:
    """In-memory form of one wire message.

    Which fields are populated depends on the method: via_edges for
    methods 0..2, shortcut_flags (same length) for 1 and 2, via_nodes
    for 3. The unused fields stay empty.
    """

    map_version: int
    method: Method
    source: int
    target: int
    via_edges: tuple[EdgeRef, ...] = ()
    shortcut_flags: tuple[bool, ...] = ()
    via_nodes: tuple[int, ...] = ()

    def validate(self) -> None:
        if not 0 <= self.map_version < _U64_LIMIT:
            raise ValueError("map_version outside u64")
        if not isinstance(self.method, Method):
            raise ValueError(f"unknown method {self.method!r}")
        for label, node in (("source", self.source), ("target", self.target)):
            if not 0 <= node < _ID_LIMIT:
                raise ValueError(f"{label} id outside [0, 2**63)")
        if self.method in _EDGE_METHODS:
            if self.via_nodes:
                raise ValueError("via_nodes must be empty for edge methods")
            for tail, head in self.via_edges:
                if not (0 <= tail < _ID_LIMIT and 0 <= head < _ID_LIMIT):
                    raise ValueError("edge id outside [0, 2**63)")
            if self.method in _FLAG_METHODS:
                if len(self.shortcut_flags) != len(self.via_edges):
                    raise ValueError("one shortcut flag per edge required")
            elif self.shortcut_flags:
                raise ValueError("shortcut_flags must be empty for plain via edges")
        else:
            if self.via_edges or self.shortcut_flags:
                raise ValueError("edge fields must be empty for the node method")
            for node in self.via_nodes:
                if not 0 <= node < _ID_LIMIT:
                    raise ValueError("node id outside [0, 2**63)")


def _uleb_append(buf: bytearray, value: int) -> None:
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            buf.append(byte | 0x80)
        else:
            buf.append(byte)
            return


def _zigzag(delta: int) -> int:
    return (delta << 1) if delta >= 0 else ((-delta << 1) - 1)


def _unzigzag(value: int) -> int:
    return (value >> 1) ^ -(value & 1)


def encode(message: RouteMessage) -> bytes:
    """Serialize; raises ValueError on a message that validate() rejects."""
    message.validate()
    buf = bytearray(MAGIC)
    buf += message.map_version.to_bytes(8, "little")
    buf.append(int(message.method))
    _uleb_append(buf, message.source)
    _uleb_append(buf, message.target)
    if message.method in _EDGE_METHODS:
        _uleb_append(buf, len(message.via_edges))
        reference = message.source
        for tail, head in message.via_edges:
            _uleb_append(buf, _zigzag(tail - reference))
            _uleb_append(buf, _zigzag(head - reference))
            reference = head
        if message.method in _FLAG_METHODS:
            bitmap = bytearray((len(message.shortcut_flags) + 7) // 8)
            for position, flag in enumerate(message.shortcut_flags):
                if flag:
                    bitmap[position >> 3] |= 1 << (position & 7)
            buf += bitmap
    else:
        _uleb_append(buf, len(message.via_nodes))
        reference = message.source
        for node in message.via_nodes:
            _uleb_append(buf, _zigzag(node - reference))
            reference = node
    return bytes(buf)


class _Reader:
    __slots__ = ("_data", "_pos")

    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    @property
    def remaining(self) -> int:
        return len(self._data) - self._pos

    def take(self, size: int) -> bytes:
        if self.remaining < size:
            raise LengthError("stream ends early")
        chunk = self._data[self._pos:self._pos + size]
        self._pos += size
        return chunk

    def uleb(self) -> int:
        value = 0
        shift = 0
        length = 0
        while True:
            byte = self.take(1)[0]
            length += 1
            if length > 10:
                raise FormatError("varint longer than 64 bits")
            value |= (byte & 0x7F) << shift
            if not byte & 0x80:
                if length > 1 and byte == 0:
                    raise FormatError("varint not minimal")
                if length == 10 and byte > 0x01:
                    raise FormatError("varint exceeds 64 bits")
                return value
            shift += 7


def _delta_id(reader: _Reader, reference: int, what: str) -> int:
    value = reference + _unzigzag(reader.uleb())
    if not 0 <= value < _ID_LIMIT:
        raise FormatError(f"{what} id outside [0, 2**63)")
    return value


def decode(data: bytes) -> RouteMessage:
    """Parse one complete message; every deviation raises a CodecError."""
    reader = _Reader(data)
    if reader.take(4) != MAGIC:
        raise FormatError("bad magic")
    map_version = int.from_bytes(reader.take(8), "little")
    tag = reader.take(1)[0]
    try:
        method = Method(tag)
    except ValueError:
        raise UnknownMethodError(f"method tag {tag}") from None
    source = reader.uleb()
    target = reader.uleb()
    for label, node in (("source", source), ("target", target)):
        if node >= _ID_LIMIT:
            raise FormatError(f"{label} id outside [0, 2**63)")
    count = reader.uleb()
    via_edges: tuple[EdgeRef, ...] = ()
    shortcut_flags: tuple[bool, ...] = ()
    via_nodes: tuple[int, ...] = ()
    if method in _EDGE_METHODS:
        floor = 2 * count + ((count + 7) // 8 if method in _FLAG_METHODS else 0)
        if floor > reader.remaining:
            raise LengthError("count larger than the stream could hold")
        edges = []
        reference = source
        for _ in range(count):
            tail = _delta_id(reader, reference, "edge tail")
            head = _delta_id(reader, reference, "edge head")
            edges.append((tail, head))
            reference = head
        via_edges = tuple(edges)
        if method in _FLAG_METHODS:
            bitmap = reader.take((count + 7) // 8)
            shortcut_flags = tuple(
                bool(bitmap[position >> 3] >> (position & 7) & 1) for position in range(count)
            )
            for position in range(count, 8 * len(bitmap)):
                if bitmap[position >> 3] >> (position & 7) & 1:
                    raise FormatError("padding bits set in the shortcut bitmap")
    else:
        if count > reader.remaining:
            raise LengthError("count larger than the stream could hold")
        nodes = []
        reference = source
        for _ in range(count):
            reference = _delta_id(reader, reference, "via node")
            nodes.append(reference)
        via_nodes = tuple(nodes)
    if reader.remaining:
        raise FormatError("trailing bytes after the message")
    return RouteMessage(map_version, method, source, target, via_edges, shortcut_flags, via_nodes)


def _expect(message: RouteMessage, method: Method) -> None:
    if message.method is not method:
        raise ValueError(f"expected a {method.name} message, got {message.method.name}")


def message_from_via_edges(map_version: int, repr_: ViaEdgeRepr) -> RouteMessage:
    return RouteMessage(map_version, Method.VIA_EDGES, repr_.source, repr_.target, via_edges=repr_.vias)


def via_edges_from_message(message: RouteMessage) -> ViaEdgeRepr:
    _expect(message, Method.VIA_EDGES)
    return ViaEdgeRepr(message.source, message.target, message.via_edges)


def message_from_ch_path(map_version: int, source: int, target: int, path: ChPath) -> RouteMessage:
    if path.edges and (path.source != source or path.target != target):
        raise ValueError("path endpoints disagree with source and target")
    if not path.edges and source != target:
        raise ValueError("an empty path needs source == target")
    return RouteMessage(
        map_version,
        Method.CH_PATH,
        source,
        target,
        via_edges=tuple((e.tail, e.head) for e in path.edges),
        shortcut_flags=tuple(e.shortcut for e in path.edges),
    )


def ch_path_from_message(message: RouteMessage) -> tuple[int, int, ChPath]:
    """Endpoints and path; the edges must chain source to target."""
    _expect(message, Method.CH_PATH)
    if not message.via_edges:
        if message.source != message.target:
            raise ValueError("an empty path needs source == target")
        return message.source, message.target, ChPath(())
    position = message.source
    for tail, head in message.via_edges:
        if tail != position:
            raise ValueError("path edges do not chain")
        position = head
    if position != message.target:
        raise ValueError("path edges stop short of the target")
    edges = tuple(
        ChEdge(tail, head, flag)
        for (tail, head), flag in zip(message.via_edges, message.shortcut_flags)
    )
    return message.source, message.target, ChPath(edges)


def message_from_combined(map_version: int, repr_: CombinedRepr) -> RouteMessage:
    return RouteMessage(
        map_version,
        Method.COMBINED,
        repr_.source,
        repr_.target,
        via_edges=tuple((e.tail, e.head) for e in repr_.vias),
        shortcut_flags=tuple(e.shortcut for e in repr_.vias),
    )


def combined_from_message(message: RouteMessage) -> CombinedRepr:
    _expect(message, Method.COMBINED)
    vias = tuple(
        ChEdge(tail, head, flag)
        for (tail, head), flag in zip(message.via_edges, message.shortcut_flags)
    )
    return CombinedRepr(message.source, message.target, vias)


def message_from_via_nodes(map_version: int, repr_: ViaNodeRepr) -> RouteMessage:
    return RouteMessage(map_version, Method.VIA_NODES, repr_.source, repr_.target, via_nodes=repr_.vias)


def via_nodes_from_message(message: RouteMessage) -> ViaNodeRepr:
    _expect(message, Method.VIA_NODES)
    return ViaNodeRepr(message.source, message.target, message.via_nodes)
