"""Text formats for graphs and paths.

Graph files (.gr) follow the 9th DIMACS shortest-path conventions:

    c <comment>                ignored
    p sp <nodes> <arcs>        exactly once, before any arc line
    a <tail> <head> <weight>   1-based node ids, integer weight >= 1

Path files (.path) are a small sibling format:

    q <k>                      number of edges on the route
    e <tail> <head>            k lines, 1-based node ids

Loading converts ids to 0-based; dumping converts back. Dumped output is
canonical (no comments, arcs sorted by tail then head), so load -> dump
-> load reproduces the same graph and the same bytes.
"""

from __future__ import annotations

from typing import IO

from .graph import Graph, Path


class DimacsError(ValueError):
    """Problem in a .gr or .path file; line_number is 1-based, 0 = whole file."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}" if line_number else message)
        self.line_number = line_number


class ParseError(DimacsError):
    """Malformed or out-of-place line."""


class DomainError(DimacsError):
    """Syntactically fine but semantically illegal value (weight < 1, self-loop)."""


class RangeError(DimacsError):
    """Node id outside the declared range."""


def _read(source: bytes | IO[bytes]) -> bytes:
    if isinstance(source, bytes):
        return source
    return source.read()


def _int(token: str, line_number: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(line_number, f"{what} is not an integer: {token!r}") from None


def load_dimacs(source: bytes | IO[bytes]) -> Graph:
    """Parse a DIMACS .gr byte stream into a Graph."""
    node_count: int | None = None
    edges: list[tuple[int, int, int]] = []
    for line_number, raw in enumerate(_read(source).split(b"\n"), start=1):
        try:
            text = raw.decode("ascii")
        except UnicodeDecodeError:
            raise ParseError(line_number, "non-ASCII bytes") from None
        fields = text.split()
        if not fields:
            continue
        kind = fields[0]
        if kind == "c":
            continue
        if kind == "p":
            if node_count is not None:
                raise ParseError(line_number, "second problem line")
            if len(fields) != 4 or fields[1] != "sp":
                raise ParseError(line_number, f"expected 'p sp <nodes> <arcs>', got {text!r}")
            node_count = _int(fields[2], line_number, "node count")
            _int(fields[3], line_number, "arc count")
            if node_count < 0:
                raise ParseError(line_number, f"negative node count {node_count}")
        elif kind == "a":
            if node_count is None:
                raise ParseError(line_number, "arc before the problem line")
            if len(fields) != 4:
                raise ParseError(line_number, f"expected 'a <tail> <head> <weight>', got {text!r}")
            tail = _int(fields[1], line_number, "tail")
            head = _int(fields[2], line_number, "head")
            weight = _int(fields[3], line_number, "weight")
            if not (1 <= tail <= node_count):
                raise RangeError(line_number, f"tail {tail} outside 1..{node_count}")
            if not (1 <= head <= node_count):
                raise RangeError(line_number, f"head {head} outside 1..{node_count}")
            if weight < 1:
                raise DomainError(line_number, f"weight {weight} is not positive")
            if tail == head:
                raise DomainError(line_number, f"self-loop at node {tail}")
            edges.append((tail - 1, head - 1, weight))
        else:
            raise ParseError(line_number, f"unknown line type {kind!r}")
    if node_count is None:
        raise ParseError(0, "missing problem line")
    return Graph(node_count, edges)


def dump_dimacs(graph: Graph) -> bytes:
    """Serialize a Graph canonically; load_dimacs(dump_dimacs(g)) == g."""
    out = [f"p sp {graph.node_count} {graph.edge_count}"]
    for tail, head, weight in graph.edges():
        out.append(f"a {tail + 1} {head + 1} {weight}")
    return ("\n".join(out) + "\n").encode("ascii")


def load_path(source: bytes | IO[bytes]) -> Path:
    """Parse a .path byte stream into a Path."""
    declared: int | None = None
    edges: list[tuple[int, int]] = []
    for line_number, raw in enumerate(_read(source).split(b"\n"), start=1):
        try:
            text = raw.decode("ascii")
        except UnicodeDecodeError:
            raise ParseError(line_number, "non-ASCII bytes") from None
        fields = text.split()
        if not fields:
            continue
        kind = fields[0]
        if kind == "c":
            continue
        if kind == "q":
            if declared is not None:
                raise ParseError(line_number, "second count line")
            if len(fields) != 2:
                raise ParseError(line_number, f"expected 'q <k>', got {text!r}")
            declared = _int(fields[1], line_number, "edge count")
            if declared < 0:
                raise ParseError(line_number, f"negative edge count {declared}")
        elif kind == "e":
            if declared is None:
                raise ParseError(line_number, "edge before the count line")
            if len(fields) != 3:
                raise ParseError(line_number, f"expected 'e <tail> <head>', got {text!r}")
            tail = _int(fields[1], line_number, "tail")
            head = _int(fields[2], line_number, "head")
            if tail < 1 or head < 1:
                raise RangeError(line_number, f"node ids must be >= 1, got {tail} and {head}")
            edges.append((tail - 1, head - 1))
        else:
            raise ParseError(line_number, f"unknown line type {kind!r}")
    if declared is None:
        raise ParseError(0, "missing count line")
    if declared != len(edges):
        raise ParseError(0, f"count line declares {declared} edges but {len(edges)} follow")
    return Path(tuple(edges))


def dump_path(path: Path) -> bytes:
    out = [f"q {len(path)}"]
    for tail, head in path.edges:
        out.append(f"e {tail + 1} {head + 1}")
    return ("\n".join(out) + "\n").encode("ascii")
