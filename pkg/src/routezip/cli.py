"""Command-line front end.

Subcommands cover the whole pipeline: generate graphs and routes,
preprocess (edge splitting, hierarchy construction), compress a route
to a wire message, decompress a message back, and benchmark a batch of
routes. Exit codes: 0 success, 1 bad usage or an impossible request,
2 unreadable or inconsistent input data, 3 integrity failure during
decompression.

Compressed messages carry a map_version fingerprint: the first eight
bytes (little-endian) of the SHA-256 over the byte content of every
artifact the method depends on. Decompression recomputes it from the
supplied files and refuses to proceed on a mismatch.
"""

from __future__ import annotations

import argparse
import hashlib
import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path as FsPath
from random import Random

from . import dimacs
from .dimacs import DimacsError, ParseError
from .generate import chain_graph, diamond_graph, grid_graph, perturbed_shortest_path, random_walk_path
from .graph import Graph, Path, validate_path
from .hierarchy import (
    BuildParams,
    Hierarchy,
    HierarchyFormatError,
    build,
    compress_combined,
    compress_with_ch,
    decompress_combined,
    load as load_hierarchy,
    save as save_hierarchy,
    unpack,
)
from .shortest_path import ShortestPathEngine
from .via_edges import (
    IntegrityError,
    SplitMapping,
    decompress_via_edges,
    decompress_via_nodes,
    lift_path,
    project_path,
    split_non_unique_edges,
    via_edges_binary,
    via_edges_gallop,
    via_edges_linear,
    via_nodes,
)
from . import wire
from .wire import CodecError, Method

_VIA_METHODS = {
    "via-linear": via_edges_linear,
    "via-binary": via_edges_binary,
    "via-gallop": via_edges_gallop,
}
_METHOD_CHOICES = (*_VIA_METHODS, "via-nodes", "ch", "combined")


class _UsageError(Exception):
    """Raised instead of argparse's SystemExit so main() can return 1."""


class DataError(Exception):
    """Input files are malformed or inconsistent with each other."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fingerprint(*blobs: bytes) -> int:
    digest = hashlib.sha256()
    for blob in blobs:
        digest.update(blob)
    return int.from_bytes(digest.digest()[:8], "little")


def _read(path: str) -> bytes:
    return FsPath(path).read_bytes()


def _write(path: str, data: bytes) -> None:
    FsPath(path).write_bytes(data)


def dump_split_mapping(mapping: SplitMapping) -> bytes:
    """Sidecar text for a split graph: header `m <count> <originals>`,
    then one `s <tail> <head> <midpoint>` line per split edge, 1-based."""
    lines = [f"m {len(mapping.midpoint_of)} {mapping.original_node_count}"]
    for (tail, head) in sorted(mapping.midpoint_of):
        midpoint = mapping.midpoint_of[(tail, head)]
        lines.append(f"s {tail + 1} {head + 1} {midpoint + 1}")
    return ("\n".join(lines) + "\n").encode("ascii")


def load_split_mapping(data: bytes) -> SplitMapping:
    header: tuple[int, int] | None = None
    midpoint_of: dict[tuple[int, int], int] = {}
    split_edge_of: dict[int, tuple[int, int]] = {}
    for number, raw in enumerate(data.split(b"\n"), start=1):
        try:
            line = raw.decode("ascii").strip()
        except UnicodeDecodeError:
            raise ParseError(number, "non-ASCII byte") from None
        if not line or line.startswith("c"):
            continue
        fields = line.split()
        if fields[0] == "m":
            if header is not None:
                raise ParseError(number, "second header line")
            if len(fields) != 3:
                raise ParseError(number, "header needs two numbers")
            try:
                header = (int(fields[1]), int(fields[2]))
            except ValueError:
                raise ParseError(number, "header is not numeric") from None
            if header[0] < 0 or header[1] < 1:
                raise ParseError(number, "header values out of range")
            continue
        if fields[0] != "s":
            raise ParseError(number, f"unknown record {fields[0]!r}")
        if header is None:
            raise ParseError(number, "record before the header")
        if len(fields) != 4:
            raise ParseError(number, "split record needs three numbers")
        try:
            tail, head, midpoint = (int(field) - 1 for field in fields[1:])
        except ValueError:
            raise ParseError(number, "split record is not numeric") from None
        originals = header[1]
        if not (0 <= tail < originals and 0 <= head < originals):
            raise ParseError(number, "split endpoints outside the original graph")
        if midpoint < originals:
            raise ParseError(number, "midpoint collides with an original node")
        if (tail, head) in midpoint_of or midpoint in split_edge_of:
            raise ParseError(number, "duplicate split record")
        midpoint_of[(tail, head)] = midpoint
        split_edge_of[midpoint] = (tail, head)
    if header is None:
        raise ParseError(0, "missing header line")
    if len(midpoint_of) != header[0]:
        raise ParseError(0, f"header promises {header[0]} records, found {len(midpoint_of)}")
    return SplitMapping(header[1], midpoint_of, split_edge_of)


@dataclass
class _Context:
    """Everything a compress or decompress run may need, loaded once."""

    graph: Graph
    engine: ShortestPathEngine
    graph_bytes: bytes
    hierarchy: Hierarchy | None = None
    hierarchy_version: int = 0
    split_graph: Graph | None = None
    split_engine: ShortestPathEngine | None = None
    mapping: SplitMapping | None = None
    split_version: int = 0


def _load_context(args, need_ch: bool, need_split: bool) -> _Context:
    graph_bytes = _read(args.graph)
    graph = dimacs.load_dimacs(graph_bytes)
    ctx = _Context(graph=graph, engine=ShortestPathEngine(graph), graph_bytes=graph_bytes)
    if need_ch:
        if args.ch is None:
            raise _UsageError("this method needs --ch")
        ch_bytes = _read(args.ch)
        ctx.hierarchy = load_hierarchy(ch_bytes)
        if ctx.hierarchy.node_count != graph.node_count:
            raise DataError("hierarchy and graph disagree on the node count")
        ctx.hierarchy_version = _fingerprint(graph_bytes, ch_bytes)
    if need_split:
        if args.split is None or args.map is None:
            raise _UsageError("this method needs --split and --map")
        split_bytes = _read(args.split)
        map_bytes = _read(args.map)
        ctx.split_graph = dimacs.load_dimacs(split_bytes)
        ctx.mapping = load_split_mapping(map_bytes)
        if ctx.mapping.original_node_count != graph.node_count:
            raise DataError("split mapping and graph disagree on the node count")
        expected = graph.node_count + len(ctx.mapping.midpoint_of)
        if ctx.split_graph.node_count != expected:
            raise DataError("split graph and mapping disagree on the node count")
        ctx.split_engine = ShortestPathEngine(ctx.split_graph)
        ctx.split_version = _fingerprint(graph_bytes, split_bytes, map_bytes)
    return ctx


def _require_path_in_graph(graph: Graph, path: Path) -> None:
    if not path.edges:
        raise DataError("the path file holds an empty route")
    violation = validate_path(graph, path)
    if violation is not None:
        raise DataError(f"path does not fit the graph at position {violation.position}: {violation.reason}")


def _compress(ctx: _Context, method: str, path: Path) -> tuple[wire.RouteMessage, int]:
    """Build the wire message; returns it with the via (or edge) count."""
    _require_path_in_graph(ctx.graph, path)
    if method in _VIA_METHODS:
        repr_ = _VIA_METHODS[method](ctx.engine, path)
        version = _fingerprint(ctx.graph_bytes)
        return wire.message_from_via_edges(version, repr_), len(repr_.vias)
    if method == "via-nodes":
        lifted = lift_path(ctx.mapping, path)
        repr_ = via_nodes(ctx.split_engine, lifted)
        return wire.message_from_via_nodes(ctx.split_version, repr_), len(repr_.vias)
    if method == "ch":
        compressed = compress_with_ch(ctx.hierarchy, path)
        message = wire.message_from_ch_path(ctx.hierarchy_version, path.source, path.target, compressed)
        return message, len(compressed)
    if method == "combined":
        repr_ = compress_combined(ctx.hierarchy, ctx.engine, path)
        return wire.message_from_combined(ctx.hierarchy_version, repr_), len(repr_.vias)
    raise _UsageError(f"unknown method {method!r}")


def _decompress(ctx: _Context, message: wire.RouteMessage) -> Path:
    if message.method is Method.VIA_EDGES:
        expected = _fingerprint(ctx.graph_bytes)
        if message.map_version != expected:
            raise IntegrityError("map_version does not match the graph")
        return decompress_via_edges(ctx.engine, wire.via_edges_from_message(message))
    if message.method is Method.VIA_NODES:
        if message.map_version != ctx.split_version:
            raise IntegrityError("map_version does not match the graph and split files")
        split_path = decompress_via_nodes(ctx.split_engine, wire.via_nodes_from_message(message))
        try:
            return project_path(ctx.mapping, split_path)
        except ValueError as exc:
            raise IntegrityError(f"split route does not project back: {exc}") from exc
    if message.map_version != ctx.hierarchy_version:
        raise IntegrityError("map_version does not match the graph and hierarchy files")
    if message.method is Method.CH_PATH:
        try:
            _source, _target, compressed = wire.ch_path_from_message(message)
        except ValueError as exc:
            raise DataError(str(exc)) from exc
        try:
            return unpack(ctx.hierarchy, compressed)
        except ValueError as exc:
            raise IntegrityError(str(exc)) from exc
    return decompress_combined(ctx.hierarchy, ctx.engine, wire.combined_from_message(message))


_WEIGHTS_PATTERN = re.compile(r"random:([0-9]+)\.\.([0-9]+)$")


def _parse_weights(spec: str) -> tuple[int, int]:
    if spec == "unit":
        return 1, 1
    match = _WEIGHTS_PATTERN.fullmatch(spec)
    if match is None:
        raise _UsageError(f"--weights must be 'unit' or 'random:LO..HI', got {spec!r}")
    low, high = int(match.group(1)), int(match.group(2))
    if not 1 <= low <= high:
        raise _UsageError("--weights random:LO..HI needs 1 <= LO <= HI")
    return low, high


def _cmd_gen(args) -> int:
    low, high = _parse_weights(args.weights)
    rng = Random(args.seed)
    if args.kind == "grid":
        if args.width is None or args.height is None:
            raise _UsageError("--kind grid needs --width and --height")
        graph = grid_graph(args.width, args.height, rng, low, high)
    elif args.kind == "chain":
        if args.width is None:
            raise _UsageError("--kind chain needs --width")
        graph = chain_graph(args.width, rng, low, high)
    else:
        graph = diamond_graph()
    _write(args.out, dimacs.dump_dimacs(graph))
    return 0


def _cmd_genpath(args) -> int:
    graph = dimacs.load_dimacs(_read(args.graph))
    rng = Random(args.seed)
    try:
        if args.kind == "walk":
            route = random_walk_path(graph, rng, args.len)
        else:
            route = perturbed_shortest_path(ShortestPathEngine(graph), rng, args.len, args.detours)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    _write(args.out, dimacs.dump_path(route))
    return 0


def _cmd_split(args) -> int:
    graph = dimacs.load_dimacs(_read(args.graph))
    split_graph, mapping = split_non_unique_edges(graph)
    _write(args.out, dimacs.dump_dimacs(split_graph))
    _write(args.map, dump_split_mapping(mapping))
    return 0


def _cmd_ch(args) -> int:
    graph = dimacs.load_dimacs(_read(args.graph))
    params = BuildParams(hop_limit=args.hop_limit, settle_limit=args.settle_limit)
    _write(args.out, save_hierarchy(build(graph, params)))
    return 0


def _cmd_compress(args) -> int:
    ctx = _load_context(args, need_ch=args.method in ("ch", "combined"), need_split=args.method == "via-nodes")
    route = dimacs.load_path(_read(args.path))
    message, _count = _compress(ctx, args.method, route)
    _write(args.out, wire.encode(message))
    return 0


def _cmd_decompress(args) -> int:
    payload = _read(args.message)
    message = wire.decode(payload)
    ctx = _load_context(
        args,
        need_ch=message.method in (Method.CH_PATH, Method.COMBINED),
        need_split=message.method is Method.VIA_NODES,
    )
    route = _decompress(ctx, message)
    _write(args.out, dimacs.dump_path(route))
    return 0


def _queries(ctx: _Context, method: str) -> int:
    if method == "via-nodes":
        return ctx.split_engine.query_counter()
    return ctx.engine.query_counter()


def _cmd_bench(args) -> int:
    methods = list(_METHOD_CHOICES) if args.all else [args.method]
    ctx = _load_context(
        args,
        need_ch=any(m in ("ch", "combined") for m in methods),
        need_split="via-nodes" in methods,
    )
    rows = ["path\tmethod\tpath_len\tvia_count\tpayload_bytes\tqueries_compress\tqueries_decompress"
            "\twall_ms_compress\twall_ms_decompress\troundtrip_verified"]
    for path_file in args.paths:
        route = dimacs.load_path(_read(path_file))
        for method in methods:
            before = _queries(ctx, method)
            start = time.perf_counter()
            message, via_count = _compress(ctx, method, route)
            wall_compress = (time.perf_counter() - start) * 1000.0
            queries_compress = _queries(ctx, method) - before
            payload = wire.encode(message)
            decoded = wire.decode(payload)
            before = _queries(ctx, method)
            start = time.perf_counter()
            restored = _decompress(ctx, decoded)
            wall_decompress = (time.perf_counter() - start) * 1000.0
            queries_decompress = _queries(ctx, method) - before
            if restored != route:
                raise IntegrityError(f"round trip changed the route from {path_file} under {method}")
            rows.append(
                f"{path_file}\t{method}\t{len(route)}\t{via_count}\t{len(payload)}"
                f"\t{queries_compress}\t{queries_decompress}"
                f"\t{wall_compress:.3f}\t{wall_decompress:.3f}\tyes"
            )
    report = "\n".join(rows) + "\n"
    if args.out is None:
        sys.stdout.write(report)
    else:
        _write(args.out, report.encode("ascii"))
    return 0


def _add_ch_split_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--ch", help="hierarchy file (.chr), for methods ch and combined")
    parser.add_argument("--split", help="split graph file, for method via-nodes")
    parser.add_argument("--map", help="split mapping sidecar, for method via-nodes")


def _build_parser() -> _Parser:
    parser = _Parser(prog="routezip", description="compress routes against a shared road graph")
    parser.add_argument("--version", action="version", version="%(prog)s 0.1.0")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="generate a graph")
    gen.add_argument("--kind", choices=("grid", "chain", "diamond"), required=True)
    gen.add_argument("--width", type=int, help="grid width, or chain node count")
    gen.add_argument("--height", type=int, help="grid height")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--weights", default="unit", help="'unit' or 'random:LO..HI'")
    gen.add_argument("-o", "--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    genpath = commands.add_parser("genpath", help="generate a route on a graph")
    genpath.add_argument("--graph", required=True)
    genpath.add_argument("--kind", choices=("walk", "perturbed-sp"), required=True)
    genpath.add_argument("--len", type=int, required=True,
                         help="edge count (minimum edge count for perturbed-sp)")
    genpath.add_argument("--seed", type=int, default=0)
    genpath.add_argument("--detours", type=int, default=2, help="perturbed-sp detour count")
    genpath.add_argument("-o", "--out", required=True)
    genpath.set_defaults(func=_cmd_genpath)

    preprocess = commands.add_parser("preprocess", help="build derived artifacts")
    stages = preprocess.add_subparsers(dest="stage", required=True)
    split = stages.add_parser("split", help="double weights and split non-unique edges")
    split.add_argument("--graph", required=True)
    split.add_argument("-o", "--out", required=True, help="split graph output")
    split.add_argument("--map", required=True, help="mapping sidecar output")
    split.set_defaults(func=_cmd_split)
    ch = stages.add_parser("ch", help="build a contraction hierarchy")
    ch.add_argument("--graph", required=True)
    ch.add_argument("--hop-limit", type=int, default=12)
    ch.add_argument("--settle-limit", type=int, default=100)
    ch.add_argument("-o", "--out", required=True)
    ch.set_defaults(func=_cmd_ch)

    compress = commands.add_parser("compress", help="compress a route file to a message")
    compress.add_argument("--graph", required=True)
    compress.add_argument("--path", required=True)
    compress.add_argument("--method", choices=_METHOD_CHOICES, required=True)
    _add_ch_split_options(compress)
    compress.add_argument("-o", "--out", required=True)
    compress.set_defaults(func=_cmd_compress)

    decompress = commands.add_parser("decompress", help="restore the route from a message")
    decompress.add_argument("--graph", required=True)
    decompress.add_argument("--message", required=True)
    _add_ch_split_options(decompress)
    decompress.add_argument("-o", "--out", required=True)
    decompress.set_defaults(func=_cmd_decompress)

    bench = commands.add_parser("bench", help="compress, decompress, and verify a batch of routes")
    bench.add_argument("--graph", required=True)
    pick = bench.add_mutually_exclusive_group(required=True)
    pick.add_argument("--method", choices=_METHOD_CHOICES)
    pick.add_argument("--all", action="store_true", help="run every method")
    bench.add_argument("--paths", nargs="+", required=True, metavar="PATH_FILE")
    _add_ch_split_options(bench)
    bench.add_argument("-o", "--out", help="TSV output, stdout when omitted")
    bench.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"routezip: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        if isinstance(exc, (DimacsError, CodecError, HierarchyFormatError)):
            print(f"routezip: {exc}", file=sys.stderr)
            return 2
        print(f"routezip: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"routezip: {exc}", file=sys.stderr)
        return 2
    except IntegrityError as exc:
        print(f"routezip: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
