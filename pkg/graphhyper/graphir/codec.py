"""JSON-lines graph records."""
import json
import logging
import os
from typing import Any, Dict, Iterable, List, Optional

from graphhyper.archspace.specs import spec_from_dict
from graphhyper.errors import GraphBuildError, GraphParseError, SpecValidationError, VocabularyError
from graphhyper.graphir.graph import CompGraph, GraphNode
from graphhyper.graphir.optypes import VOCAB_VERSION, OpType

logger = logging.getLogger("graphhyper.graphir.codec")


def graph_to_record(graph: CompGraph) -> Dict[str, Any]:
    """Graph as a JSON-compatible dictionary."""
    record = {
        "id": graph.id,
        "vocab_version": VOCAB_VERSION,
        "nodes": [
            {
                "id": node.id,
                "op": node.op.value,
                "shape": list(node.shape) if node.shape else None,
                "name": node.name,
                "param_shape": list(node.param_shape) if node.param_shape else None,
            }
            for node in graph.nodes
        ],
        "edges": [[src, dst] for src, dst in graph.edges],
        "non_predicted": list(graph.non_predicted),
    }
    if graph.arch is not None:
        record["arch"] = {"kind": graph.arch.kind, "config": graph.arch.to_dict()}
    return record


def _require(data: Dict[str, Any], key: str, line: Optional[int], prefix: str = "") -> Any:
    if not isinstance(data, dict) or key not in data:
        raise GraphParseError("Missing field", line=line, field=f"{prefix}{key}")
    return data[key]


def _int_tuple(value: Any, line: Optional[int], field: str) -> Optional[tuple]:
    if value is None:
        return None
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise GraphParseError(f"Expected a list of integers, got {value!r}", line=line, field=field)
    return tuple(value)


def graph_from_record(record: Dict[str, Any], line: Optional[int] = None) -> CompGraph:
    """
    Rebuild a graph from its record dictionary.

    Raises:
        GraphParseError: On missing or malformed fields
    """
    version = record.get("vocab_version", VOCAB_VERSION) if isinstance(record, dict) else None
    if version != VOCAB_VERSION:
        raise GraphParseError(f"Unsupported vocabulary version {version!r}", line=line, field="vocab_version")

    nodes = []
    raw_nodes = _require(record, "nodes", line)
    if not isinstance(raw_nodes, list):
        raise GraphParseError("Expected a list", line=line, field="nodes")
    for i, raw in enumerate(raw_nodes):
        prefix = f"nodes[{i}]."
        node_id = _require(raw, "id", line, prefix)
        if not isinstance(node_id, int):
            raise GraphParseError(f"Node id must be an integer, got {node_id!r}", line=line, field=f"{prefix}id")
        try:
            op = OpType.from_tag(_require(raw, "op", line, prefix))
        except VocabularyError as e:
            raise GraphParseError(str(e), line=line, field=f"{prefix}op") from e
        shape = _int_tuple(raw.get("shape"), line, f"{prefix}shape")
        if shape is not None and len(shape) != 4:
            raise GraphParseError(f"Target shape must have 4 dims, got {shape}", line=line, field=f"{prefix}shape")
        nodes.append(GraphNode(
            id=node_id,
            op=op,
            shape=shape,
            name=raw.get("name"),
            param_shape=_int_tuple(raw.get("param_shape"), line, f"{prefix}param_shape"),
        ))

    edges = []
    for i, edge in enumerate(_require(record, "edges", line)):
        pair = _int_tuple(edge, line, f"edges[{i}]")
        if pair is None or len(pair) != 2:
            raise GraphParseError(f"Edge must be a pair, got {edge!r}", line=line, field=f"edges[{i}]")
        edges.append(pair)

    arch = None
    if record.get("arch") is not None:
        arch_record = record["arch"]
        try:
            arch = spec_from_dict(_require(arch_record, "kind", line, "arch."),
                                  _require(arch_record, "config", line, "arch."))
        except SpecValidationError as e:
            raise GraphParseError(str(e), line=line, field="arch") from e

    try:
        return CompGraph(
            nodes=tuple(nodes),
            edges=tuple(edges),
            arch=arch,
            non_predicted=tuple(_require(record, "non_predicted", line)),
            id=str(record.get("id", "")),
        )
    except GraphBuildError as e:
        raise GraphParseError(str(e), line=line) from e


def serialize_graph(graph: CompGraph) -> bytes:
    """One UTF-8 JSON line, newline-terminated."""
    return (json.dumps(graph_to_record(graph), separators=(",", ":")) + "\n").encode("utf-8")


def deserialize_graph(data: bytes, line: Optional[int] = 1) -> CompGraph:
    """
    Parse a single graph record.

    Args:
        data: Serialized record
        line: Line number reported in parse errors

    Returns:
        The graph

    Raises:
        GraphParseError: On malformed or truncated input
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise GraphParseError(f"Invalid UTF-8: {e}", line=line) from e
    try:
        record = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphParseError(f"Invalid JSON: {e.msg} at column {e.colno}", line=line) from e
    if not isinstance(record, dict):
        raise GraphParseError("Record must be a JSON object", line=line)
    return graph_from_record(record, line=line)


def write_graphs(path: str, graphs: Iterable[CompGraph]) -> int:
    """
    Write graphs as JSON lines.

    Returns:
        Number of graphs written
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    count = 0
    with open(path, 'wb') as f:
        for graph in graphs:
            f.write(serialize_graph(graph))
            count += 1
    logger.info(f"Wrote {count} graphs to {path}")
    return count


def read_graphs(path: str) -> List[CompGraph]:
    """
    Read a JSON-lines graph file; blank lines are skipped.

    Raises:
        GraphParseError: With the offending line number
    """
    graphs = []
    with open(path, 'rb') as f:
        for line_no, raw in enumerate(f, start=1):
            if not raw.strip():
                continue
            graphs.append(deserialize_graph(raw, line=line_no))
    logger.debug(f"Read {len(graphs)} graphs from {path}")
    return graphs
