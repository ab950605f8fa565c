"""Tests for computational graph construction, distances and the graph codec."""
import json
import os
import sys
import tempfile
import unittest
from collections import deque

import numpy as np

# Add the project root to the path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from graphhyper.archspace.counting import spec_param_count
from graphhyper.archspace.specs import GPTSpec, LinearSpec, ViTSpec, get_preset
from graphhyper.errors import GraphBuildError, GraphParseError
from graphhyper.graphir.builder import (
    BLOCK_LEARNABLE_COUNT, BLOCK_NODE_COUNT, build_graph, target_shape
)
from graphhyper.graphir.codec import (
    deserialize_graph, graph_to_record, read_graphs, serialize_graph, write_graphs
)
from graphhyper.graphir.distances import UNREACHABLE, bucket_distances, shortest_path_distances
from graphhyper.graphir.graph import CompGraph, GraphNode, graph_summary
from graphhyper.graphir.optypes import OP_INDEX, VOCAB_SIZE, OpType


def small_vit(layers: int = 2) -> ViTSpec:
    return ViTSpec(num_layers=layers, num_heads=2, hidden_dim=16, mlp_dim=64,
                   patch_size=2, image_size=8, num_classes=10)


def small_gpt(layers: int = 2, tied: bool = False) -> GPTSpec:
    return GPTSpec(num_layers=layers, num_heads=2, embed_dim=16, vocab_size=64,
                   context_length=32, tie_word_embeddings=tied)


def bfs_distances(graph: CompGraph) -> np.ndarray:
    """Undirected hop distances by plain breadth-first search."""
    n = len(graph.nodes)
    neighbours = {node.id: set() for node in graph.nodes}
    for src, dst in graph.edges:
        neighbours[src].add(dst)
        neighbours[dst].add(src)
    dist = np.full((n, n), UNREACHABLE, dtype=np.int64)
    for start in neighbours:
        seen = {start: 0}
        queue = deque([start])
        while queue:
            current = queue.popleft()
            for nxt in neighbours[current]:
                if nxt not in seen:
                    seen[nxt] = seen[current] + 1
                    queue.append(nxt)
        for node_id, hops in seen.items():
            dist[graph.position(start), graph.position(node_id)] = hops
    return dist


class TestOpVocabulary(unittest.TestCase):
    """Test the closed operation vocabulary."""

    def test_indices_are_dense(self):
        """Test that op indices cover 0..VOCAB_SIZE-1 once each."""
        self.assertEqual(VOCAB_SIZE, 17)
        self.assertEqual(sorted(OP_INDEX.values()), list(range(VOCAB_SIZE)))

    def test_unknown_tag(self):
        """Test that unknown tags raise a vocabulary error."""
        from graphhyper.errors import VocabularyError
        self.assertIs(OpType.from_tag("bias"), OpType.BIAS)
        with self.assertRaises(VocabularyError):
            OpType.from_tag("conv3d")


class TestGraphBuilder(unittest.TestCase):
    """Test graphs built from architecture specs."""

    def test_vit_node_count(self):
        """Test that a ViT graph has 10 + 16L nodes and 12 learnable per block."""
        for layers in (1, 2, 5):
            graph = build_graph(small_vit(layers))
            self.assertEqual(len(graph.nodes), 10 + BLOCK_NODE_COUNT * layers)
            self.assertEqual(len(graph.learnable_nodes), 8 + BLOCK_LEARNABLE_COUNT * layers)

    def test_gpt_node_count(self):
        """Test GPT node counts, tied and untied, and the per-block increment."""
        self.assertEqual(len(build_graph(small_gpt(2)).nodes), 8 + 16 * 2)
        self.assertEqual(len(build_graph(small_gpt(2, tied=True)).nodes), 7 + 16 * 2)
        delta = len(build_graph(small_gpt(6)).nodes) - len(build_graph(small_gpt(3)).nodes)
        self.assertEqual(delta, 48)

    def test_linear_graph(self):
        """Test the single-layer graph."""
        graph = build_graph(LinearSpec(4, 4))
        self.assertEqual([n.op for n in graph.nodes],
                         [OpType.INPUT, OpType.CLASSIFICATION_HEAD, OpType.BIAS, OpType.OUTPUT])
        self.assertEqual(graph.learnable_param_count(), 20)
        no_bias = build_graph(LinearSpec(4, 4, bias=False))
        self.assertEqual(no_bias.tensor_names, ["head.weight"])

    def test_topological_order(self):
        """Test that every edge goes forward in the topological order."""
        graph = build_graph(small_gpt(2))
        order = {node_id: i for i, node_id in enumerate(graph.topological_order())}
        for src, dst in graph.edges:
            self.assertLess(order[src], order[dst])

    def test_cycle_rejected(self):
        """Test that a cyclic graph fails the order check."""
        nodes = (GraphNode(0, OpType.INPUT), GraphNode(1, OpType.ACTIVATION))
        graph = CompGraph(nodes=nodes, edges=((0, 1), (1, 0)))
        with self.assertRaises(GraphBuildError):
            graph.topological_order()

    def test_invalid_nodes_rejected(self):
        """Test duplicate ids, unknown edge targets and structural tensors."""
        with self.assertRaises(GraphBuildError):
            CompGraph(nodes=(GraphNode(0, OpType.INPUT), GraphNode(0, OpType.OUTPUT)), edges=())
        with self.assertRaises(GraphBuildError):
            CompGraph(nodes=(GraphNode(0, OpType.INPUT),), edges=((0, 5),))
        with self.assertRaises(GraphBuildError):
            CompGraph(nodes=(GraphNode(0, OpType.SOFTMAX, (2, 1, 1, 1), "x", (2,)),), edges=())

    def test_coverage(self):
        """Test that graph nodes own every learnable scalar of the network."""
        specs = [small_vit(3), small_gpt(2), small_gpt(2, tied=True), LinearSpec(7, 3),
                 get_preset("vit-s"), get_preset("gpt2-s")]
        for spec in specs:
            graph = build_graph(spec)
            self.assertEqual(graph.learnable_param_count(), spec_param_count(spec), spec)

    def test_tied_head_not_predicted(self):
        """Test that a tied LM head is listed as non-predicted."""
        graph = build_graph(small_gpt(1, tied=True))
        self.assertIn("lm_head.weight", graph.non_predicted)
        self.assertNotIn("lm_head.weight", graph.tensor_names)
        self.assertIn("lm_head.weight", build_graph(small_gpt(1)).tensor_names)

    def test_target_shapes(self):
        """Test shape folding and derived node properties."""
        self.assertEqual(target_shape((384,)), (384, 1, 1, 1))
        self.assertEqual(target_shape((1, 1, 384)), (384, 1, 1, 1))
        self.assertEqual(target_shape((1, 197, 384)), (197, 384, 1, 1))
        self.assertEqual(target_shape((384, 3, 16, 16)), (384, 3, 16, 16))
        with self.assertRaises(GraphBuildError):
            target_shape((2, 3, 4))

        node = GraphNode(1, OpType.PATCH_PROJECTION, (384, 3, 16, 16), "conv_proj.weight", (384, 3, 16, 16))
        self.assertEqual(node.folded, (384 * 16, 3 * 16))
        self.assertEqual(node.fan_in, 3 * 16 * 16)
        self.assertEqual(node.n_dim, 4)
        self.assertEqual(GraphNode(2, OpType.BIAS, (8, 1, 1, 1), "b", (8,)).n_dim, 1)

    def test_summary(self):
        """Test the summary counts."""
        graph = build_graph(small_vit(1))
        summary = graph_summary(graph)
        self.assertEqual(summary["nodes"], 26)
        self.assertEqual(summary["learnable_params"], spec_param_count(small_vit(1)))

    def test_graph_id(self):
        """Test that build_graph stores the requested id."""
        self.assertEqual(build_graph(small_vit(1), graph_id="arch-7").id, "arch-7")


class TestDistances(unittest.TestCase):
    """Test shortest-path distance computation."""

    def test_chain(self):
        """Test distances on a simple chain."""
        graph = build_graph(LinearSpec(3, 2))
        dist = shortest_path_distances(graph)
        expected = np.abs(np.subtract.outer(np.arange(4), np.arange(4)))
        np.testing.assert_array_equal(dist, expected)

        directed = shortest_path_distances(graph, undirected=False)
        self.assertEqual(directed[0, 3], 3)
        self.assertEqual(directed[3, 0], UNREACHABLE)

    def test_matches_bfs(self):
        """Test networkx distances against a plain BFS on a transformer graph."""
        graph = build_graph(small_gpt(2))
        np.testing.assert_array_equal(shortest_path_distances(graph), bfs_distances(graph))

    def test_bucketing(self):
        """Test clipping and the unreachable bucket."""
        dist = np.array([[0, 3, UNREACHABLE], [3, 0, 9], [UNREACHABLE, 9, 0]], dtype=np.int64)
        buckets = bucket_distances(dist, 4)
        np.testing.assert_array_equal(buckets, [[0, 3, 5], [3, 0, 4], [5, 4, 0]])


class TestGraphCodec(unittest.TestCase):
    """Test JSON-lines graph serialization."""

    def test_round_trip(self):
        """Test that a deserialized graph equals the original."""
        for spec in (small_vit(2), small_gpt(1, tied=True)):
            graph = build_graph(spec, graph_id="g")
            restored = deserialize_graph(serialize_graph(graph))
            self.assertEqual(restored, graph)
            self.assertEqual(restored.arch, spec)

    def test_key_order_irrelevant(self):
        """Test that permuted record keys parse to the same graph."""
        graph = build_graph(small_vit(1))
        record = graph_to_record(graph)
        shuffled = {key: record[key] for key in reversed(list(record))}
        shuffled["nodes"] = [{k: n[k] for k in reversed(list(n))} for n in record["nodes"]]
        self.assertEqual(deserialize_graph(json.dumps(shuffled).encode("utf-8")), graph)

    def test_truncated_input(self):
        """Test that truncated bytes raise a parse error."""
        data = serialize_graph(build_graph(small_vit(1)))
        with self.assertRaises(GraphParseError) as ctx:
            deserialize_graph(data[: len(data) // 2], line=3)
        self.assertEqual(ctx.exception.line, 3)

    def test_unknown_op(self):
        """Test that an op outside the vocabulary names the offending field."""
        record = graph_to_record(build_graph(LinearSpec(2, 2)))
        record["nodes"][1]["op"] = "conv3d"
        with self.assertRaises(GraphParseError) as ctx:
            deserialize_graph(json.dumps(record).encode("utf-8"))
        self.assertEqual(ctx.exception.field, "nodes[1].op")

    def test_missing_field(self):
        """Test that a missing required field is reported."""
        record = graph_to_record(build_graph(LinearSpec(2, 2)))
        del record["edges"]
        with self.assertRaises(GraphParseError) as ctx:
            deserialize_graph(json.dumps(record).encode("utf-8"))
        self.assertEqual(ctx.exception.field, "edges")

    def test_file_round_trip(self):
        """Test writing and reading a graph file with line numbers in errors."""
        graphs = [build_graph(small_vit(1), graph_id="a"), build_graph(small_gpt(1), graph_id="b")]
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "graphs.jsonl")
            self.assertEqual(write_graphs(path, graphs), 2)
            self.assertEqual(read_graphs(path), graphs)

            with open(path, "ab") as f:
                f.write(b"{not json}\n")
            with self.assertRaises(GraphParseError) as ctx:
                read_graphs(path)
            self.assertEqual(ctx.exception.line, 3)


if __name__ == '__main__':
    unittest.main()
