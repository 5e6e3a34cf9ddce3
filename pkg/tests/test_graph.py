"""
Tests for graph construction, soundness rules and activation waves.
"""

import json
from dataclasses import replace

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import load_graph, VISION
from coordsched_cli.core.dsl.declarations import PortDecl, PortDirection
from coordsched_cli.core.dsl.diagnostics import has_errors
from coordsched_cli.core.dsl.parser import parse_app
from coordsched_cli.core.graph.model import (
    Edge,
    NodeCategory,
    activation_sets,
    assemble_graph,
    build_graph,
    check_soundness,
    classify_node,
    dump_graph,
    validate_graph,
    with_ft,
)
from coordsched_cli.errors import GraphError
from strategies import DATA, dag_graph, dag_shapes, task_node


def with_input(node, port_name, data_type=DATA):
    return replace(node, ports=node.ports + (PortDecl(PortDirection.INPUT, data_type, port_name),))


def graph_errors(text):
    result = build_graph(parse_app(text))
    assert isinstance(result, list)
    return [d.message for d in result if d.is_error]


class TestBuildGraph:
    def test_vision(self, vision_graph):
        assert len(vision_graph) == 5
        assert len(vision_graph.edges) == 5
        assert vision_graph.topo_order[0] == "ImageCapture"
        assert vision_graph.topo_order[-1] == "DecisionRec"
        assert vision_graph.predecessors("DecisionMaking") == ["ObjectDetection", "OpticalFlow"]
        assert vision_graph.successors("ImageCapture") == ["ObjectDetection", "OpticalFlow"]
        assert validate_graph(vision_graph) == []

    def test_unknown_node(self, vision_graph):
        with pytest.raises(GraphError, match="unknown node Nope"):
            vision_graph.node("Nope")

    def test_cycle(self):
        text = """
        app C { period 10ms; deadline 10ms; type T;
          component A { in T i; out T o; version v on big; }
          component B { in T i; out T o; version v on big; }
          edge A.o -> B.i; edge B.o -> A.i; }
        """
        found = graph_errors(text)
        assert any(m.startswith("cycle: A -> B -> A") for m in found)

    def test_type_mismatch(self):
        text = """
        app M { period 10ms; deadline 10ms; type T; type U;
          component A { out T o; version v on big; }
          component B { in U i; version v on big; }
          edge A.o -> B.i; }
        """
        assert graph_errors(text) == ["type mismatch on edge A.o -> B.i: T vs U"]

    def test_unconnected_input_and_two_producers(self):
        text = """
        app P { period 10ms; deadline 10ms; type T;
          component A { out T o; version v on big; }
          component B { out T o; version v on big; }
          component C { in T i; in T j; version v on big; }
          edge A.o -> C.i; edge B.o -> C.i; }
        """
        found = graph_errors(text)
        assert "unconnected input port C.j" in found
        assert "input port C.i has 2 producers: A.o, B.o" in found

    def test_unconsumed_output_is_a_warning(self):
        text = """
        app W { period 10ms; deadline 10ms; type T;
          component A { out T o; out T spare; version v on big; }
          component B { in T i; version v on big; }
          edge A.o -> B.i; }
        """
        graph = build_graph(parse_app(text))
        assert not isinstance(graph, list)
        assert [w.message for w in graph.warnings] == ["output port A.spare is not consumed"]


class TestClassification:
    def test_vision_kinds(self, vision_graph):
        assert classify_node(vision_graph, "ImageCapture").kind is NodeCategory.SOURCE
        assert classify_node(vision_graph, "DecisionRec").kind is NodeCategory.SINK
        detection = classify_node(vision_graph, "ObjectDetection")
        assert detection.kind is NodeCategory.INTERIOR
        assert not detection.stateless
        assert classify_node(vision_graph, "OpticalFlow").stateless

    def test_vision_waves(self, vision_graph):
        assert activation_sets(vision_graph) == [
            ["ImageCapture"],
            ["ObjectDetection", "OpticalFlow"],
            ["DecisionMaking"],
            ["DecisionRec"],
        ]

    def test_empty_graph_has_no_waves(self):
        graph = assemble_graph("Empty", [], [], 10.0, 10.0)
        assert activation_sets(graph) == []

    def test_dump_graph_is_stable_json(self, vision_graph):
        document = json.loads(dump_graph(vision_graph))
        assert document["app"] == "Vision"
        assert document["waves"][1] == ["ObjectDetection", "OpticalFlow"]
        assert dump_graph(vision_graph) == dump_graph(load_graph(VISION))


class TestWithFt:
    def test_set_and_clear(self, vision_graph):
        annotated = with_ft(vision_graph, "DecisionMaking", 3)
        assert annotated.node("DecisionMaking").ft.replicas == 3
        assert with_ft(annotated, "DecisionMaking", None).node("DecisionMaking").ft is None

    def test_unknown_component(self, vision_graph):
        with pytest.raises(GraphError):
            with_ft(vision_graph, "Nope", 3)


@pytest.mark.acceptance
class TestSoundnessProperties:
    @settings(max_examples=1000, deadline=None)
    @given(dag_shapes(max_nodes=12))
    def test_accepted_graphs_are_sound(self, shape):
        size, edges = shape
        graph = dag_graph(size, edges)
        assert nx.is_directed_acyclic_graph(graph.to_networkx())
        feeding = {}
        for edge in graph.edges:
            key = (edge.consumer, edge.consumer_port)
            assert key not in feeding
            feeding[key] = edge
        for task in graph.nodes:
            for port in task.inputs:
                assert (task.name, port.port_name) in feeding
        waves = {name: i for i, wave in enumerate(activation_sets(graph)) for name in wave}
        for edge in graph.edges:
            assert waves[edge.producer] < waves[edge.consumer]

    @settings(max_examples=300, deadline=None)
    @given(dag_shapes(max_nodes=12), st.sampled_from(["cycle", "type", "producers", "unconnected"]))
    def test_injected_violation_is_caught(self, shape, violation):
        size, edges = shape
        graph = dag_graph(size, edges)
        nodes = list(graph.nodes)
        links = set(graph.edges)
        first, last = nodes[0].name, nodes[-1].name

        if violation == "cycle":
            if size > 1 and not any(e.producer == first and e.consumer == last for e in links):
                nodes[-1] = with_input(nodes[-1], f"in_{first}")
                links.add(Edge(first, "out", last, f"in_{first}"))
            nodes[0] = with_input(nodes[0], "in_loop")
            links.add(Edge(last, "out", first, "in_loop"))
        elif violation == "type":
            nodes.append(with_input(task_node("Extra", [], ["A"]), "in_x", "Other"))
            links.add(Edge(first, "out", "Extra", "in_x"))
        elif violation == "producers":
            nodes.extend([task_node("P1", [], ["A"]), task_node("P2", [], ["A"])])
            nodes.append(with_input(task_node("Join", [], ["A"]), "in_dup"))
            links.add(Edge("P1", "out", "Join", "in_dup"))
            links.add(Edge("P2", "out", "Join", "in_dup"))
        else:
            nodes[-1] = with_input(nodes[-1], "dangling")

        diags = check_soundness(nodes, links)
        assert has_errors(diags), violation
        assert isinstance(assemble_graph("Broken", nodes, links, 10.0, 10.0), list)
