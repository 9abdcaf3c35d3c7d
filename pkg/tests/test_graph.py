import pytest

from uqc import GraphBuilder, Normal, builtin_model, to_dot, topo_sort, validate
from uqc.errors import CycleError
from uqc.graph import Graph, OperationNode, VariableNode


def two_branch_graph():
    """cos(u1) and neg(u2) feed exp(neg(u2)) and a final add; the classic
    four-operation mixing example."""
    b = GraphBuilder()
    u1 = b.add_uncertain_input("u1", Normal(0, 1))
    u2 = b.add_uncertain_input("u2", Normal(0, 1))
    c = b.add_operation("cos", [u1])
    n = b.add_operation("neg", [u2])
    e = b.add_operation("exp", [n])
    f = b.add_operation("add", [c, e])
    b.mark_output(f)
    return b.build()


class TestTopoSort:
    def test_four_op_order_with_fifo_tie_break(self):
        g = two_branch_graph()
        kinds = [g.operation_by_id[i].kind for i in topo_sort(g)]
        # cos and neg are both ready initially; smallest id (cos) first
        assert kinds == ["cos", "neg", "exp", "add"]

    def test_single_operation(self):
        b = GraphBuilder()
        x = b.add_uncertain_input("x", Normal(0, 1))
        out = b.add_operation("sin", [x])
        b.mark_output(out)
        g = b.build()
        assert topo_sort(g) == [g.operations[0].id]

    def test_cycle_raises(self):
        # two operations wired into each other, built by hand
        variables = (
            VariableNode(0, "a", "intermediate"),
            VariableNode(1, "b", "intermediate"),
        )
        operations = (
            OperationNode(2, "neg", (1,), 0),
            OperationNode(3, "neg", (0,), 1),
        )
        g = Graph(variables, operations, (), ())
        with pytest.raises(CycleError) as excinfo:
            topo_sort(g)
        assert excinfo.value.node_id in (2, 3)

    @pytest.mark.parametrize("name", ["simple", "piston", "multipoint"])
    def test_edge_order_property(self, name):
        g = builtin_model(name)
        order = topo_sort(g)
        assert len(order) == len(g.operations)
        position = {op_id: i for i, op_id in enumerate(order)}
        for op in g.operations:
            for vid in op.inputs:
                if vid in g.producer_of:
                    assert position[g.producer_of[vid]] < position[op.id]

    @pytest.mark.parametrize("name", ["simple", "piston", "multipoint"])
    def test_deterministic(self, name):
        assert topo_sort(builtin_model(name)) == topo_sort(builtin_model(name))


class TestValidate:
    @pytest.mark.parametrize("name", ["simple", "piston", "multipoint"])
    def test_builtins_are_valid(self, name):
        assert validate(builtin_model(name)) == []

    def test_missing_variable_reference(self):
        g = two_branch_graph()
        bad_op = OperationNode(99, "sin", (1234,), g.operations[0].output)
        bad = Graph(g.variables, g.operations[1:] + (bad_op,),
                    g.uncertain_inputs, g.outputs)
        problems = validate(bad)
        assert any("missing variable 1234" in p for p in problems)

    def test_multiple_producers(self):
        g = two_branch_graph()
        first = g.operations[0]
        dup = OperationNode(first.id, "sin", first.inputs, first.output)
        bad = Graph(g.variables, g.operations + (dup,), g.uncertain_inputs, g.outputs)
        problems = validate(bad)
        assert any("multiple producers" in p for p in problems)

    def test_arity_violation(self):
        g = two_branch_graph()
        ops = list(g.operations)
        ops[-1] = OperationNode(ops[-1].id, "add", ops[-1].inputs[:1], ops[-1].output)
        problems = validate(Graph(g.variables, tuple(ops), g.uncertain_inputs, g.outputs))
        assert any("expected 2" in p for p in problems)

    def test_valid_implies_sortable(self):
        g = two_branch_graph()
        assert validate(g) == []
        topo_sort(g)  # must not raise


class TestDotExport:
    def test_shapes_and_labels(self):
        g = two_branch_graph()
        dot = to_dot(g)
        assert dot.count("shape=ellipse") == len(g.variables)
        assert dot.count("shape=box") == len(g.operations)
        assert 'label="k^2"' in dot  # two uncertain inputs -> full size k^2
