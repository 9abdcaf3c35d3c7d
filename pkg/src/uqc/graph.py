"""Bipartite computational-graph IR of scalar elementary operations.

A model is a directed acyclic graph whose nodes are either variables or
operations; edges only connect variables to operations and operations to
variables.  Variables are scalars in the dataflow sense: the number of
grid points a variable carries at evaluation time is an engine concern,
not an IR concern.  Node ids are assigned in insertion order from a single
dense counter shared by variables and operations, and that insertion order
is the deterministic tie-breaker for all orderings derived from a graph.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, replace
from functools import cached_property

from .distributions import Distribution
from .errors import CycleError

# Subset of uncertain-input axes a value depends on, ascending and duplicate-free.
Signature = tuple[int, ...]

VARIABLE_KINDS = ("uncertain_input", "constant", "intermediate", "output")

UNARY_OP_KINDS = ("neg", "pow_const", "sin", "cos", "tan", "exp", "log", "sqrt")
BINARY_OP_KINDS = ("add", "sub", "mul", "div")
EXPAND = "expand"
OP_KINDS = UNARY_OP_KINDS + BINARY_OP_KINDS + (EXPAND,)


@dataclass(frozen=True)
class VariableNode:
    id: int
    name: str
    kind: str
    constant_value: float | None = None


@dataclass(frozen=True)
class OperationNode:
    id: int
    kind: str
    inputs: tuple[int, ...]
    output: int
    exponent: float | None = None        # pow_const only
    expand_from: Signature | None = None  # expand only
    expand_to: Signature | None = None    # expand only

    @property
    def arity(self) -> int:
        return 1 if self.kind in UNARY_OP_KINDS or self.kind == EXPAND else 2


@dataclass(frozen=True)
class Graph:
    variables: tuple[VariableNode, ...]
    operations: tuple[OperationNode, ...]
    # Ordered (variable id, distribution) pairs; the order defines axes u_1..u_d.
    uncertain_inputs: tuple[tuple[int, Distribution], ...]
    outputs: tuple[int, ...]

    @cached_property
    def variable_by_id(self) -> dict[int, VariableNode]:
        return {v.id: v for v in self.variables}

    @cached_property
    def operation_by_id(self) -> dict[int, OperationNode]:
        return {op.id: op for op in self.operations}

    @cached_property
    def producer_of(self) -> dict[int, int]:
        """Variable id -> id of the operation that writes it."""
        return {op.output: op.id for op in self.operations}

    @cached_property
    def consumers_of(self) -> dict[int, tuple[int, ...]]:
        """Variable id -> ids of operations that read it, in operation order."""
        table: dict[int, list[int]] = {v.id: [] for v in self.variables}
        for op in self.operations:
            for vid in op.inputs:
                if vid in table:
                    table[vid].append(op.id)
        return {vid: tuple(ops) for vid, ops in table.items()}

    @cached_property
    def axis_of(self) -> dict[int, int]:
        """Uncertain-input variable id -> axis index."""
        return {vid: axis for axis, (vid, _) in enumerate(self.uncertain_inputs)}

    @property
    def dim(self) -> int:
        return len(self.uncertain_inputs)

    @property
    def distributions(self) -> tuple[Distribution, ...]:
        return tuple(dist for _, dist in self.uncertain_inputs)

    def elementary_operation_count(self) -> int:
        """Number of non-expand operations (one single-point model evaluation)."""
        return sum(1 for op in self.operations if op.kind != EXPAND)

    def has_expansions(self) -> bool:
        return any(op.kind == EXPAND for op in self.operations)


def topo_sort(graph: Graph) -> list[int]:
    """Operation ids in evaluation order (Kahn), smallest ready id first.

    Raises CycleError naming one operation on a cycle if the graph is not
    acyclic.  Pure: identical graphs yield identical orderings.
    """
    producer = graph.producer_of
    indegree: dict[int, int] = {}
    dependents: dict[int, list[int]] = {op.id: [] for op in graph.operations}
    for op in graph.operations:
        deps = {producer[v] for v in op.inputs if v in producer}
        deps.discard(op.id)
        indegree[op.id] = len(deps)
        for d in deps:
            dependents[d].append(op.id)

    ready = [op_id for op_id, deg in indegree.items() if deg == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        op_id = heapq.heappop(ready)
        order.append(op_id)
        for dep in dependents[op_id]:
            indegree[dep] -= 1
            if indegree[dep] == 0:
                heapq.heappush(ready, dep)

    if len(order) != len(graph.operations):
        remaining = sorted(op_id for op_id, deg in indegree.items() if deg > 0)
        raise CycleError(remaining[0])
    return order


def validate(graph: Graph) -> list[str]:
    """Return every structural invariant violation; an empty list means ok."""
    violations: list[str] = []
    var_ids = {v.id for v in graph.variables}
    op_ids = {op.id for op in graph.operations}

    all_ids = sorted(var_ids | op_ids)
    if len(all_ids) != len(var_ids) + len(op_ids):
        violations.append("variable and operation ids overlap")
    if all_ids and (all_ids[0] != 0 or all_ids[-1] != len(all_ids) - 1):
        violations.append("node ids are not dense from 0")

    for var in graph.variables:
        if var.kind not in VARIABLE_KINDS:
            violations.append(f"variable {var.id} has unknown kind '{var.kind}'")
        if (var.constant_value is not None) != (var.kind == "constant"):
            violations.append(
                f"variable {var.id}: constant_value present iff kind is constant")

    producers: dict[int, list[int]] = {}
    for op in graph.operations:
        producers.setdefault(op.output, []).append(op.id)
    for vid, ops in producers.items():
        if len(ops) > 1:
            violations.append(f"variable {vid} has multiple producers {ops}")
        if vid not in var_ids:
            violations.append(f"operation {ops[0]} writes missing variable {vid}")

    for var in graph.variables:
        has_producer = var.id in producers
        if var.kind in ("uncertain_input", "constant") and has_producer:
            violations.append(f"{var.kind} variable {var.id} has a producer")
        if var.kind in ("intermediate", "output") and not has_producer:
            violations.append(f"{var.kind} variable {var.id} has no producer")

    for op in graph.operations:
        if op.kind not in OP_KINDS:
            violations.append(f"operation {op.id} has unknown kind '{op.kind}'")
            continue
        if len(op.inputs) != op.arity:
            violations.append(
                f"operation {op.id} ({op.kind}) has {len(op.inputs)} inputs, "
                f"expected {op.arity}")
        for vid in op.inputs:
            if vid not in var_ids:
                violations.append(f"operation {op.id} reads missing variable {vid}")
        if (op.exponent is not None) != (op.kind == "pow_const"):
            violations.append(f"operation {op.id}: exponent present iff kind is pow_const")
        if op.kind == EXPAND:
            if op.expand_from is None or op.expand_to is None:
                violations.append(f"expand operation {op.id} missing signatures")
            elif not (set(op.expand_from) < set(op.expand_to)):
                violations.append(
                    f"expand operation {op.id}: source signature {op.expand_from} "
                    f"is not a strict subset of target {op.expand_to}")
        elif op.expand_from is not None or op.expand_to is not None:
            violations.append(f"operation {op.id}: expand signatures on non-expand kind")

    for vid, _ in graph.uncertain_inputs:
        var = graph.variable_by_id.get(vid)
        if var is None:
            violations.append(f"uncertain input references missing variable {vid}")
        elif var.kind != "uncertain_input":
            violations.append(f"uncertain input variable {vid} has kind '{var.kind}'")
    for vid in graph.outputs:
        if vid not in var_ids:
            violations.append(f"outputs reference missing variable {vid}")

    if not violations:
        try:
            topo_sort(graph)
        except CycleError as exc:
            violations.append(str(exc))
    return violations


class GraphBuilder:
    """Mutable construction helper; produces an immutable Graph."""

    def __init__(self):
        self._variables: list[VariableNode] = []
        self._operations: list[OperationNode] = []
        self._uncertain: list[tuple[int, Distribution]] = []
        self._outputs: list[int] = []
        self._next_id = 0

    def _take_id(self) -> int:
        node_id = self._next_id
        self._next_id += 1
        return node_id

    def add_uncertain_input(self, name: str, dist: Distribution) -> int:
        vid = self._take_id()
        self._variables.append(VariableNode(vid, name, "uncertain_input"))
        self._uncertain.append((vid, dist))
        return vid

    def add_constant(self, value: float, name: str | None = None) -> int:
        vid = self._take_id()
        self._variables.append(
            VariableNode(vid, name or f"_c{vid}", "constant", float(value)))
        return vid

    def add_operation(self, kind: str, inputs: list[int], *, exponent: float | None = None,
                      expand_from: Signature | None = None,
                      expand_to: Signature | None = None,
                      name: str | None = None) -> int:
        """Append an operation plus its fresh output variable; returns the output id."""
        op_id = self._take_id()
        out_id = self._take_id()
        self._operations.append(OperationNode(
            op_id, kind, tuple(inputs), out_id,
            exponent=exponent, expand_from=expand_from, expand_to=expand_to))
        self._variables.append(VariableNode(out_id, name or f"_t{out_id}", "intermediate"))
        return out_id

    def rename(self, var_id: int, name: str) -> None:
        for i, var in enumerate(self._variables):
            if var.id == var_id:
                self._variables[i] = replace(var, name=name)
                return
        raise KeyError(var_id)

    def mark_output(self, var_id: int) -> None:
        self._outputs.append(var_id)

    def build(self) -> Graph:
        produced = {op.output for op in self._operations}
        out_set = set(self._outputs)
        variables = tuple(
            replace(v, kind="output") if v.id in out_set and v.id in produced else v
            for v in self._variables)
        return Graph(variables, tuple(self._operations),
                     tuple(self._uncertain), tuple(self._outputs))


def _size_label(n_axes: int) -> str:
    if n_axes == 0:
        return "1"
    if n_axes == 1:
        return "k"
    return f"k^{n_axes}"


def _op_label(op: OperationNode) -> str:
    if op.kind == "pow_const":
        return f"pow {op.exponent:g}"
    if op.kind == EXPAND:
        return f"expand {set(op.expand_from) or '{}'} -> {set(op.expand_to)}"
    return op.kind


def to_dot(graph: Graph, *, variable_signatures: dict[int, Signature] | None = None,
           clusters: dict[str, tuple[int, ...]] | None = None) -> str:
    """Render the graph in DOT: variables as ellipses, operations as boxes,
    expand operations as double boxes.

    Edges are labeled with the grid data size of the variable they carry:
    k^|signature| when per-variable signatures are given, else the full
    k^d.  `clusters` maps a cluster label to the node ids it contains.
    """
    d = graph.dim
    lines = ["digraph model {", "  rankdir=TB;"]

    def var_decl(var: VariableNode) -> str:
        label = var.name
        if var.kind == "constant":
            label = f"{var.name} = {var.constant_value:g}"
        return f'  n{var.id} [shape=ellipse, label="{label}"];'

    def op_decl(op: OperationNode) -> str:
        peripheries = ", peripheries=2" if op.kind == EXPAND else ""
        return f'  n{op.id} [shape=box, label="{_op_label(op)}"{peripheries}];'

    clustered: set[int] = set()
    if clusters:
        for idx, (label, members) in enumerate(clusters.items()):
            lines.append(f"  subgraph cluster_{idx} {{")
            lines.append(f'    label="{label}";')
            for node_id in members:
                clustered.add(node_id)
                if node_id in graph.variable_by_id:
                    lines.append("  " + var_decl(graph.variable_by_id[node_id]))
                else:
                    lines.append("  " + op_decl(graph.operation_by_id[node_id]))
            lines.append("  }")
    for var in graph.variables:
        if var.id not in clustered:
            lines.append(var_decl(var))
    for op in graph.operations:
        if op.id not in clustered:
            lines.append(op_decl(op))

    def edge_size(var_id: int) -> str:
        if variable_signatures is not None:
            return _size_label(len(variable_signatures[var_id]))
        return _size_label(d)

    for op in graph.operations:
        for vid in op.inputs:
            lines.append(f'  n{vid} -> n{op.id} [label="{edge_size(vid)}"];')
        lines.append(f'  n{op.id} -> n{op.output} [label="{edge_size(op.output)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
