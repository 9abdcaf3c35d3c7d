"""Graph evaluation on tensor grids with exact operation-level cost accounting.

Two engines share one elementwise interpreter over the topological order:

* evaluate_naive feeds every uncertain input its full-length grid vector,
  so every operation runs once per grid point (the conventional sweep);
* evaluate_amtc runs a transformed graph in which each operation sees
  value tensors over exactly its own dependency signature, so it runs once
  per distinct point of that subspace, and expand operations broadcast
  tensors between subspaces by copying (reported separately, since copies
  are data movement rather than model arithmetic).

Costs are counted as scalar applications per operation, which makes the
accounting machine-independent; wall time is measured but never part of
report equality.  Out-of-domain arguments (sqrt of a negative, log of a
non-positive, division by zero) raise DomainError rather than propagating
NaN.  Elementwise work may be split across threads (UQC_THREADS, default
1); results and counts are identical to sequential execution.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    DomainError,
    SignatureMismatchError,
    SignatureNotSubsetError,
)
from .graph import EXPAND, Graph, Signature
from .graph import topo_sort
from .quadrature import TensorGrid, grid_input_vector
from .transform import TransformedGraph, signature_is_subset

_MIN_POINTS_PER_WORKER = 2048


def worker_count() -> int:
    """Worker count from UQC_THREADS (default 1, minimum 1)."""
    try:
        return max(1, int(os.environ.get("UQC_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(eq=False, frozen=True)
class ValueTensor:
    """Values of one variable over the distinct points of its signature.

    `data` is flat, in canonical axis-ascending order with the last axis
    varying fastest; an empty signature means a single scalar entry.
    """

    signature: Signature
    data: np.ndarray

    def __eq__(self, other) -> bool:
        if not isinstance(other, ValueTensor):
            return NotImplemented
        return self.signature == other.signature and np.array_equal(self.data, other.data)

    def __len__(self) -> int:
        return len(self.data)


def expand_tensor(value: ValueTensor, to: Signature, axis_sizes) -> ValueTensor:
    """Broadcast a value tensor into the larger signature `to`.

    Equivalent to an outer product with a ones tensor over the missing
    axes followed by a canonical flatten: the output entry at a
    multi-index over `to` equals the input entry at that index restricted
    to the source signature.
    """
    to = tuple(to)
    if not signature_is_subset(value.signature, to):
        raise SignatureNotSubsetError(
            f"cannot expand signature {value.signature} into {to}")
    sizes = tuple(int(s) for s in axis_sizes)
    if value.signature == to:
        return value
    source = set(value.signature)
    shape = tuple(sizes[axis] if axis in source else 1 for axis in to)
    reshaped = value.data.reshape(shape)
    target_shape = tuple(sizes[axis] for axis in to)
    expanded = np.broadcast_to(reshaped, target_shape)
    return ValueTensor(to, np.ascontiguousarray(expanded).ravel())


@dataclass
class EvaluationReport:
    """Outputs plus the cost accounting of one engine run.

    equivalent_model_evals divides the total scalar evaluations by the
    number of elementary operations in one single-point model evaluation.
    wall_time_ms is informational and excluded from equality.
    """

    outputs: dict[str, ValueTensor]
    op_eval_counts: dict[int, int]
    total_scalar_evals: int
    expansion_copies: int
    equivalent_model_evals: float
    wall_time_ms: float = field(default=0.0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EvaluationReport):
            return NotImplemented
        return (self.outputs == other.outputs
                and self.op_eval_counts == other.op_eval_counts
                and self.total_scalar_evals == other.total_scalar_evals
                and self.expansion_copies == other.expansion_copies
                and self.equivalent_model_evals == other.equivalent_model_evals)

    def to_json_dict(self) -> dict:
        return {
            "outputs": {
                name: {"signature": list(vt.signature), "data": vt.data.tolist()}
                for name, vt in self.outputs.items()
            },
            "op_eval_counts": {str(op_id): count
                               for op_id, count in sorted(self.op_eval_counts.items())},
            "total_scalar_evals": self.total_scalar_evals,
            "expansion_copies": self.expansion_copies,
            "equivalent_model_evals": self.equivalent_model_evals,
            "wall_time_ms": self.wall_time_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)


def _first_index(mask: np.ndarray) -> int:
    return int(np.flatnonzero(mask)[0])


def _check_domain(op, arrays) -> None:
    kind = op.kind
    if kind == "div":
        bad = arrays[1] == 0.0
        if bad.any():
            raise DomainError(op.id, kind, _first_index(bad), "division by zero")
    elif kind == "log":
        bad = arrays[0] <= 0.0
        if bad.any():
            raise DomainError(op.id, kind, _first_index(bad), "log of non-positive value")
    elif kind == "sqrt":
        bad = arrays[0] < 0.0
        if bad.any():
            raise DomainError(op.id, kind, _first_index(bad), "sqrt of negative value")
    elif kind == "pow_const":
        exponent = op.exponent
        if exponent != int(exponent):
            bad = arrays[0] < 0.0
            if bad.any():
                raise DomainError(op.id, kind, _first_index(bad),
                                  f"negative base for exponent {exponent}")
        if exponent < 0:
            bad = arrays[0] == 0.0
            if bad.any():
                raise DomainError(op.id, kind, _first_index(bad),
                                  f"zero base for exponent {exponent}")


def _compute(op, arrays, out=None):
    kind = op.kind
    if kind == "neg":
        return np.negative(arrays[0], out=out)
    if kind == "add":
        return np.add(arrays[0], arrays[1], out=out)
    if kind == "sub":
        return np.subtract(arrays[0], arrays[1], out=out)
    if kind == "mul":
        return np.multiply(arrays[0], arrays[1], out=out)
    if kind == "div":
        return np.divide(arrays[0], arrays[1], out=out)
    if kind == "pow_const":
        return np.power(arrays[0], op.exponent, out=out)
    if kind == "sin":
        return np.sin(arrays[0], out=out)
    if kind == "cos":
        return np.cos(arrays[0], out=out)
    if kind == "tan":
        return np.tan(arrays[0], out=out)
    if kind == "exp":
        return np.exp(arrays[0], out=out)
    if kind == "log":
        return np.log(arrays[0], out=out)
    if kind == "sqrt":
        return np.sqrt(arrays[0], out=out)
    raise SignatureMismatchError(f"cannot apply operation kind '{kind}' elementwise")


def _apply_elementary(op, arrays) -> np.ndarray:
    """Domain-checked elementwise application, optionally split over threads."""
    _check_domain(op, arrays)
    n = len(arrays[0])
    workers = worker_count()
    if workers == 1 or n < workers * _MIN_POINTS_PER_WORKER:
        return _compute(op, arrays)
    out = np.empty(n)
    bounds = np.linspace(0, n, workers + 1, dtype=int)
    slices = [slice(bounds[i], bounds[i + 1]) for i in range(workers)]

    def run(chunk: slice) -> None:
        _compute(op, [a[chunk] for a in arrays], out=out[chunk])

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(run, slices))
    return out


def _execute_vectors(graph: Graph, input_vectors: dict[int, np.ndarray],
                     n: int) -> tuple[dict[int, np.ndarray], dict[int, int]]:
    """Run every operation elementwise over n aligned points.

    input_vectors maps axis index -> coordinate vector of length n.
    Returns variable values and per-operation evaluation counts.
    """
    values: dict[int, np.ndarray] = {}
    for axis, (vid, _) in enumerate(graph.uncertain_inputs):
        values[vid] = np.asarray(input_vectors[axis], dtype=float)
    for var in graph.variables:
        if var.kind == "constant":
            values[var.id] = np.full(n, var.constant_value)

    counts: dict[int, int] = {}
    for op_id in topo_sort(graph):
        op = graph.operation_by_id[op_id]
        values[op.output] = _apply_elementary(op, [values[v] for v in op.inputs])
        counts[op_id] = n
    return values, counts


def _report(graph: Graph, outputs: dict[str, ValueTensor], counts: dict[int, int],
            copies: int, wall_ms: float) -> EvaluationReport:
    total = sum(count for op_id, count in counts.items()
                if graph.operation_by_id[op_id].kind != EXPAND)
    per_point = graph.elementary_operation_count()
    equivalent = total / per_point if per_point else 0.0
    return EvaluationReport(outputs, counts, total, copies, equivalent, wall_ms)


def _check_grid(graph: Graph, grid: TensorGrid) -> None:
    if grid.dim != graph.dim:
        raise DimensionMismatchError(
            f"grid has {grid.dim} axes but the model has {graph.dim} uncertain inputs")
    for axis, (_, dist) in enumerate(graph.uncertain_inputs):
        if grid.axes[axis].distribution != dist:
            raise DimensionMismatchError(
                f"grid axis {axis} distribution {grid.axes[axis].distribution} "
                f"does not match model input {dist}")


def evaluate_naive(graph: Graph, grid: TensorGrid) -> EvaluationReport:
    """Conventional full-grid sweep: every operation runs at every point."""
    if graph.has_expansions():
        raise SignatureMismatchError(
            "evaluate_naive requires an untransformed graph; use evaluate_amtc")
    _check_grid(graph, grid)
    n = grid.total_points
    full: Signature = tuple(range(graph.dim))
    start = time.perf_counter()
    vectors = {axis: grid_input_vector(grid, axis) for axis in range(grid.dim)}
    values, counts = _execute_vectors(graph, vectors, n)
    wall_ms = (time.perf_counter() - start) * 1e3
    outputs = {graph.variable_by_id[vid].name: ValueTensor(full, values[vid].copy())
               for vid in graph.outputs}
    return _report(graph, outputs, counts, 0, wall_ms)


def evaluate_amtc(transformed: TransformedGraph, grid: TensorGrid) -> EvaluationReport:
    """Evaluate a transformed graph, one run per distinct subspace point.

    Uncertain input j is fed its k_j raw nodes, constants are size-1
    tensors, and each elementary operation runs over the product of axis
    sizes in its signature.  Expand operations contribute their output
    sizes to expansion_copies, not to total_scalar_evals.  Outputs are
    presented on the full grid so they compare directly with
    evaluate_naive (the final broadcast, if any, is not counted).
    """
    graph = transformed.graph
    _check_grid(graph, grid)
    sizes = grid.axis_sizes
    signature_of = transformed.signature_of
    full: Signature = tuple(range(graph.dim))

    values: dict[int, ValueTensor] = {}
    for axis, (vid, _) in enumerate(graph.uncertain_inputs):
        values[vid] = ValueTensor((axis,), np.asarray(grid.axes[axis].nodes, dtype=float))
    for var in graph.variables:
        if var.kind == "constant":
            values[var.id] = ValueTensor((), np.array([var.constant_value]))

    counts: dict[int, int] = {}
    copies = 0
    start = time.perf_counter()
    for op_id in topo_sort(graph):
        op = graph.operation_by_id[op_id]
        if op.kind == EXPAND:
            result = expand_tensor(values[op.inputs[0]], op.expand_to, sizes)
            copies += len(result)
        else:
            signature = signature_of[op.output]
            operands = []
            for vid in op.inputs:
                tensor = values[vid]
                if tensor.signature != signature:
                    raise SignatureMismatchError(
                        f"operation {op_id} with signature {signature} received "
                        f"input {vid} with signature {tensor.signature}")
                operands.append(tensor.data)
            result = ValueTensor(signature, _apply_elementary(op, operands))
            counts[op_id] = len(result)
        values[op.output] = result
    wall_ms = (time.perf_counter() - start) * 1e3

    outputs = {}
    for vid in graph.outputs:
        tensor = values[vid]
        if tensor.signature != full:
            tensor = expand_tensor(tensor, full, sizes)
        outputs[graph.variable_by_id[vid].name] = tensor
    return _report(graph, outputs, counts, copies, wall_ms)


def evaluate_single_point(graph: Graph, point) -> dict[str, float]:
    """Plain scalar interpretation of the graph at one input point.

    Reference semantics for both grid engines and for sampling drivers.
    """
    point = np.atleast_1d(np.asarray(point, dtype=float))
    if len(point) != graph.dim:
        raise DimensionMismatchError(
            f"point has {len(point)} coordinates but the model has {graph.dim} inputs")
    vectors = {axis: point[axis:axis + 1] for axis in range(graph.dim)}
    values, _ = _execute_vectors(graph, vectors, 1)
    return {graph.variable_by_id[vid].name: float(values[vid][0]) for vid in graph.outputs}


def evaluate_on_samples(graph: Graph, samples: np.ndarray) -> dict[str, np.ndarray]:
    """Evaluate all outputs at an (n, dim) array of input points.

    Vectorized equivalent of evaluate_single_point row by row; DomainError
    point indices refer to sample rows.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[1] != graph.dim:
        raise DimensionMismatchError(
            f"samples have {samples.shape[1]} columns but the model has {graph.dim} inputs")
    vectors = {axis: samples[:, axis] for axis in range(graph.dim)}
    values, _ = _execute_vectors(graph, vectors, samples.shape[0])
    return {graph.variable_by_id[vid].name: values[vid] for vid in graph.outputs}
