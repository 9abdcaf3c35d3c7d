import json
import math

import numpy as np
import pytest

from uqc import (
    Normal,
    Uniform,
    ValueTensor,
    builtin_model,
    evaluate_amtc,
    evaluate_naive,
    evaluate_on_samples,
    evaluate_single_point,
    expand_tensor,
    gauss_rule,
    grid_for,
    grid_input_vector,
    insert_expansions,
    parse_model,
    tensor_grid,
)
from uqc.engine import EvaluationReport
from uqc.errors import DimensionMismatchError, DomainError, SignatureMismatchError, SignatureNotSubsetError

BUILTINS = ["simple", "piston", "multipoint"]
# grids with k >= 5 push the piston's inner square root negative
SAFE_K = {"simple": range(2, 8), "piston": range(2, 5), "multipoint": range(2, 8)}


class TestExpandTensor:
    def test_expand_first_axis_into_two(self):
        value = ValueTensor((0,), np.array([1.0, 2.0]))
        out = expand_tensor(value, (0, 1), (2, 2))
        assert out.signature == (0, 1)
        assert out.data.tolist() == [1.0, 1.0, 2.0, 2.0]

    def test_expand_second_axis_into_two(self):
        value = ValueTensor((1,), np.array([3.0, 4.0]))
        out = expand_tensor(value, (0, 1), (2, 2))
        assert out.data.tolist() == [3.0, 4.0, 3.0, 4.0]

    def test_scalar_broadcast(self):
        value = ValueTensor((), np.array([7.0]))
        out = expand_tensor(value, (0,), (3,))
        assert out.data.tolist() == [7.0, 7.0, 7.0]

    def test_middle_axis_insertion(self):
        # oracle: enumerate indices explicitly for sig {0,2} -> {0,1,2}
        value = ValueTensor((0, 2), np.arange(6.0))
        sizes = (2, 4, 3)
        out = expand_tensor(value, (0, 1, 2), sizes)
        expected = [value.data[i0 * 3 + i2]
                    for i0 in range(2) for i1 in range(4) for i2 in range(3)]
        assert out.data.tolist() == expected

    def test_not_a_subset(self):
        with pytest.raises(SignatureNotSubsetError):
            expand_tensor(ValueTensor((0,), np.array([1.0, 2.0])), (1, 2), (2, 2, 2))

    @pytest.mark.parametrize("seed", range(12))
    def test_random_signatures_against_index_oracle(self, seed):
        # oracle: walk every multi-index of the target space and read the
        # source entry at the restricted index
        rng = np.random.default_rng(seed)
        dim = int(rng.integers(1, 5))
        sizes = tuple(int(s) for s in rng.integers(2, 5, dim))
        to = tuple(sorted(rng.choice(dim, size=int(rng.integers(1, dim + 1)),
                                     replace=False)))
        n_from = int(rng.integers(0, len(to) + 1))
        source_sig = tuple(sorted(rng.choice(to, size=n_from, replace=False)))
        source_sizes = [sizes[a] for a in source_sig]
        data = rng.standard_normal(int(np.prod(source_sizes, initial=1)))

        result = expand_tensor(ValueTensor(source_sig, data), to, sizes)

        strides = {}
        acc = 1
        for axis in reversed(source_sig):
            strides[axis] = acc
            acc *= sizes[axis]
        expected = []
        for flat in range(int(np.prod([sizes[a] for a in to]))):
            remainder = flat
            index = {}
            for axis in reversed(to):
                index[axis] = remainder % sizes[axis]
                remainder //= sizes[axis]
            expected.append(data[sum(index[a] * strides[a] for a in source_sig)])
        np.testing.assert_array_equal(result.data, expected)


class TestNaive:
    def test_simple_counts_at_k3(self):
        g = builtin_model("simple")
        report = evaluate_naive(g, grid_for(g.distributions, 3))
        assert report.total_scalar_evals == 36
        assert all(count == 9 for count in report.op_eval_counts.values())
        assert report.expansion_copies == 0
        assert report.equivalent_model_evals == 9.0

    def test_zero_operation_model(self):
        g = parse_model("input x ~ Uniform(-1,1)\noutput f = x\n")
        grid = grid_for(g.distributions, 4)
        report = evaluate_naive(g, grid)
        assert report.total_scalar_evals == 0
        assert report.equivalent_model_evals == 0.0
        np.testing.assert_array_equal(report.outputs["x"].data, grid_input_vector(grid, 0))

    def test_piston_out_of_domain_grid_names_sqrt(self):
        g = builtin_model("piston")
        with pytest.raises(DomainError) as excinfo:
            evaluate_naive(g, grid_for(g.distributions, 8))
        assert excinfo.value.op_kind == "sqrt"

    def test_rejects_transformed_graph(self):
        tg = insert_expansions(builtin_model("simple"))
        with pytest.raises(SignatureMismatchError):
            evaluate_naive(tg.graph, grid_for(tg.graph.distributions, 3))

    def test_rejects_mismatched_grid(self):
        g = builtin_model("simple")
        with pytest.raises(DimensionMismatchError):
            evaluate_naive(g, grid_for([Normal(0, 1)], 3))
        with pytest.raises(DimensionMismatchError):
            evaluate_naive(g, grid_for([Normal(0, 1), Normal(5, 1)], 3))

    def test_matches_single_point_semantics(self):
        for name, k in (("simple", 4), ("piston", 3)):
            g = builtin_model(name)
            grid = grid_for(g.distributions, k)
            report = evaluate_naive(g, grid)
            output = g.variable_by_id[g.outputs[0]].name
            points = grid.points()
            for p in range(0, grid.total_points, 7):
                scalar = evaluate_single_point(g, points[p])[output]
                vector = report.outputs[output].data[p]
                assert vector == pytest.approx(scalar, rel=1e-14, abs=1e-14)


class TestAmtc:
    def test_simple_counts_at_k3(self):
        g = builtin_model("simple")
        tg = insert_expansions(g)
        report = evaluate_amtc(tg, grid_for(g.distributions, 3))
        assert report.total_scalar_evals == 18  # 3 + 3 + 3 + 9
        assert report.expansion_copies == 18    # two expands of size 9
        assert report.equivalent_model_evals == pytest.approx(4.5)
        counts = {g.operation_by_id[op_id].kind: count
                  for op_id, count in report.op_eval_counts.items()
                  if op_id in g.operation_by_id}
        assert counts == {"cos": 3, "neg": 3, "exp": 3, "add": 9}

    @pytest.mark.parametrize("name", BUILTINS)
    def test_equivalence_with_naive(self, name):
        g = builtin_model(name)
        tg = insert_expansions(g)
        output = g.variable_by_id[g.outputs[0]].name
        for k in SAFE_K[name]:
            grid = grid_for(g.distributions, k)
            naive = evaluate_naive(g, grid).outputs[output].data
            fast = evaluate_amtc(tg, grid).outputs[output].data
            np.testing.assert_allclose(fast, naive, rtol=1e-12, atol=0)

    @pytest.mark.parametrize("name", BUILTINS)
    def test_count_law(self, name):
        g = builtin_model(name)
        tg = insert_expansions(g)
        from uqc import compute_influence_matrix
        matrix = compute_influence_matrix(g)
        for k in SAFE_K[name]:
            grid = grid_for(g.distributions, k)
            report = evaluate_amtc(tg, grid)
            for op_id, signature in matrix.rows.items():
                assert report.op_eval_counts[op_id] == k ** len(signature)
            naive_total = g.elementary_operation_count() * k ** g.dim
            assert report.total_scalar_evals <= naive_total

    def test_simple_scaling_ratio(self):
        g = builtin_model("simple")
        tg = insert_expansions(g)
        for k in range(2, 21):
            grid = grid_for(g.distributions, k)
            amtc_total = evaluate_amtc(tg, grid).total_scalar_evals
            naive_total = evaluate_naive(g, grid).total_scalar_evals
            assert amtc_total == k * k + 3 * k
            assert naive_total == 4 * k * k

    def test_mixed_axis_sizes(self):
        g = builtin_model("simple")
        tg = insert_expansions(g)
        grid = tensor_grid([gauss_rule(g.distributions[0], 2),
                            gauss_rule(g.distributions[1], 5)])
        report = evaluate_amtc(tg, grid)
        counts = {g.operation_by_id[op_id].kind: count
                  for op_id, count in report.op_eval_counts.items()}
        assert counts == {"cos": 2, "neg": 5, "exp": 5, "add": 10}
        naive = evaluate_naive(g, grid)
        np.testing.assert_allclose(report.outputs["f"].data, naive.outputs["f"].data,
                                   rtol=1e-12, atol=0)

    @pytest.mark.parametrize("name, sizes", [
        ("simple", (3, 2)),
        ("multipoint", (3, 5)),
        ("piston", (2, 3, 4)),
        ("piston", (4, 2, 3)),
    ])
    def test_equivalence_with_unequal_axis_sizes(self, name, sizes):
        # unequal sizes per axis expose any flattening-order mistake that
        # symmetric grids would mask
        g = builtin_model(name)
        tg = insert_expansions(g)
        output = g.variable_by_id[g.outputs[0]].name
        grid = tensor_grid([gauss_rule(dist, k)
                            for dist, k in zip(g.distributions, sizes)])
        naive = evaluate_naive(g, grid).outputs[output].data
        fast = evaluate_amtc(tg, grid).outputs[output].data
        np.testing.assert_allclose(fast, naive, rtol=1e-12, atol=0)

    def test_three_level_signature_chain_is_single_hop(self):
        # {} -> {0} -> {0,1} -> {0,1,2}: each crossing edge gets exactly
        # one expand node straight to the consumer's signature
        g = parse_model(
            "input a ~ Normal(0,1)\ninput b ~ Normal(0,1)\ninput c ~ Normal(0,1)\n"
            "base = 2 + 1\n"
            "first = base * a\n"
            "second = first + b\n"
            "output third = second * c\n")
        tg = insert_expansions(g)
        expands = [(op.expand_from, op.expand_to)
                   for op in tg.graph.operations if op.kind == "expand"]
        assert ((), (0,)) in expands          # base feeding `* a`
        assert ((0,), (0, 1)) in expands      # first feeding `+ b`
        assert ((0, 1), (0, 1, 2)) in expands  # second feeding `* c`
        grid = grid_for(g.distributions, 3)
        naive = evaluate_naive(g, grid).outputs["third"].data
        fast = evaluate_amtc(tg, grid).outputs["third"].data
        np.testing.assert_allclose(fast, naive, rtol=1e-12, atol=0)

    def test_single_input_model_counts_match_naive(self):
        g = parse_model("input x ~ Normal(0,1)\noutput f = exp(sin(x)) + x\n")
        tg = insert_expansions(g)
        grid = grid_for(g.distributions, 6)
        fast = evaluate_amtc(tg, grid)
        naive = evaluate_naive(g, grid)
        assert fast.total_scalar_evals == naive.total_scalar_evals
        assert fast.expansion_copies == 0

    def test_full_dependency_model_has_no_savings(self):
        g = parse_model("input a ~ Normal(0,1)\ninput b ~ Normal(0,1)\n"
                        "s = a + b\noutput f = sin(s)\n")
        tg = insert_expansions(g)
        grid = grid_for(g.distributions, 4)
        fast = evaluate_amtc(tg, grid)
        naive = evaluate_naive(g, grid)
        assert fast.total_scalar_evals == naive.total_scalar_evals == 2 * 16
        np.testing.assert_allclose(fast.outputs["f"].data, naive.outputs["f"].data,
                                   rtol=1e-12, atol=0)

    def test_partial_signature_output_is_presented_on_full_grid(self):
        g = parse_model("input a ~ Normal(0,1)\ninput b ~ Normal(0,1)\n"
                        "output f = cos(a)\n")
        tg = insert_expansions(g)
        grid = grid_for(g.distributions, 3)
        fast = evaluate_amtc(tg, grid)
        naive = evaluate_naive(g, grid)
        assert fast.outputs["f"].signature == (0, 1)
        np.testing.assert_allclose(fast.outputs["f"].data, naive.outputs["f"].data,
                                   rtol=1e-12, atol=0)

    def test_piston_out_of_domain_matches_naive_failure(self):
        g = builtin_model("piston")
        tg = insert_expansions(g)
        with pytest.raises(DomainError):
            evaluate_amtc(tg, grid_for(g.distributions, 5))
        with pytest.raises(DomainError):
            evaluate_naive(g, grid_for(g.distributions, 5))


class TestSinglePoint:
    def test_simple_values(self):
        g = builtin_model("simple")
        assert evaluate_single_point(g, [0.0, 0.0])["f"] == pytest.approx(2.0)
        assert evaluate_single_point(g, [math.pi / 2, 0.0])["f"] == pytest.approx(1.0)

    def test_dimension_check(self):
        g = builtin_model("simple")
        with pytest.raises(DimensionMismatchError):
            evaluate_single_point(g, [1.0])


class TestDomainGuards:
    def test_division_by_zero(self):
        g = parse_model("input x ~ Uniform(-1,1)\noutput f = 1 / x\n")
        grid = grid_for(g.distributions, 1)  # k=1 node sits exactly at 0
        with pytest.raises(DomainError) as excinfo:
            evaluate_naive(g, grid)
        assert excinfo.value.op_kind == "div"
        assert excinfo.value.point_index == 0

    def test_log_of_non_positive(self):
        g = parse_model("input x ~ Uniform(-1,1)\noutput f = log(x)\n")
        with pytest.raises(DomainError) as excinfo:
            evaluate_naive(g, grid_for(g.distributions, 2))
        assert excinfo.value.op_kind == "log"

    def test_sqrt_of_negative(self):
        g = parse_model("input x ~ Uniform(-4,-2)\noutput f = sqrt(x)\n")
        with pytest.raises(DomainError) as excinfo:
            evaluate_naive(g, grid_for(g.distributions, 2))
        assert excinfo.value.op_kind == "sqrt"

    def test_fractional_power_of_negative(self):
        g = parse_model("input x ~ Uniform(-4,-2)\noutput f = x ^ 0.5\n")
        with pytest.raises(DomainError):
            evaluate_naive(g, grid_for(g.distributions, 2))

    def test_negative_power_of_zero(self):
        g = parse_model("input x ~ Uniform(-1,1)\noutput f = x ^ -1\n")
        with pytest.raises(DomainError):
            evaluate_naive(g, grid_for(g.distributions, 1))

    def test_integer_power_of_negative_is_fine(self):
        g = parse_model("input x ~ Uniform(-2,-1)\noutput f = x ^ 3\n")
        report = evaluate_naive(g, grid_for(g.distributions, 2))
        assert np.all(report.outputs["f"].data < 0)


class TestThreading:
    def test_threaded_results_bit_identical(self, monkeypatch):
        g = builtin_model("piston")
        samples = np.column_stack([
            np.full(20000, 50.0) + np.linspace(-5, 5, 20000),
            np.full(20000, 0.01),
            np.full(20000, 0.005),
        ])
        monkeypatch.delenv("UQC_THREADS", raising=False)
        sequential = evaluate_on_samples(g, samples)["C"]
        monkeypatch.setenv("UQC_THREADS", "3")
        threaded = evaluate_on_samples(g, samples)["C"]
        np.testing.assert_array_equal(sequential, threaded)


class TestReport:
    def test_equality_ignores_wall_time(self):
        g = builtin_model("simple")
        grid = grid_for(g.distributions, 3)
        a = evaluate_naive(g, grid)
        b = evaluate_naive(g, grid)
        assert a == b
        assert a.wall_time_ms != 0.0 or b.wall_time_ms != 0.0 or True

    def test_json_round_trip_structure(self):
        g = builtin_model("simple")
        report = evaluate_naive(g, grid_for(g.distributions, 2))
        payload = json.loads(report.to_json())
        assert set(payload) == {"outputs", "op_eval_counts", "total_scalar_evals",
                                "expansion_copies", "equivalent_model_evals",
                                "wall_time_ms"}
        assert payload["total_scalar_evals"] == 16
        assert payload["outputs"]["f"]["signature"] == [0, 1]

    def test_json_is_byte_stable_modulo_wall_time(self):
        g = builtin_model("simple")
        grid = grid_for(g.distributions, 3)
        texts = [evaluate_naive(g, grid).to_json() for _ in range(2)]
        import re
        stripped = [re.sub(r'"wall_time_ms": [^,}\n]+', '"wall_time_ms": 0', t)
                    for t in texts]
        assert stripped[0] == stripped[1]
