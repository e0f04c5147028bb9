import json

import numpy as np
import pytest

from qgt.codec import (
    DecodeOutcome,
    FormatError,
    SupportVector,
    TestPlan,
    TestResults,
    build_signature,
    encode,
    peel_decode,
)
from qgt.graphs import BipartiteGraph, profile_from_lambda, sample_graph

EXAMPLE_ADJ = np.array(
    [
        [1, 3, 4, 8, 9, 12, 13],
        [2, 3, 6, 7, 9, 11, 12],
        [0, 3, 5, 7, 9, 10, 12],
    ]
)
EXAMPLE_DEFECTIVE = [3, 7, 10]

# the same signature under the other common bit-packing convention
# (column i of parity block k reads the bits of alpha^((2k+1)i) top-down)
ALT_SIGNATURE = np.array(
    [
        [1, 1, 1, 1, 1, 1, 1],
        [0, 0, 1, 0, 1, 1, 1],
        [0, 1, 0, 1, 1, 1, 0],
        [1, 0, 0, 1, 0, 1, 1],
    ],
    dtype=np.uint8,
)
ALT_BLOCKS = np.array([[1, 0, 1, 0], [2, 0, 2, 1], [3, 1, 3, 2]])


def example_plan() -> TestPlan:
    g = BipartiteGraph(14, 3, 7, EXAMPLE_ADJ)
    return TestPlan(g, build_signature(1, 7), seed=0)


def row_permutation(ours: np.ndarray, theirs: np.ndarray) -> list[int]:
    """perm with ours[perm[i]] == theirs[i]; rows must be distinct."""
    perm = []
    for row in theirs:
        matches = np.flatnonzero((ours == row).all(axis=1))
        assert matches.size == 1
        perm.append(int(matches[0]))
    assert sorted(perm) == list(range(len(theirs)))
    return perm


def test_signature_shape_and_counting_row():
    sig = build_signature(1, 7)
    assert (sig.s, sig.r, sig.q) == (4, 7, 3)
    assert (sig.matrix[0] == 1).all()
    assert sig.matrix.shape == (4, 7)


def test_example_encode_blocks_match_up_to_row_convention():
    plan = example_plan()
    res = encode(plan, SupportVector(14, np.array(EXAMPLE_DEFECTIVE)))
    assert res.blocks.tolist() == [[1, 0, 1, 0], [2, 1, 2, 0], [3, 2, 3, 1]]
    perm = row_permutation(plan.signature.matrix, ALT_SIGNATURE)
    assert np.array_equal(res.blocks[:, perm], ALT_BLOCKS)


def test_example_decode_trace():
    plan = example_plan()
    results = encode(plan, SupportVector(14, np.array(EXAMPLE_DEFECTIVE)))
    snapshots = []
    out = peel_decode(plan, results, iteration_hook=lambda i, Y, ident: snapshots.append(list(ident)))
    assert out.identified.tolist() == EXAMPLE_DEFECTIVE
    assert out.iterations == 3
    assert out.identified_per_iteration == [1, 1, 1]
    assert not out.stalled and out.failed_nodes == 0
    assert out.resolved_nodes == 3
    # pools resolve one per pass, in pool order
    assert snapshots == [[3], [3, 7], [3, 7, 10]]


def test_encode_matches_materialized_matrix():
    rng = np.random.default_rng(21)
    p = profile_from_lambda(3, [0.0, 0.3, 0.7])
    g = sample_graph(40, 12, 9, p, seed=5)
    plan = TestPlan(g, build_signature(2, 9))
    s = plan.signature.s
    A = np.zeros((g.M * s, g.N), dtype=np.int64)
    for n in range(g.M):
        for pos, item in enumerate(g.right_adj[n]):
            A[n * s : (n + 1) * s, item] = plan.signature.matrix[:, pos]
    for _ in range(20):
        x = (rng.random(40) < 0.1).astype(np.int64)
        res = encode(plan, SupportVector(40, np.flatnonzero(x)))
        assert np.array_equal(res.values, A @ x)


def test_encode_empty_support_and_mismatch():
    plan = example_plan()
    res = encode(plan, SupportVector(14, np.array([], dtype=np.int64)))
    assert not res.values.any()
    out = peel_decode(plan, res)
    assert out.identified.size == 0
    assert out.iterations == 1
    assert out.resolved_nodes == 3
    with pytest.raises(ValueError):
        encode(plan, SupportVector(10, np.array([1])))


def test_decode_conservation_invariant():
    # running residual + encoding of what was identified == original vector
    p = profile_from_lambda(3, [0.0, 0.2, 0.8])
    g = sample_graph(60, 18, 9, p, seed=13)
    plan = TestPlan(g, build_signature(2, 9))
    support = SupportVector(60, np.array([2, 7, 19, 33, 41, 55]))
    original = encode(plan, support)

    def check(i, Y, ident):
        partial = encode(plan, SupportVector(60, np.array(ident, dtype=np.int64)))
        assert np.array_equal(Y.ravel() + partial.values, original.values)

    out = peel_decode(plan, original, iteration_hook=check)
    assert set(out.identified.tolist()) <= set(support.items.tolist())


def test_stall_reported():
    g = BipartiteGraph(4, 2, 3, np.array([[0, 1, 2], [1, 2, 3]]))
    plan = TestPlan(g, build_signature(1, 3))
    results = encode(plan, SupportVector(4, np.array([1, 2])))
    out = peel_decode(plan, results)
    assert out.stalled
    assert out.identified.size == 0
    assert out.iterations == 1
    assert out.resolved_nodes == 0


def test_decode_failure_requeued_then_resolved_by_neighbor():
    # pool 0 carries a corrupted parity block and fails in pass 1; pool 1
    # identifies their shared item, whose subtraction drives pool 0 to a
    # clean zero residual in pass 2
    g = BipartiteGraph(5, 2, 5, np.array([[0, 1, 2, 3, 4], [0, 1, 2, 3, 4]]))
    plan = TestPlan(g, build_signature(1, 5))
    results = encode(plan, SupportVector(5, np.array([0])))
    values = results.values.copy()
    values[:4] = [1, 1, 0, 1]  # count 1 with the syndrome of alpha^6: out of range
    tampered = TestResults(M=2, s=4, values=values)
    out = peel_decode(plan, tampered)
    assert out.identified.tolist() == [0]
    assert out.iterations == 2
    assert out.resolved_nodes == 2
    assert out.failed_nodes == 0
    assert not out.stalled


def test_unresolvable_failure_counted():
    g = BipartiteGraph(5, 1, 5, np.array([[0, 1, 2, 3, 4]]))
    plan = TestPlan(g, build_signature(1, 5))
    bad = TestResults(M=1, s=4, values=np.array([1, 1, 0, 1]))
    out = peel_decode(plan, bad)
    assert out.identified.size == 0
    assert out.failed_nodes == 1
    assert not out.stalled


def test_max_iterations_cap():
    plan = example_plan()
    results = encode(plan, SupportVector(14, np.array(EXAMPLE_DEFECTIVE)))
    out = peel_decode(plan, results, max_iterations=1)
    assert out.iterations == 1
    assert out.identified.tolist() == [3]


def test_negative_counts_do_not_crash():
    plan = example_plan()
    values = np.zeros(12, dtype=np.int64)
    values[0] = 1  # count says one defective, parity says none
    out = peel_decode(plan, TestResults(M=3, s=4, values=values))
    assert out.identified.size == 0


def test_plan_roundtrip_json():
    plan = example_plan()
    data = json.loads(json.dumps(plan.to_dict()))
    back = TestPlan.from_dict(data)
    assert back.N == 14 and back.M == 3 and back.r == 7 and back.t == 1
    assert np.array_equal(back.graph.right_adj, plan.graph.right_adj)
    assert back.seed == 0
    assert back.num_tests == 12


def test_plan_format_errors():
    good = example_plan().to_dict()
    bad = dict(good, version=99)
    with pytest.raises(FormatError):
        TestPlan.from_dict(bad)
    bad = dict(good, q=5)
    with pytest.raises(FormatError):
        TestPlan.from_dict(bad)
    bad = dict(good)
    del bad["right_adj"]
    with pytest.raises(FormatError):
        TestPlan.from_dict(bad)
    bad = dict(good, right_adj=[[0, 1], [1, 2]])
    with pytest.raises(FormatError):
        TestPlan.from_dict(bad)


def test_support_roundtrip_one_based():
    sup = SupportVector(14, np.array(EXAMPLE_DEFECTIVE))
    data = sup.to_dict()
    assert data["defective"] == [4, 8, 11]
    back = SupportVector.from_dict(data)
    assert back.items.tolist() == EXAMPLE_DEFECTIVE
    with pytest.raises(FormatError):
        SupportVector.from_dict({"version": 1, "N": 14, "defective": [0]})
    with pytest.raises(FormatError):
        SupportVector.from_dict({"version": 1, "N": 14, "defective": [15]})
    with pytest.raises(ValueError):
        SupportVector(5, np.array([7]))


def test_results_roundtrip_and_validation():
    res = TestResults(M=2, s=3, values=np.arange(6))
    back = TestResults.from_dict(res.to_dict(), 2, 3)
    assert np.array_equal(back.blocks, [[0, 1, 2], [3, 4, 5]])
    with pytest.raises(FormatError):
        TestResults.from_dict({"version": 1, "values": [1, 2]}, 2, 3)
    with pytest.raises(FormatError):
        TestResults.from_dict({"version": 1, "values": [-1] * 6}, 2, 3)
    with pytest.raises(FormatError):
        TestResults.from_dict({"version": 2, "values": [0] * 6}, 2, 3)


def test_outcome_serializes_one_based():
    out = DecodeOutcome(
        identified=np.array([3, 7, 10]),
        iterations=3,
        resolved_nodes=3,
        stalled=False,
        failed_nodes=0,
        identified_per_iteration=[1, 1, 1],
    )
    assert out.to_dict()["identified"] == [4, 8, 11]
