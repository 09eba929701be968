import itertools

import numpy as np
import pytest

from byzagg import (
    AgreementGraph,
    AttackScenario,
    BlockDesign,
    ConfigError,
    TaskAssignment,
    WindowedDetector,
    assign_aspis,
    build_agreement_graph,
    byzantine_returns,
    detect_aspis,
    enumerate_maximal_cliques,
    gradients_equal,
    pair_counts,
)
from byzagg.rng import DEMO_STREAM, stream_rng


def test_gradients_equal_exact_vs_tolerance():
    a = np.array([1.0, 2.0, 3.0])
    b = a + 1e-9
    assert not gradients_equal(a, b, "exact")
    assert gradients_equal(a, b, "tolerance")
    assert gradients_equal(a, a.copy(), "exact")
    assert not gradients_equal(a, a + 1.0, "tolerance")
    assert gradients_equal(np.zeros(3), np.zeros(3), "tolerance")


def test_gradients_equal_shape_mismatch():
    with pytest.raises(ConfigError):
        gradients_equal(np.zeros(3), np.zeros(4), "exact")


def _attack_graph(mode, adversaries, disagreement=None, K=7, r=3, seed=0):
    asg = assign_aspis(K, r)
    grads = stream_rng(DEMO_STREAM, seed).standard_normal((asg.f, 4))
    sc = AttackScenario(mode=mode, q=len(adversaries))
    table = byzantine_returns(asg, sc, adversaries, grads, disagreement=disagreement)
    return build_agreement_graph(asg, table, "exact")


def test_agreement_graph_under_always_distort():
    graph = _attack_graph("ATT1", (0, 1, 2))
    # the culprits agree among themselves and disagree with everyone honest
    edges = set(graph.edges())
    assert edges == {(0, 1), (0, 2), (1, 2),
                     (3, 4), (3, 5), (3, 6), (4, 5), (4, 6), (5, 6)}
    outcome = detect_aspis(graph, 3)
    assert outcome.status == "identified"
    assert outcome.adversaries == (0, 1, 2)
    assert outcome.honest == (3, 4, 5, 6)


def test_agreement_graph_under_fixed_disagreement():
    graph = _attack_graph("ATT2", (0, 1, 2), disagreement=(3, 4, 5))
    cliques = enumerate_maximal_cliques(graph)
    maxima = [c for c in cliques if len(c) == max(len(x) for x in cliques)]
    assert sorted(maxima) == [(0, 1, 2, 6), (3, 4, 5, 6)]
    outcome = detect_aspis(graph, 3)
    assert outcome.status == "ambiguous"
    assert outcome.max_clique_count == 2
    assert outcome.adversaries == ()


def test_detect_with_no_adversaries():
    asg = assign_aspis(7, 3)
    from byzagg import GradientTable
    grads = stream_rng(DEMO_STREAM, 1).standard_normal((asg.f, 3))
    table = GradientTable.honest(asg, grads)
    outcome = detect_aspis(build_agreement_graph(asg, table, "exact"), 0)
    assert outcome.status == "identified"
    assert outcome.honest == tuple(range(7))
    assert outcome.adversaries == ()


def _brute_force_maximal_cliques(adjacency):
    n = len(adjacency)
    cliques = []
    for size in range(1, n + 1):
        for cand in itertools.combinations(range(n), size):
            if all(b in adjacency[a] for a, b in itertools.combinations(cand, 2)):
                cliques.append(set(cand))
    return sorted(tuple(sorted(c)) for c in cliques
                  if not any(c < other for other in cliques))


@pytest.mark.parametrize("n,p,seed", [
    (6, 0.3, 0), (6, 0.5, 1), (6, 0.8, 2),
    (8, 0.3, 3), (8, 0.5, 4), (8, 0.8, 5),
    (10, 0.3, 6), (10, 0.5, 7), (10, 0.8, 8), (10, 0.95, 9),
])
def test_clique_enumeration_matches_brute_force(n, p, seed):
    rng = np.random.default_rng(seed)
    adjacency = [set() for _ in range(n)]
    for a, b in itertools.combinations(range(n), 2):
        if rng.random() < p:
            adjacency[a].add(b)
            adjacency[b].add(a)
    graph = AgreementGraph.from_adjacency([frozenset(s) for s in adjacency])
    assert enumerate_maximal_cliques(graph) == _brute_force_maximal_cliques(adjacency)


def _assignment_from_blocks(blocks_1based):
    blocks = tuple(tuple(sorted(x - 1 for x in b)) for b in blocks_1based)
    worker_files = [[] for _ in range(7)]
    for i, b in enumerate(blocks):
        for j in b:
            worker_files[j].append(i)
    return TaskAssignment(scheme="aspis_plus", k_workers=7, r=3,
                          worker_files=tuple(tuple(f) for f in worker_files),
                          file_workers=blocks)


# three consecutive permuted collections of the 7-point plane; the pair of
# culprits shares one block per round, disagreeing with its third member
ROUND_BLOCKS = [
    [{1, 2, 3}, {1, 4, 7}, {2, 4, 6}, {3, 4, 5}, {2, 5, 7}, {1, 5, 6}, {3, 6, 7}],
    [{1, 3, 6}, {3, 4, 7}, {2, 4, 6}, {1, 4, 5}, {5, 6, 7}, {2, 3, 5}, {1, 2, 7}],
    [{1, 3, 6}, {1, 4, 7}, {4, 6, 5}, {2, 3, 4}, {2, 6, 7}, {1, 2, 5}, {3, 5, 7}],
]


def test_each_round_collection_is_a_triple_system():
    for blocks in ROUND_BLOCKS:
        BlockDesign(v=7, k=3, lam=1,
                    blocks=tuple(tuple(sorted(x - 1 for x in b)) for b in blocks))


def test_windowed_detector_three_round_trace():
    scenario = AttackScenario(mode="ATT3", q=2, adversaries=(0, 1))
    detector = WindowedDetector(7, 2, lam=1, window=15)
    rng = stream_rng(DEMO_STREAM, 0)
    estimates = []
    for blocks in ROUND_BLOCKS:
        asg = _assignment_from_blocks(blocks)
        grads = rng.standard_normal((asg.f, 4))
        table = byzantine_returns(asg, scenario, (0, 1), grads)
        agreements, _ = pair_counts(asg, table, "exact")
        estimates.append(detector.step(agreements))
    # degree floor is K-q-1 = 4: nobody flagged until the third disagreement
    assert estimates[0] == ()
    assert estimates[1] == ()
    assert estimates[2] == (0, 1)
    assert detector.flag_log == {0: 3, 1: 3}


def test_windowed_detector_resets_each_window():
    scenario = AttackScenario(mode="ATT3", q=2, adversaries=(0, 1))
    detector = WindowedDetector(7, 2, lam=1, window=3)
    rng = stream_rng(DEMO_STREAM, 0)
    flagged_before_reset = None
    for step in range(4):
        blocks = ROUND_BLOCKS[step % 3]
        asg = _assignment_from_blocks(blocks)
        grads = rng.standard_normal((asg.f, 4))
        table = byzantine_returns(asg, scenario, (0, 1), grads)
        agreements, _ = pair_counts(asg, table, "exact")
        est = detector.step(agreements)
        if step == 2:
            flagged_before_reset = est
    assert flagged_before_reset == (0, 1)
    # fourth call started a new window: flags cleared, next step is position 2
    assert detector.step_in_window == 2
    assert detector.flag_log == {}


def _agreement_matrix(n, cut_pairs):
    m = np.ones((n, n), dtype=int)
    np.fill_diagonal(m, 0)
    for a, b in cut_pairs:
        m[a, b] = m[b, a] = 0
    return m


def test_windowed_detector_truncates_to_q_most_recent():
    # degree floor is K-q-1 = 3; worker 3 drops below it in round 1,
    # worker 4 in round 2, but only q=1 may be charged: the most recent
    detector = WindowedDetector(5, 1, lam=1, window=10)
    est = detector.step(_agreement_matrix(5, [(3, 4), (3, 2)]))
    assert est == (3,)
    est = detector.step(_agreement_matrix(5, [(3, 4), (3, 2), (4, 1), (4, 0)]))
    assert est == (4,)
    assert detector.flag_log == {3: 1, 4: 2}


def test_windowed_detector_flag_tie_breaks_by_index():
    detector = WindowedDetector(5, 1, lam=1, window=10)
    est = detector.step(_agreement_matrix(5, [(3, 4), (3, 0), (4, 1)]))
    assert est == (3,)
    assert detector.flag_log == {3: 1, 4: 1}


def test_pair_counts_values():
    asg = assign_aspis(7, 3)
    from byzagg import GradientTable
    grads = np.arange(35.0 * 2).reshape(35, 2)
    table = GradientTable.honest(asg, grads)
    agreements, common = pair_counts(asg, table, "exact")
    assert agreements[0, 1] == common[0, 1] == 5
    assert np.array_equal(agreements, agreements.T)
    assert agreements[2, 2] == 0
