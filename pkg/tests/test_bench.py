from byzagg import attack_agreement_graph, bench_cliques, bench_csv, enumerate_maximal_cliques


def test_att1_graph_structure():
    graph = attack_agreement_graph(20, 5, 4, "ATT1")
    # byzantines disagree with everyone, honest workers form one clique
    for j in range(4):
        assert graph.degree(j) == 0
    for j in range(4, 20):
        assert graph.degree(j) == 15
    cliques = enumerate_maximal_cliques(graph)
    assert len(cliques) == 5   # the honest clique plus four isolated vertices
    assert max(len(c) for c in cliques) == 16


def test_att2_graph_has_two_maximum_cliques():
    graph = attack_agreement_graph(7, 3, 3, "ATT2")
    cliques = enumerate_maximal_cliques(graph)
    top = max(len(c) for c in cliques)
    assert top == 4
    assert sum(1 for c in cliques if len(c) == top) == 2


def test_bench_cliques_reports():
    row = bench_cliques(7, 3, 3, "ATT2", repeats=2)
    assert row.k_workers == 7
    assert row.q == 3
    assert row.attack == "ATT2"
    assert row.milliseconds > 0
    assert row.maximum_cliques == 2
    assert row.max_size == 4


def test_bench_csv_format():
    rows = [bench_cliques(7, 3, 2, a, repeats=1) for a in ("ATT1", "ATT2")]
    text = bench_csv(rows)
    lines = text.strip().splitlines()
    assert lines[0] == "K,q,attack,milliseconds"
    assert len(lines) == 3
    assert lines[1].startswith("7,2,ATT1,")
