import math

import pytest

from byzagg import (
    CapacityError,
    ConfigError,
    binom,
    brute_force_cmax,
    c_aspis_att1,
    c_baseline,
    c_detox,
    cmax_aspis_att2,
    count_distorted_files,
    distortion_reports,
    emit_tables,
    round_half_up,
)


def test_cmax_att2_closed_form():
    assert [cmax_aspis_att2(15, 3, q) for q in range(2, 8)] == [2, 10, 28, 60, 110, 182]
    assert cmax_aspis_att2(15, 3, 1) == 0   # C(2,3) = 0


def test_binom_2q_r_is_even_for_odd_r():
    for r in (3, 5, 7):
        for q in range(1, 21):
            assert binom(2 * q, r) % 2 == 0


def test_c_att1_closed_form():
    assert c_aspis_att1(3, 2) == 0
    assert c_aspis_att1(3, 3) == 1
    assert c_aspis_att1(3, 7) == math.comb(7, 3)


def test_c_detox_closed_forms():
    assert [c_detox(15, 3, q, "optimal") for q in range(2, 8)] == [1, 1, 2, 2, 3, 3]
    assert [c_detox(15, 3, q, "weak") for q in range(2, 8)] == [0, 0, 0, 0, 1, 2]
    with pytest.raises(ConfigError):
        c_detox(15, 3, 2, "nope")


def test_c_baseline():
    assert c_baseline(15, 4) == 4


def test_brute_force_common_matches_closed_form():
    assert brute_force_cmax(7, 3, 3, strategy="common") == 10
    assert brute_force_cmax(8, 3, 2, strategy="common") == 2


def test_brute_force_sampled_never_exceeds():
    for K, q in ((7, 3), (9, 4)):
        sampled = brute_force_cmax(K, 3, q, strategy="sampled", samples=500, seed=1)
        assert sampled <= cmax_aspis_att2(K, 3, q)


def test_brute_force_capacity_limit():
    with pytest.raises(CapacityError):
        brute_force_cmax(13, 3, 4)


def test_brute_force_rejects_unknown_strategy():
    with pytest.raises(ConfigError):
        brute_force_cmax(7, 3, 2, strategy="greedy")


def test_count_distorted_files_hand_case():
    sets = {j: (3, 4, 5) for j in (0, 1, 2)}
    assert count_distorted_files(7, 3, (0, 1, 2), sets) == 10


def _recount(k, r, adv, sets):
    # raw recount: a file flips when some majority-sized sub-coalition A'
    # of its adversarial members covers every other file member (honest or
    # passive adversary) with each active member's disagreement set
    import itertools
    total = 0
    for file in itertools.combinations(range(k), r):
        inside = [j for j in file if j in adv]
        hit = False
        for size in range((r + 1) // 2, len(inside) + 1):
            for active in itertools.combinations(inside, size):
                others = [x for x in file if x not in active]
                if all(x in sets[j] for j in active for x in others):
                    hit = True
        total += hit
    return total


def test_count_distorted_files_independent_recount():
    adv = (0, 1, 2)
    sets = {0: (3, 4), 1: (3, 5), 2: (4, 5)}
    assert count_distorted_files(7, 3, adv, sets) == _recount(7, 3, adv, sets)


def test_count_distorted_files_passive_adversary_in_d_sets():
    # worker 2 stays passive; 0 and 1 list it as a tolerated disagreement,
    # so {0,1,2}, {0,1,3}, and {0,1,4} flip and nothing else does
    adv = (0, 1, 2)
    sets = {0: (2, 3, 4), 1: (2, 3, 4), 2: ()}
    got = count_distorted_files(7, 3, adv, sets)
    assert got == _recount(7, 3, adv, sets) == 3


def test_round_half_up_differs_from_bankers():
    assert round_half_up(0.0625, 3) == 0.063
    assert round(0.0625, 3) == 0.062
    assert round_half_up(2.675, 2) == 2.68
    assert round_half_up(0.4, 3) == 0.4


def test_epsilon_monotone_in_q():
    reports = distortion_reports(15, 3, list(range(2, 8)))
    by_key = {}
    for rep in reports:
        by_key.setdefault((rep.scheme, rep.attack), []).append(rep.epsilon)
    for values in by_key.values():
        assert values == sorted(values)


def test_distortion_reports_spot_values():
    reports = {(rep.scheme, rep.attack, rep.q): rep
               for rep in distortion_reports(15, 3, [4])}
    assert round_half_up(reports[("aspis", "optimal", 4)].epsilon) == 0.062
    assert round_half_up(reports[("aspis", "weak", 4)].epsilon) == 0.009
    assert round_half_up(reports[("baseline", "optimal", 4)].epsilon) == 0.267
    assert round_half_up(reports[("detox", "optimal", 4)].epsilon) == 0.4
    assert round_half_up(reports[("detox", "weak", 4)].epsilon) == 0.0
    assert reports[("aspis", "optimal", 4)].f == 455
    assert reports[("detox", "optimal", 4)].f == 5


def test_emit_tables_format():
    csv_text = emit_tables(distortion_reports(15, 3, [2]))
    lines = csv_text.strip().splitlines()
    assert lines[0] == "scheme,attack,K,r,q,f,c,epsilon"
    assert "aspis,optimal,15,3,2,455,2,0.004" in lines
    for line in lines[1:]:
        assert len(line.split(",")[-1].split(".")[-1]) == 3
