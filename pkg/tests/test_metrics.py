"""AP, mAP, PR curves and the best-F1 sweep against exact oracles."""

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from relfilter.errors import UndefinedMetricError, ValidationError
from relfilter.metrics import (
    RankedList,
    average_precision,
    best_f1,
    mean_ap,
    pr_curve,
)


def ranking_of(flags):
    """RankedList and relevant-id set from a 0/1 relevance sequence."""
    entries = tuple((f"i{k}", float(len(flags) - k)) for k in range(len(flags)))
    relevant = {f"i{k}" for k, f in enumerate(flags) if f}
    return RankedList(entries=entries), relevant


# ----------------------------------------------------------- worked examples


def test_ap_of_101_is_five_sixths():
    ranking, relevant = ranking_of([1, 0, 1])
    assert abs(average_precision(ranking, relevant) - 5 / 6) < 1e-12


def test_ap_of_01_is_half():
    ranking, relevant = ranking_of([0, 1])
    assert abs(average_precision(ranking, relevant) - 0.5) < 1e-12


def test_perfect_ranking_has_ap_one():
    ranking, relevant = ranking_of([1, 1, 1, 0, 0])
    assert average_precision(ranking, relevant) == 1.0


def test_ap_undefined_without_relevant_items():
    ranking, _ = ranking_of([0, 0, 0])
    with pytest.raises(UndefinedMetricError):
        average_precision(ranking, {"zzz"})


def test_map_of_harz_style_row():
    aps = {"flooding": 0.864, "depth": 0.711, "pollution": 0.096}
    assert abs(mean_ap(aps) * 100 - 55.7) <= 0.05


def test_map_of_flood2013_style_row():
    aps = {"flooding": 0.921, "depth": 0.778, "pollution": 0.904}
    assert abs(mean_ap(aps) * 100 - 86.8) <= 0.05


def test_map_of_single_objective_is_that_ap():
    assert mean_ap({"flooding": 0.5}) == 0.5


def test_pr_points_of_101():
    ranking, relevant = ranking_of([1, 0, 1])
    points = pr_curve(ranking, relevant).points
    expected = [(0.5, 1.0), (0.5, 0.5), (1.0, 2 / 3)]
    assert len(points) == 3
    for (r, p), (er, ep) in zip(points, expected):
        assert abs(r - er) < 1e-12 and abs(p - ep) < 1e-12


def test_perfect_ranking_precision_constant_one():
    ranking, relevant = ranking_of([1, 1, 1, 1])
    assert all(p == 1.0 for _, p in pr_curve(ranking, relevant).points)


def test_best_f1_worked_example():
    scores = {"a": 0.9, "b": 0.8, "c": 0.3}
    labels = {"a": True, "b": False, "c": True}
    theta, f1, precision, recall = best_f1(scores, labels)
    assert theta == 0.3
    assert abs(f1 - 0.8) < 1e-12
    assert abs(precision - 2 / 3) < 1e-12
    assert recall == 1.0


def test_best_f1_all_positive():
    scores = {"a": 0.2, "b": 0.7}
    labels = {"a": True, "b": True}
    theta, f1, _, _ = best_f1(scores, labels)
    assert theta == 0.2
    assert f1 == 1.0


def test_best_f1_requires_positives_and_labels():
    with pytest.raises(UndefinedMetricError):
        best_f1({"a": 0.5}, {"a": False})
    with pytest.raises(ValidationError):
        best_f1({"a": 0.5, "b": 0.1}, {"a": True})


# ------------------------------------------------------------ oracle battery


def random_instance(rand, n):
    ids = [f"i{k}" for k in range(n)]
    scores = {}
    for i in ids:
        # coarse grid on purpose: collisions exercise the tie handling
        scores[i] = rand.choice([k / 8 for k in range(9)])
    labels = {i: rand.random() < 0.45 for i in ids}
    return scores, labels


def test_ap_matches_fraction_oracle_on_500_instances():
    import random
    rand = random.Random(1001)
    checked = 0
    for _ in range(500):
        n = rand.randint(1, 12)
        scores, labels = random_instance(rand, n)
        relevant = {i for i, l in labels.items() if l}
        ranking = RankedList.from_scores(scores)
        if not (relevant & set(ranking.ids())):
            with pytest.raises(UndefinedMetricError):
                average_precision(ranking, relevant)
            continue
        want = oracles.ap_exact(ranking.ids(), relevant)
        got = average_precision(ranking, relevant)
        assert abs(got - float(want)) <= 1e-12
        checked += 1
    assert checked > 300


def test_best_f1_matches_fraction_oracle_on_500_instances():
    import random
    rand = random.Random(2002)
    checked = 0
    for _ in range(500):
        n = rand.randint(1, 12)
        scores, labels = random_instance(rand, n)
        if not any(labels.values()):
            with pytest.raises(UndefinedMetricError):
                best_f1(scores, labels)
            continue
        want = oracles.best_f1_exact(scores, labels)
        got = best_f1(scores, labels)
        assert got[0] == want[0]
        assert abs(got[1] - float(want[1])) <= 1e-12
        assert abs(got[2] - float(want[2])) <= 1e-12
        assert abs(got[3] - float(want[3])) <= 1e-12
        checked += 1
    assert checked > 300


def test_pr_area_identity_with_ap_bitwise():
    import random
    rand = random.Random(3003)
    for _ in range(200):
        n = rand.randint(1, 30)
        scores, labels = random_instance(rand, n)
        relevant = {i for i, l in labels.items() if l}
        ranking = RankedList.from_scores(scores)
        if not (relevant & set(ranking.ids())):
            continue
        curve = pr_curve(ranking, relevant)
        assert curve.area() == average_precision(ranking, relevant)


def test_pr_points_match_fraction_oracle():
    import random
    rand = random.Random(4004)
    for _ in range(100):
        n = rand.randint(1, 15)
        scores, labels = random_instance(rand, n)
        relevant = {i for i, l in labels.items() if l}
        ranking = RankedList.from_scores(scores)
        if not (relevant & set(ranking.ids())):
            continue
        got = pr_curve(ranking, relevant).points
        want = oracles.pr_points_exact(ranking.ids(), relevant)
        for (gr, gp), (wr, wp) in zip(got, want):
            assert abs(gr - float(wr)) <= 1e-12
            assert abs(gp - float(wp)) <= 1e-12


# ----------------------------------------------------------------- properties


@given(st.lists(st.booleans(), min_size=1, max_size=10).filter(any),
       st.floats(0.01, 10.0), st.floats(-5.0, 5.0))
def test_ap_invariant_under_increasing_transforms(flags, scale, shift):
    ranking, relevant = ranking_of(flags)
    transformed = RankedList(entries=tuple(
        (i, scale * s + shift) for i, s in ranking.entries))
    assert (average_precision(transformed, relevant)
            == average_precision(ranking, relevant))


@given(st.lists(st.booleans(), min_size=1, max_size=8).filter(any))
def test_ap_bounds_and_reversed_minimality(flags):
    ranking, relevant = ranking_of(flags)
    ap = average_precision(ranking, relevant)
    assert 0.0 <= ap <= 1.0
    if len(flags) <= 8:
        worst = oracles.ap_of_relevance(sorted(flags))  # relevant last
        all_aps = [oracles.ap_of_relevance(p)
                   for p in set(itertools.permutations(flags))]
        assert worst == min(all_aps)


def test_best_f1_dominates_every_threshold():
    import random
    rand = random.Random(5005)
    for _ in range(100):
        n = rand.randint(2, 12)
        scores, labels = random_instance(rand, n)
        if not any(labels.values()):
            continue
        _, best, _, _ = best_f1(scores, labels)
        n_pos = sum(labels.values())
        for theta in set(scores.values()):
            accepted = [i for i, s in scores.items() if s >= theta]
            tp = sum(1 for i in accepted if labels[i])
            f1_here = 2 * tp / (len(accepted) + n_pos)
            assert best >= f1_here - 1e-15


def test_ranked_list_rejects_disorder_and_duplicates():
    with pytest.raises(ValidationError):
        RankedList(entries=(("a", 0.1), ("b", 0.9)))
    with pytest.raises(ValidationError):
        RankedList(entries=(("a", 0.9), ("a", 0.8)))


def test_from_scores_breaks_ties_by_id():
    ranking = RankedList.from_scores({"b": 0.5, "a": 0.5, "c": 0.9})
    assert ranking.ids() == ["c", "a", "b"]


def test_mean_ap_empty_undefined():
    with pytest.raises(UndefinedMetricError):
        mean_ap({})


# ------------------------------------------------------------ tie-average AP


def test_tie_averaged_ap_matches_permutation_enumeration():
    import random
    rand = random.Random(6006)
    for _ in range(60):
        n = rand.randint(2, 7)
        scores = {f"i{k}": rand.choice([0.2, 0.5, 0.8]) for k in range(n)}
        labels = {i: rand.random() < 0.5 for i in scores}
        relevant = {i for i, l in labels.items() if l}
        ranking = RankedList.from_scores(scores)
        if not (relevant & set(ranking.ids())):
            continue
        want = oracles.tie_averaged_ap_exact(ranking.entries, relevant)
        got = average_precision(ranking, relevant, tie_average=True)
        assert abs(got - float(want)) <= 1e-10


def test_tie_average_equals_plain_ap_without_ties():
    ranking = RankedList.from_scores({"a": 0.9, "b": 0.7, "c": 0.5})
    relevant = {"a", "c"}
    assert (average_precision(ranking, relevant, tie_average=True)
            == pytest.approx(average_precision(ranking, relevant), abs=1e-12))
