"""Near-duplicate discovery and representative selection."""

import numpy as np
import pytest

import oracles
from conftest import unit_rows
from relfilter.dedup import DuplicatePair, deduplicate, find_near_duplicates
from relfilter.errors import EmptyDatasetError, ParameterError, ValidationError
from relfilter.features import FeatureStore


def store_of(ids, rows):
    return FeatureStore.from_arrays(ids, np.asarray(rows))


def test_identical_vectors_pair_at_similarity_one():
    store = store_of(["a", "b"], [[0.6, 0.8], [0.6, 0.8]])
    pairs = find_near_duplicates(store, 0.95)
    assert len(pairs) == 1
    assert (pairs[0].id_a, pairs[0].id_b) == ("a", "b")
    assert pairs[0].similarity == 1.0


def test_orthogonal_vectors_find_nothing():
    store = store_of(["a", "b"], [[1.0, 0.0], [0.0, 1.0]])
    assert find_near_duplicates(store, 0.95) == []


def test_matches_bruteforce_on_50_random_unit_vectors(rng):
    ids = [f"v{i:02d}" for i in range(50)]
    store = store_of(ids, unit_rows(rng, 50, 6))
    got = [(p.id_a, p.id_b, p.similarity)
           for p in find_near_duplicates(store, 0.9)]
    # the oracle sees the store's own (float32-quantized) rows
    want = oracles.duplicate_pairs_exact(ids, store.matrix64(), 0.9)
    assert [(a, b) for a, b, _ in got] == [(a, b) for a, b, _ in want]
    for (_, _, gs), (_, _, ws) in zip(got, want):
        assert gs == pytest.approx(ws, abs=1e-12)


def test_pairs_sorted_by_similarity_then_ids(rng):
    base = unit_rows(rng, 1, 5)[0]
    jitter = [base]
    for eps in (1e-4, 3e-4, 2e-4):
        v = base + eps * unit_rows(rng, 1, 5)[0]
        jitter.append(v / np.linalg.norm(v))
    store = store_of(["d", "c", "b", "a"], np.stack(jitter))
    pairs = find_near_duplicates(store, 0.9)
    sims = [p.similarity for p in pairs]
    assert sims == sorted(sims, reverse=True)
    for p in pairs:
        assert p.id_a < p.id_b


def test_threshold_validation(small_store):
    for bad in (0.0, -0.5, 1.0001):
        with pytest.raises(ParameterError):
            find_near_duplicates(small_store, bad)
    with pytest.raises(EmptyDatasetError):
        find_near_duplicates(FeatureStore(dim=3), 0.9)


def test_duplicate_pair_normalizes_order():
    with pytest.raises(ValidationError):
        DuplicatePair(id_a="b", id_b="a", similarity=0.99)
    with pytest.raises(ValidationError):
        DuplicatePair(id_a="a", id_b="a", similarity=0.99)


# ------------------------------------------------------------ deduplication


def pair(a, b):
    return DuplicatePair(id_a=a, id_b=b, similarity=0.99)


def store_with_ids(ids, rng):
    return store_of(list(ids), unit_rows(rng, len(ids), 4))


def test_chain_closure_keeps_component_minimum(rng):
    store = store_with_ids("abcd", rng)
    kept = deduplicate(store, [pair("a", "b"), pair("b", "c")])
    assert kept == {"a", "d"}


def test_empty_pair_list_keeps_everything(rng):
    store = store_with_ids("abc", rng)
    assert deduplicate(store, []) == {"a", "b", "c"}


def test_deduplicate_idempotent(rng):
    store = store_with_ids("abc", rng)
    pairs = [pair("a", "b")]
    once = deduplicate(store, pairs)
    assert once == deduplicate(store, pairs)
    assert once == {"a", "c"}


def test_unknown_pair_id_rejected(rng):
    store = store_with_ids("ab", rng)
    with pytest.raises(ValidationError):
        deduplicate(store, [pair("a", "zz")])


def test_matches_component_oracle_on_random_graphs(rng):
    import random
    rand = random.Random(77)
    for _ in range(50):
        n = rand.randint(2, 15)
        ids = [f"n{k:02d}" for k in range(n)]
        store = store_with_ids(ids, rng)
        pairs = []
        seen = set()
        for _ in range(rand.randint(0, n * 2)):
            a, b = rand.sample(ids, 2)
            a, b = min(a, b), max(a, b)
            if (a, b) not in seen:
                seen.add((a, b))
                pairs.append(pair(a, b))
        kept = deduplicate(store, pairs)
        want = oracles.kept_after_dedup_exact(ids, [(p.id_a, p.id_b)
                                                    for p in pairs])
        assert kept == want


def test_rerun_on_survivors_is_stable(rng):
    """Removing duplicates must not create new duplicate pairs."""
    rows = unit_rows(rng, 30, 5)
    # plant two tight clusters
    rows[5] = rows[3] + 1e-5
    rows[9] = rows[3] - 1e-5
    rows[20] = rows[18] + 1e-5
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    ids = [f"v{i:02d}" for i in range(30)]
    store = store_of(ids, rows)

    pairs = find_near_duplicates(store, 0.95)
    kept = deduplicate(store, pairs)
    survivors = store.subset(sorted(kept))
    before = {(p.id_a, p.id_b) for p in pairs}
    for p in find_near_duplicates(survivors, 0.95):
        assert (p.id_a, p.id_b) in before
