import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entgrove.dataset import CATEGORICAL, NUMERIC, DatasetError, DatasetTable
from entgrove.preprocess import apply_plan, fit_plan
from entgrove.tree import (Internal, Leaf, TrainConfig, TrainedModel, accuracy_on, best_split, count_nodes,
                           find_leaf, induce_tree, predict_label, predict_proba, prune_reduced_error,
                           tree_depth)

import oracles
from conftest import make_table


def test_best_split_threshold():
    s = best_split(np.array([[1.0], [2.0], [3.0], [4.0]]), list("AABB"), [NUMERIC], "gain")
    assert s.threshold == 2.5 and s.score == 1.0 and s.feature_index == 0


def test_best_split_pure_labels_is_none():
    assert best_split(np.array([[1.0], [2.0], [3.0]]), list("AAA"), [NUMERIC]) is None


def test_best_split_prefers_label_identical_feature():
    X = np.array([[5.0, 0.0], [5.0, 1.0], [5.0, 0.0], [5.0, 1.0]])
    s = best_split(X, list("ABAB"), [NUMERIC, NUMERIC], features=["const", "ident"])
    assert s.feature == "ident"


def test_best_split_tie_prefers_earlier_feature_then_lower_threshold():
    X = np.array([[0.0, 0.0], [1.0, 1.0]])
    s = best_split(X, list("AB"), [NUMERIC, NUMERIC], "gain")
    assert s.feature_index == 0
    # symmetric column: thresholds 1.5 and 2.5 score the same
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    s = best_split(X, list("ABBA"), [NUMERIC], "gain")
    assert s.threshold == 1.5


def test_best_split_min_gain():
    X = np.array([[0.0], [0.0], [1.0], [1.0]])
    labels = list("AABA")
    assert best_split(X, labels, [NUMERIC], "gain", min_gain=0.9) is None
    assert best_split(X, labels, [NUMERIC], "gain", min_gain=0.1) is not None


def test_zero_gain_split_allowed_when_min_gain_is_zero():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    s = best_split(X, list("ABBA"), [NUMERIC, NUMERIC], "gain")
    assert s is not None and s.score == 0.0 and s.feature_index == 0


@pytest.mark.parametrize("criterion", ["gain", "gain_ratio"])
@pytest.mark.parametrize("kind", [NUMERIC, CATEGORICAL])
def test_best_split_oracle_small_sweep(criterion, kind):
    # every dataset of 2-5 rows over <= 2 binary features (multisets of rows)
    checked = 0
    for d in (1, 2):
        items = [(bits, y) for bits in itertools.product((0, 1), repeat=d) for y in "AB"]
        for size in range(2, 6):
            for combo in itertools.combinations_with_replacement(items, size):
                rows = [c[0] for c in combo]
                labels = [c[1] for c in combo]
                got = best_split(np.array(rows, float), labels, [kind] * d, criterion)
                expected = oracles.brute_best_split(rows, labels, [kind] * d, criterion)
                assert (None if got is None else (got.feature_index, got.threshold)) == expected
                checked += 1
    assert checked > 1000


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 2), st.sampled_from("ABC")),
                min_size=2, max_size=12),
       st.sampled_from(["gain", "gain_ratio"]))
def test_best_split_oracle_multivalued(rows, criterion):
    X = [(float(a), float(b)) for a, b, _ in rows]
    labels = [y for _, _, y in rows]
    kinds = [NUMERIC, CATEGORICAL]
    got = best_split(np.array(X), labels, kinds, criterion)
    expected = oracles.brute_best_split(X, labels, kinds, criterion)
    assert (None if got is None else (got.feature_index, got.threshold)) == expected


def test_xor_needs_depth_two():
    t = make_table({"a": [0.0, 0.0, 1.0, 1.0], "b": [0.0, 1.0, 0.0, 1.0]}, list("ABBA"))
    m = induce_tree(t, TrainConfig(criterion="gain"))
    assert tree_depth(m.root) == 2
    assert accuracy_on(m, m.matrix(t), t.labels()) == 1.0
    shallow = induce_tree(t, TrainConfig(criterion="gain", max_depth=1))
    assert accuracy_on(shallow, shallow.matrix(t), t.labels()) < 1.0


def test_single_class_gives_single_leaf():
    m = induce_tree(make_table({"a": [1.0, 2.0, 3.0]}, ["Normal"] * 3))
    assert isinstance(m.root, Leaf) and m.root.majority == "Normal"
    assert predict_label(m, {"a": 7.0}) == "Normal"


def _consistent_random_table(rng: random.Random, n_rows: int, n_num: int, n_cat: int, n_classes: int):
    cols = {}
    for j in range(n_num):
        cols[f"n{j}"] = [round(rng.uniform(-10, 10), rng.choice([0, 1, 2])) for _ in range(n_rows)]
    for j in range(n_cat):
        cols[f"c{j}"] = [rng.choice("pqrst"[: rng.randint(2, 5)]) for _ in range(n_rows)]
    labels = [f"k{rng.randrange(n_classes)}" for _ in range(n_rows)]
    raw = make_table(cols, labels, kinds={f"c{j}": CATEGORICAL for j in range(n_cat)})
    plan = fit_plan(raw)
    t = apply_plan(plan, raw)
    # relabel duplicates in the transformed space so the table is consistent
    first = {}
    rows = []
    for r in t.rows:
        y = first.setdefault(r[:-1], r[-1])
        rows.append(r[:-1] + (y,))
    return DatasetTable(t.schema, tuple(rows)), plan


@pytest.mark.parametrize("seed", range(10))
def test_unlimited_tree_fits_consistent_data(seed):
    rng = random.Random(seed)
    t, plan = _consistent_random_table(rng, 50, 2, 2, 3)
    for criterion in ("gain", "gain_ratio"):
        m = induce_tree(t, TrainConfig(criterion=criterion), plan)
        assert accuracy_on(m, m.matrix(t), t.labels()) == 1.0


def test_stopping_rules():
    rng = random.Random(0)
    t, _ = _consistent_random_table(rng, 80, 3, 1, 3)
    assert tree_depth(induce_tree(t, TrainConfig(max_depth=2)).root) <= 2
    big = induce_tree(t, TrainConfig(min_samples_split=40))
    full = induce_tree(t)
    assert count_nodes(big.root) < count_nodes(full.root)


def test_empty_partition_leaf_inherits_parent_counts():
    # category "c" exists in the training domain but never at the split node
    t = make_table({"p": [0, 0, 1, 1, 2], "x": [0.0, 0.0, 0.0, 0.0, 5.0]}, list("ABBAA"),
                   kinds={"p": CATEGORICAL})
    sub = t.subset(range(4))
    m = induce_tree(sub, TrainConfig(criterion="gain"), selected_features=["p"])
    # domain from schema has three categories; only 0 and 1 occur in training rows
    assert isinstance(m.root, Internal)
    assert len(m.root.children) == 3
    empty = m.root.children[2]
    assert isinstance(empty, Leaf) and empty.class_counts == m.root.class_counts
    assert empty.n_samples == 0


def test_predict_proba_and_label():
    leaf_ab = Leaf({"A": 3, "B": 1})
    root = Internal("x", 0, (leaf_ab, Leaf({"A": 5})), {"A": 8, "B": 1}, threshold=0.5)
    m = TrainedModel(root, TrainConfig(), ("x",), (NUMERIC,), ("A", "B"), None)
    assert predict_proba(m, {"x": 0.2}).tolist() == [0.75, 0.25]
    assert predict_proba(m, [0.9]).tolist() == [1.0, 0.0]
    # boundary value goes left
    assert find_leaf(root, [0.5]) is leaf_ab
    assert predict_label(m, [0.2]) == "A"
    tie = TrainedModel(Leaf({"B": 2, "A": 2}), TrainConfig(), ("x",), (NUMERIC,), ("A", "B"), None)
    assert predict_proba(tie, [0.0]).tolist() == [0.5, 0.5]
    assert predict_label(tie, [0.0]) == "A"
    assert abs(predict_proba(m, [0.1]).sum() - 1.0) <= 1e-12


def test_missing_value_follows_heavier_child():
    root = Internal("x", 0, (Leaf({"A": 1}), Leaf({"B": 4})), {"A": 1, "B": 4}, threshold=0.5)
    m = TrainedModel(root, TrainConfig(), ("x",), (NUMERIC,), ("A", "B"), None)
    assert predict_label(m, [None]) == "B"
    assert predict_label(m, [float("nan")]) == "B"
    even = Internal("x", 0, (Leaf({"A": 2}), Leaf({"B": 2})), {"A": 2, "B": 2}, threshold=0.5)
    assert find_leaf(even, [None]).majority == "A"
    cat = Internal("p", 0, (Leaf({"A": 1}), Leaf({"B": 3})), {"A": 1, "B": 3}, categories=((0,), (1,)))
    assert find_leaf(cat, [7]).majority == "B"


def test_predict_schema_mismatch():
    m = induce_tree(make_table({"a": [0.0, 1.0]}, list("AB")))
    with pytest.raises(ValueError):
        predict_proba(m, {"b": 1.0})
    with pytest.raises(ValueError):
        predict_proba(m, [1.0, 2.0])


def test_induce_errors():
    t = make_table({"a": [0.0]}, ["A"])
    with pytest.raises(DatasetError):
        induce_tree(t.subset([]))
    with pytest.raises(DatasetError):
        induce_tree(make_table({"a": [None, 1.0]}, list("AB"), kinds={"a": NUMERIC}))
    with pytest.raises(ValueError):
        TrainConfig(criterion="gini")
    with pytest.raises(ValueError):
        TrainConfig(min_samples_split=1)


def test_determinism():
    rng = random.Random(3)
    t, plan = _consistent_random_table(rng, 120, 3, 2, 4)
    assert induce_tree(t, TrainConfig(), plan) == induce_tree(t, TrainConfig(), plan)


def _paths_consistent(node, bounds=None) -> bool:
    bounds = bounds or {}
    if isinstance(node, Leaf):
        return True
    if node.threshold is None:
        return all(_paths_consistent(c, bounds) for c in node.children)
    lo, hi = bounds.get(node.feature, (-np.inf, np.inf))
    if not lo <= node.threshold < hi:
        return False
    left = dict(bounds, **{node.feature: (lo, node.threshold)})
    right = dict(bounds, **{node.feature: (node.threshold, hi)})
    return _paths_consistent(node.children[0], left) and _paths_consistent(node.children[1], right)


@pytest.mark.parametrize("seed", range(5))
def test_thresholds_respect_ancestor_bounds(seed):
    t, _ = _consistent_random_table(random.Random(seed), 150, 4, 0, 3)
    assert _paths_consistent(induce_tree(t).root)


def _noisy(rng: np.random.Generator, n: int, flip: float):
    X = rng.random((n, 3))
    y = np.where(X[:, 0] + 0.5 * X[:, 1] > 0.75, "B", "A")
    flips = rng.random(n) < flip
    y = np.where(flips, np.where(y == "A", "B", "A"), y)
    return make_table({"a": X[:, 0].tolist(), "b": X[:, 1].tolist(), "c": X[:, 2].tolist()}, y.tolist())


def test_pruning_shrinks_noisy_tree():
    rng = np.random.default_rng(11)
    train, held = _noisy(rng, 200, 0.1), _noisy(rng, 200, 0.1)
    m = induce_tree(train)
    p = prune_reduced_error(m, held)
    assert count_nodes(p.root) < count_nodes(m.root)
    assert accuracy_on(p, p.matrix(held), held.labels()) >= accuracy_on(m, m.matrix(held), held.labels())


def test_pruning_collapses_agreeing_subtree_and_keeps_perfect_model():
    root = Internal("x", 0, (Leaf({"A": 3}), Leaf({"A": 1, "B": 1})), {"A": 4, "B": 1}, threshold=0.5)
    m = TrainedModel(root, TrainConfig(), ("x",), (NUMERIC,), ("A", "B"), None)
    held = make_table({"x": [0.1, 0.9]}, ["A", "A"])
    p = prune_reduced_error(m, held)
    assert isinstance(p.root, Leaf) and p.root.class_counts == {"A": 4, "B": 1}

    t = make_table({"x": [0.0, 1.0, 2.0, 3.0]}, list("AABB"))
    m = induce_tree(t)
    p = prune_reduced_error(m, t)
    X = m.matrix(t)
    assert [predict_label(p, x) for x in X] == [predict_label(m, x) for x in X]


def test_pruning_empty_set_errors():
    m = induce_tree(make_table({"x": [0.0, 1.0]}, list("AB")))
    with pytest.raises(DatasetError):
        prune_reduced_error(m, make_table({"x": [0.0]}, ["A"]).subset([]))
