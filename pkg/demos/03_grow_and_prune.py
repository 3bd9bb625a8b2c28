"""Grow a tree on the classic weather table, then prune one on noisy data.

Run from the repository root:  python3 demos/03_grow_and_prune.py
"""
import random

from entgrove import TrainConfig, apply_plan, fit_plan, induce_tree, prune_reduced_error, stratified_split
from entgrove.dataset import CATEGORICAL, LABEL, NUMERIC, ColumnSchema, DatasetTable
from entgrove.features import entropy, information_gain
from entgrove.tree import Internal, accuracy_on, count_nodes


def show(node, names, depth=0):
    pad = "  " * depth
    if not isinstance(node, Internal):
        print(f"{pad}-> {node.majority} {dict(node.class_counts)}")
        return
    for i, child in enumerate(node.children):
        if node.threshold is not None:
            test = f"<= {node.threshold:.3f}" if i == 0 else f"> {node.threshold:.3f}"
        else:
            test = "= " + "/".join(names.get(node.feature, {}).get(c, str(c)) for c in node.categories[i])
        print(f"{pad}{node.feature} {test}")
        show(child, names, depth + 1)


weather = [
    ("sunny", "high", "weak", "no"), ("sunny", "high", "strong", "no"), ("overcast", "high", "weak", "yes"),
    ("rain", "high", "weak", "yes"), ("rain", "normal", "weak", "yes"), ("rain", "normal", "strong", "no"),
    ("overcast", "normal", "strong", "yes"), ("sunny", "high", "weak", "no"), ("sunny", "normal", "weak", "yes"),
    ("rain", "normal", "weak", "yes"), ("sunny", "normal", "strong", "yes"), ("overcast", "high", "strong", "yes"),
    ("overcast", "normal", "weak", "yes"), ("rain", "high", "strong", "no"),
]
labels = [r[-1] for r in weather]
print(f"H(play) = {entropy(labels):.6f}")
print(f"gain(outlook) = {information_gain([r[0] for r in weather], labels, CATEGORICAL).information_gain:.6f}")

cols = ("outlook", "humidity", "wind")
schema = tuple(ColumnSchema(c, CATEGORICAL, tuple(dict.fromkeys(r[i] for r in weather)))
               for i, c in enumerate(cols)) + (ColumnSchema("play", LABEL),)
raw = DatasetTable(schema, tuple(weather))
plan = fit_plan(raw)
model = induce_tree(apply_plan(plan, raw), TrainConfig(criterion="gain"), plan)
names = {c: dict(enumerate(plan.categorical[c].categories)) for c in cols}
show(model.root, names)

# Reduced-error pruning: grow on noisy labels, prune against held-out rows.
rng = random.Random(0)
rows = []
for _ in range(300):
    x = rng.uniform(0, 10)
    y = "hi" if x > 5 else "lo"
    rows.append((x, y if rng.random() > 0.2 else rng.choice(["hi", "lo"])))
table = DatasetTable((ColumnSchema("x", NUMERIC), ColumnSchema("y", LABEL)), tuple(rows))
split = stratified_split(table, 0.7, seed=1)
grow, held = table.subset(split.train_indices), table.subset(split.validation_indices)
full = induce_tree(grow, TrainConfig())
pruned = prune_reduced_error(full, held)
X, truth = full.matrix(held), held.labels()
print(f"full tree  : {count_nodes(full.root):3d} nodes, held-out accuracy {accuracy_on(full, X, truth):.3f}")
print(f"pruned tree: {count_nodes(pruned.root):3d} nodes, held-out accuracy {accuracy_on(pruned, X, truth):.3f}")
