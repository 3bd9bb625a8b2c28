"""Fit preprocessing on the training rows only, then rank features by entropy.

Run from the repository root:  python3 demos/02_preprocess_and_select.py
"""
from entgrove import SelectionPolicy, apply_plan, fit_plan, load_csv, rank_and_select, stratified_split
from entgrove.synthetic import bundled_csv

table = load_csv(bundled_csv(), label_column="class")
split = stratified_split(table, seed=0)
train = table.subset(split.train_indices)

plan = fit_plan(train)
for name, p in plan.numeric.items():
    print(f"{name:<14} min={p.min:.3f} max={p.max:.3f} impute={p.impute_value:.3f}")
for name, p in plan.categorical.items():
    print(f"{name:<14} categories={list(p.categories)} impute={p.impute_token}")

prepared = apply_plan(plan, train)
report = rank_and_select(prepared, SelectionPolicy.parse("top-k=3"), rank_by="gain")
for s in report.scores:
    mark = "*" if s.feature in report.selected else " "
    print(f"{mark} {s.feature:<14} gain={s.information_gain:.4f} ratio={s.gain_ratio:.4f}")

# The pure-noise column should not make the cut.
assert "noise" not in report.selected
