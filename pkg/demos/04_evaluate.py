"""Score a model with one-vs-rest rates, cross-entropy and per-sample latency.

Run from the repository root:  python3 demos/04_evaluate.py
"""
import numpy as np

from entgrove import (TrainConfig, apply_plan, confusion, cross_entropy_loss, fit_plan, induce_tree,
                      load_csv, measure_apt, metrics_from_confusion, predict_many, render_report,
                      stratified_split)
from entgrove.synthetic import bundled_csv

table = load_csv(bundled_csv(), label_column="class")
split = stratified_split(table, seed=0)
train, valid = table.subset(split.train_indices), table.subset(split.validation_indices)
plan = fit_plan(train)
model = induce_tree(apply_plan(plan, train), TrainConfig(), plan)

X = model.matrix(model.transform(valid))
truth = valid.labels()
predicted, probas = predict_many(model, X)
cm = confusion(truth, predicted, model.class_order)
print("confusion (rows = truth):")
print(np.array2string(cm.counts))

report = metrics_from_confusion(cm, loss=cross_entropy_loss(probas, truth, model.class_order),
                                apt_ms=measure_apt(model, X, repetitions=20))
for name, r in report.per_class.items():
    print(f"  {name:<10} P={r.precision:.3f} R={r.recall:.3f} Spec={r.specificity:.3f} F1={r.f1:.3f}")

# Leaf probabilities are class frequencies, so a confidently wrong leaf costs
# -ln(1e-12) ~ 27.6 nats for that row.
text, _ = render_report(report, reference=True)
print(text)
