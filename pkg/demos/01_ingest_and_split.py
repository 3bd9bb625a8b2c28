"""Load a mixed-type CSV, look at the inferred schema, then split it.

Run from the repository root:  python3 demos/01_ingest_and_split.py
"""
from entgrove import class_manifest, load_csv, stratified_split
from entgrove.synthetic import bundled_csv

table = load_csv(bundled_csv(), label_column="class")
print(f"{len(table)} rows kept, {table.dropped_row_count} dropped")
for col in table.schema:
    extra = f" categories={list(col.observed_categories)}" if col.observed_categories else ""
    print(f"  {col.name:<14} {col.kind:<12} missing={col.missing_count}{extra}")

# Same seed, same split: the indices come from an in-repo SplitMix64 stream,
# so they do not depend on the numpy or Python version.
split = stratified_split(table, train_fraction=0.75, seed=0)
again = stratified_split(table, train_fraction=0.75, seed=0)
assert split.train_indices == again.train_indices
print(f"train {len(split.train_indices)} / validation {len(split.validation_indices)}")

print(class_manifest(table.subset(split.train_indices)).to_json())
