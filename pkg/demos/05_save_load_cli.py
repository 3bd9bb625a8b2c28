"""Save a model, verify it on reload, then drive the same pipeline via the CLI.

Run from the repository root:  python3 demos/05_save_load_cli.py
"""
import json
import tempfile
from pathlib import Path

from entgrove import TrainConfig, apply_plan, fit_plan, induce_tree, load_csv, load_model, save_model
from entgrove.cli import main
from entgrove.model_io import DigestMismatchError
from entgrove.synthetic import bundled_csv

work = Path(tempfile.mkdtemp(prefix="entgrove-demo-"))
table = load_csv(bundled_csv(), label_column="class")
plan = fit_plan(table)
model = induce_tree(apply_plan(plan, table), TrainConfig(max_depth=3), plan)

art = save_model(model, work / "model.json")
print("digest", art.content_digest)
assert load_model(work / "model.json") == model

# Any edit to the body is caught by the digest check.
doc = json.loads((work / "model.json").read_text())
doc["model"]["class_order"].reverse()
(work / "tampered.json").write_text(json.dumps(doc))
try:
    load_model(work / "tampered.json")
except DigestMismatchError as e:
    print("tamper detected:", str(e).split(":")[1].strip())

data = str(bundled_csv())
run = work / "run"
main(["train", "--data", data, "--label", "class", "--out", str(run), "--seed", "3", "--prune"])
main(["eval", "--model", str(run / "model.json"), "--data", data, "--subset", "validation", "--out", str(run)])
main(["bench", "--model", str(run / "model.json"), "--data", data, "--repetitions", "10", "--out", str(run)])
print(sorted(p.name for p in run.iterdir()))
