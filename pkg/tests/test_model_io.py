import json
import numpy as np
import pytest

from entgrove.dataset import CATEGORICAL, load_csv
from entgrove.model_io import (DigestMismatchError, UnsupportedVersionError, canonical_bytes, load_artifact,
                               load_model, save_model)
from entgrove.preprocess import apply_plan, fit_plan
from entgrove.synthetic import bundled_csv
from entgrove.tree import TrainConfig, induce_tree, predict_many


@pytest.fixture
def trained():
    table = load_csv(bundled_csv(), "class")
    plan = fit_plan(table)
    t = apply_plan(plan, table)
    return induce_tree(t, TrainConfig(), plan, provenance={"label": "class"}), t


def test_round_trip_structure(trained, tmp_path):
    model, _ = trained
    art = save_model(model, tmp_path / "m.json")
    back = load_model(tmp_path / "m.json")
    assert back == model
    assert back.class_order == model.class_order
    assert len(art.content_digest) == 64


def test_saves_are_byte_identical(trained, tmp_path):
    model, _ = trained
    save_model(model, tmp_path / "a.json")
    save_model(model, tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_predictions_identical_on_random_rows(trained, tmp_path):
    model, t = trained
    save_model(model, tmp_path / "m.json")
    back = load_model(tmp_path / "m.json")
    rng = np.random.default_rng(0)
    X = rng.random((1000, len(model.selected_features)))
    for j, kind in enumerate(model.feature_kinds):
        if kind == CATEGORICAL:
            X[:, j] = rng.integers(0, 4, 1000)
    # include exact threshold values to exercise the boundary
    X[:10] = model.matrix(t)[:10]
    a_labels, a_proba = predict_many(model, X)
    b_labels, b_proba = predict_many(back, X)
    assert a_labels == b_labels
    assert np.array_equal(a_proba, b_proba)


def test_thresholds_stored_as_exact_strings(trained, tmp_path):
    model, _ = trained
    save_model(model, tmp_path / "m.json")
    root = json.loads((tmp_path / "m.json").read_text())["model"]["root"]
    assert isinstance(root.get("threshold", ""), str)


def test_flipped_byte_detected(trained, tmp_path):
    model, _ = trained
    path = tmp_path / "m.json"
    save_model(model, path)
    raw = bytearray(path.read_bytes())
    # flip a digit inside a class count
    pos = raw.index(b'"class_counts"')
    pos = next(i for i in range(pos, len(raw)) if chr(raw[i]).isdigit())
    raw[pos] = ord("9") if raw[pos] != ord("9") else ord("8")
    path.write_bytes(bytes(raw))
    with pytest.raises(DigestMismatchError):
        load_model(path)


def test_structural_corruption_detected(trained, tmp_path):
    model, _ = trained
    path = tmp_path / "m.json"
    save_model(model, path)
    raw = path.read_bytes()
    path.write_bytes(raw[: len(raw) // 2])
    with pytest.raises(DigestMismatchError):
        load_model(path)


def test_unknown_version(trained, tmp_path):
    model, _ = trained
    path = tmp_path / "m.json"
    save_model(model, path)
    doc = json.loads(path.read_text())
    doc["format_version"] = 99
    path.write_text(json.dumps(doc))
    with pytest.raises(UnsupportedVersionError):
        load_model(path)


def test_unwritable_path(trained, tmp_path):
    model, _ = trained
    with pytest.raises(OSError):
        save_model(model, tmp_path / "missing-dir" / "m.json")


def test_digest_covers_canonical_body(trained, tmp_path):
    import hashlib
    model, _ = trained
    path = tmp_path / "m.json"
    save_model(model, path)
    doc = json.loads(path.read_text())
    body = {"format_version": doc["format_version"], "model": doc["model"]}
    assert hashlib.sha256(canonical_bytes(body)).hexdigest() == doc["content_digest"]
    assert load_artifact(path).content_digest == doc["content_digest"]
