"""Save and load trained models as canonical JSON with a SHA-256 digest.

File layout (``model.json``)::

    {
      "content_digest": "<sha256 hex of the canonical body>",
      "format_version": 1,
      "model": { ...tree, config, plan, features, classes... }
    }

The canonical body is ``{"format_version": ..., "model": ...}`` dumped with
sorted keys, ``(",", ":")`` separators and ASCII escaping. Reals that decide
routing (thresholds, plan statistics) are stored as ``repr`` strings, which
round-trip the exact binary value.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .dataset import ClassManifest
from .preprocess import PreprocessPlan
from .tree import Internal, Leaf, TrainConfig, TrainedModel, TreeNode

FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


class DigestMismatchError(ModelFormatError):
    pass


class UnsupportedVersionError(ModelFormatError):
    pass


@dataclass(frozen=True)
class ModelArtifact:
    format_version: int
    model: TrainedModel
    content_digest: str


def node_to_dict(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        d = {"class_counts": dict(sorted(node.class_counts.items()))}
        if node.n_samples is not None:
            d["n_samples"] = node.n_samples
        return d
    d = {
        "feature": node.feature,
        "feature_index": node.feature_index,
        "class_counts": dict(sorted(node.class_counts.items())),
        "children": [node_to_dict(c) for c in node.children],
    }
    if node.threshold is not None:
        d["threshold"] = repr(node.threshold)
    else:
        d["categories"] = [list(c) for c in node.categories]
    return d


def node_from_dict(d: dict) -> TreeNode:
    if "children" not in d:
        return Leaf(dict(d["class_counts"]), d.get("n_samples"))
    children = tuple(node_from_dict(c) for c in d["children"])
    threshold = float(d["threshold"]) if "threshold" in d else None
    categories = tuple(tuple(c) for c in d["categories"]) if "categories" in d else None
    return Internal(d["feature"], d["feature_index"], children, dict(d["class_counts"]),
                    threshold, categories)


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "root": node_to_dict(model.root),
        "config": model.config.to_dict(),
        "selected_features": list(model.selected_features),
        "feature_kinds": list(model.feature_kinds),
        "class_order": list(model.class_order),
        "training_manifest": model.training_manifest.to_dict(),
        "plan": None if model.plan is None else model.plan.to_dict(),
        "categorical_domains": {k: list(v) for k, v in model.categorical_domains.items()},
        "provenance": model.provenance,
    }


def model_from_dict(d: dict) -> TrainedModel:
    return TrainedModel(
        root=node_from_dict(d["root"]),
        config=TrainConfig.from_dict(d["config"]),
        selected_features=tuple(d["selected_features"]),
        feature_kinds=tuple(d["feature_kinds"]),
        class_order=tuple(d["class_order"]),
        training_manifest=ClassManifest.from_dict(d["training_manifest"]),
        plan=None if d["plan"] is None else PreprocessPlan.from_dict(d["plan"]),
        categorical_domains={k: tuple(v) for k, v in d["categorical_domains"].items()},
        provenance=d.get("provenance", {}),
    )


def canonical_bytes(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True,
                      allow_nan=False).encode("ascii")


def digest_of(body: dict) -> str:
    return hashlib.sha256(canonical_bytes(body)).hexdigest()


def save_model(model: TrainedModel, path: str | Path) -> ModelArtifact:
    body = {"format_version": FORMAT_VERSION, "model": model_to_dict(model)}
    digest = digest_of(body)
    doc = dict(body, content_digest=digest)
    text = json.dumps(doc, sort_keys=True, indent=1, ensure_ascii=True, allow_nan=False) + "\n"
    Path(path).write_text(text, encoding="ascii")
    return ModelArtifact(FORMAT_VERSION, model, digest)


def load_artifact(path: str | Path) -> ModelArtifact:
    raw = Path(path).read_bytes()
    try:
        doc = json.loads(raw.decode("ascii"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise DigestMismatchError(f"{path}: corrupt model file ({e})") from None
    if not isinstance(doc, dict):
        raise DigestMismatchError(f"{path}: corrupt model file")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"{path}: unsupported format_version {version!r}")
    stored = doc.get("content_digest")
    body = {"format_version": version, "model": doc.get("model")}
    actual = digest_of(body)
    if stored != actual:
        raise DigestMismatchError(f"{path}: content digest mismatch (stored {stored}, computed {actual})")
    try:
        model = model_from_dict(doc["model"])
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(f"{path}: malformed model body ({e})") from None
    return ModelArtifact(version, model, actual)


def load_model(path: str | Path) -> TrainedModel:
    return load_artifact(path).model
