"""Synthetic labelled tables for demos, tests and the end-to-end benchmark."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

CLASS_NAMES = (
    "Normal", "Adposhel", "Agent", "Allaple", "Amonetize", "Androm", "Autorun",
    "BrowseFox", "Dinwod", "Elex", "Expiro", "Fasong", "HackKMS", "Hlux",
    "Injector", "InstallCore", "MultiPlug", "Neoreklami", "Neshta", "Regrun",
    "Sality", "Snarasite", "Stantinko", "VBA", "VBKrypt", "Vilsel",
)


def make_blobs(n_rows: int = 2000, n_classes: int = 5, n_features: int = 20,
               n_informative: int | None = None, separation: float = 8.0, seed: int = 0):
    """Gaussian classes with unit noise.

    On each informative feature the class means sit ``separation`` apart in
    a random per-feature order; the remaining features are pure noise.
    Returns ``(header, rows)`` with the label in the last column.
    """
    if n_classes > len(CLASS_NAMES):
        raise ValueError(f"at most {len(CLASS_NAMES)} classes")
    rng = np.random.default_rng(seed)
    n_informative = n_features if n_informative is None else n_informative
    centers = np.zeros((n_classes, n_features))
    for f in range(n_informative):
        centers[:, f] = separation * rng.permutation(n_classes)
    y = np.arange(n_rows) % n_classes
    rng.shuffle(y)
    X = centers[y] + rng.normal(size=(n_rows, n_features))
    header = [f"f{j:02d}" for j in range(n_features)] + ["class"]
    rows = [[f"{v:.6f}" for v in x] + [CLASS_NAMES[k]] for x, k in zip(X, y)]
    return header, rows


def make_traffic_like(n_rows: int = 200, seed: int = 0, missing_rate: float = 0.02):
    """Small mixed-type table in the spirit of flow records: numeric counters,
    a symbolic protocol field, a few ``?`` missing cells, and four classes."""
    rng = np.random.default_rng(seed)
    classes = ["Normal", "Adposhel", "Agent", "Allaple"]
    protocols = {"Normal": ["tcp", "udp"], "Adposhel": ["tcp"], "Agent": ["udp", "icmp"], "Allaple": ["icmp"]}
    header = ["duration", "src_bytes", "dst_bytes", "protocol", "entropy_score", "noise", "class"]
    rows = []
    for i in range(n_rows):
        k = i % len(classes)
        c = classes[k]
        row = [
            f"{rng.gamma(2.0, 1.0 + 3 * k):.3f}",
            f"{rng.normal(1000 + 800 * k, 150):.1f}",
            f"{rng.normal(500 + 100 * (k % 2), 80):.1f}",
            str(rng.choice(protocols[c])),
            f"{rng.normal(2 + 1.5 * k, 0.3):.4f}",
            f"{rng.random():.4f}",
            c,
        ]
        for j in range(len(row) - 1):
            if rng.random() < missing_rate:
                row[j] = "?"
        rows.append(row)
    return header, rows


def write_csv(path: str | Path, header, rows, delimiter: str = ",") -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def bundled_csv() -> Path:
    """Path of the 200-row mixed-type sample shipped with the package."""
    return Path(__file__).parent / "data" / "synthetic_200.csv"
