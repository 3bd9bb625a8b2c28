"""Brute-force reference computations, written without touching the
package's vectorised code paths."""

from math import log2

TIE = 1e-12


def H(labels):
    n = len(labels)
    out = 0.0
    for c in set(labels):
        p = labels.count(c) / n
        out -= p * log2(p)
    return out


def partition_gain(groups):
    """Gain and split information of a partition given as lists of labels."""
    everything = [y for g in groups for y in g]
    n = len(everything)
    groups = [g for g in groups if g]
    gain = H(everything) - sum(len(g) / n * H(g) for g in groups)
    split_info = -sum(len(g) / n * log2(len(g) / n) for g in groups)
    return gain, split_info


def score(groups, criterion):
    gain, si = partition_gain(groups)
    if criterion == "gain":
        return gain
    return gain / si if si > TIE else 0.0


def all_midpoints(values):
    v = sorted(set(values))
    return [(a + b) / 2 for a, b in zip(v, v[1:])]


def exhaustive_threshold(values, labels, criterion="gain"):
    """Every midpoint, scored directly; best score, lowest threshold on ties."""
    cands = []
    for t in all_midpoints(values):
        left = [y for x, y in zip(values, labels) if x <= t]
        right = [y for x, y in zip(values, labels) if x > t]
        cands.append((score([left, right], criterion), t))
    if not cands:
        return None
    top = max(s for s, _ in cands)
    return min((t, s) for s, t in cands if s >= top - TIE)


def brute_best_split(rows, labels, kinds, criterion, min_gain=0.0):
    """Global argmax over (feature, threshold) with the documented tie order:
    score, then feature position, then lower threshold.

    Returns (feature_index, threshold or None) or None.
    """
    if len(set(labels)) < 2:
        return None
    cands = []
    for j, kind in enumerate(kinds):
        col = [r[j] for r in rows]
        if len(set(col)) < 2:
            continue
        if kind == "numeric":
            for t in all_midpoints(col):
                left = [y for x, y in zip(col, labels) if x <= t]
                right = [y for x, y in zip(col, labels) if x > t]
                cands.append((score([left, right], criterion), j, t))
        else:
            groups = [[y for x, y in zip(col, labels) if x == v] for v in sorted(set(col))]
            cands.append((score(groups, criterion), j, None))
    if not cands:
        return None
    top = max(c[0] for c in cands)
    if min_gain > 0 and top <= min_gain:
        return None
    best = min(((j, -1 if t is None else t) for s, j, t in cands if s >= top - TIE))
    j, t = best
    return j, (None if t == -1 else t)


def brute_confusion_rates(cm, k):
    """One-vs-rest rates for class k by explicit summation."""
    K = len(cm)
    tp = cm[k][k]
    fp = sum(cm[i][k] for i in range(K) if i != k)
    fn = sum(cm[k][j] for j in range(K) if j != k)
    tn = sum(cm[i][j] for i in range(K) for j in range(K) if i != k and j != k)
    div = lambda a, b: a / b if b else 0.0
    p, r = div(tp, tp + fp), div(tp, tp + fn)
    return p, r, div(tn, tn + fp), div(2 * p * r, p + r)
