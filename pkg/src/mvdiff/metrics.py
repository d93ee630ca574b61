"""Clustering evaluation: NMI, ACC, ARI, pairwise F1/precision, purity.

Conventions (the literature varies, so they are pinned here):
  * NMI is normalized by the geometric mean of the two entropies, natural
    logs, 0*log(0) = 0. A partition with zero entropy yields NMI = 0.
  * ACC uses the optimal one-to-one matching of predicted to true ids.
  * precision/recall/F1 are pair-counting: a "positive" is a same-cluster
    pair in the prediction.
ACC, purity, and precision are directional (prediction vs truth); NMI and
ARI are symmetric.
"""

from dataclasses import dataclass, asdict
from math import comb, log

import numpy as np

from .clustering import Partition, best_label_matching
from .exceptions import EmptyPartition, LengthMismatch


@dataclass
class MetricReport:
    nmi: float
    acc: float
    ari: float
    f1: float
    precision: float
    purity: float

    def as_dict(self):
        return asdict(self)


def _labels(p):
    if isinstance(p, Partition):
        return np.asarray(p.labels, dtype=int)
    return np.asarray(p, dtype=int)


def contingency(pred, truth):
    """Co-occurrence counts: rows are predicted clusters, columns true ones."""
    pred, truth = _labels(pred), _labels(truth)
    if pred.shape[0] != truth.shape[0]:
        raise LengthMismatch(f"{pred.shape[0]} predictions vs {truth.shape[0]} labels")
    if pred.shape[0] == 0:
        raise EmptyPartition("empty partitions")
    _, pi = np.unique(pred, return_inverse=True)
    _, ti = np.unique(truth, return_inverse=True)
    counts = np.zeros((pi.max() + 1, ti.max() + 1), dtype=np.int64)
    np.add.at(counts, (pi, ti), 1)
    return counts


def _entropy(marginals, n):
    h = 0.0
    for m in marginals:
        if m > 0:
            p = m / n
            h -= p * log(p)
    return h


def _nmi(counts):
    n = counts.sum()
    rows = counts.sum(axis=1)
    cols = counts.sum(axis=0)
    hp = _entropy(rows, n)
    ht = _entropy(cols, n)
    if hp == 0.0 or ht == 0.0:
        return 0.0
    mi = 0.0
    for i in range(counts.shape[0]):
        for j in range(counts.shape[1]):
            nij = counts[i, j]
            if nij > 0:
                mi += (nij / n) * log(n * nij / (rows[i] * cols[j]))
    mi = max(mi, 0.0)
    return mi / np.sqrt(hp * ht)


def _pair_counts(counts):
    """(TP, FP, FN) over same-cluster pairs."""
    tp = sum(comb(int(nij), 2) for nij in counts.ravel())
    pred_pairs = sum(comb(int(m), 2) for m in counts.sum(axis=1))
    true_pairs = sum(comb(int(m), 2) for m in counts.sum(axis=0))
    return tp, pred_pairs - tp, true_pairs - tp


def _ari(counts):
    n = int(counts.sum())
    tp, fp, fn = _pair_counts(counts)
    sum_pred = tp + fp
    sum_true = tp + fn
    total = comb(n, 2)
    if total == 0:
        return 1.0
    expected = sum_pred * sum_true / total
    maximum = 0.5 * (sum_pred + sum_true)
    if maximum == expected:
        # both partitions trivial (all-one-cluster or all-singletons)
        return 1.0
    return (tp - expected) / (maximum - expected)


def evaluate(pred, truth):
    """Score a predicted partition against ground truth on all six metrics."""
    counts = contingency(pred, truth)
    n = int(counts.sum())

    nmi = float(_nmi(counts))
    acc = float(best_label_matching(counts) / n)
    ari = float(_ari(counts))

    tp, fp, fn = _pair_counts(counts)
    if tp + fp > 0:
        precision = tp / (tp + fp)
    else:
        precision = 1.0 if fn == 0 else 0.0  # no predicted pairs: vacuous unless pairs were required
    if tp + fn > 0:
        recall = tp / (tp + fn)
    else:
        recall = 1.0 if fp == 0 else 0.0
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)

    purity = float(counts.max(axis=1).sum() / n)

    return MetricReport(
        nmi=nmi, acc=acc, ari=ari, f1=float(f1),
        precision=float(precision), purity=purity,
    )
