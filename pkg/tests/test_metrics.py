import numpy as np
import pytest

from _oracles import metrics_oracle
from mvdiff.clustering import Partition
from mvdiff.exceptions import EmptyPartition, LengthMismatch
from mvdiff.metrics import contingency, evaluate

METRICS = ("nmi", "acc", "ari", "f1", "precision", "purity")


def random_partition(rng, n, max_k):
    return rng.integers(0, max_k, size=n)


class TestContingency:
    def test_counts_sum_to_n(self, rng):
        pred = random_partition(rng, 20, 4)
        truth = random_partition(rng, 20, 3)
        counts = contingency(pred, truth)
        assert counts.sum() == 20
        assert counts.sum(axis=1).tolist() == [int((pred == c).sum()) for c in np.unique(pred)]

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            contingency([0, 1], [0, 1, 2])

    def test_empty(self):
        with pytest.raises(EmptyPartition):
            contingency([], [])


class TestEvaluate:
    def test_identical_partitions_score_one(self):
        labels = [0, 0, 1, 1, 2, 2]
        report = evaluate(labels, labels)
        for name in METRICS:
            assert getattr(report, name) == pytest.approx(1.0)

    def test_relabeling_invariance_of_symmetric_scores(self):
        truth = [0, 0, 1, 1, 2, 2]
        pred = [2, 2, 0, 0, 1, 1]  # same partition, permuted ids
        report = evaluate(pred, truth)
        assert report.acc == 1.0
        assert report.nmi == pytest.approx(1.0)
        assert report.ari == pytest.approx(1.0)

    def test_single_cluster_vs_balanced(self):
        report = evaluate([0, 0, 0, 0], [0, 0, 1, 1])
        assert report.purity == 0.5
        assert report.nmi == 0.0
        assert report.ari == 0.0
        assert report.precision == pytest.approx(2.0 / 6.0)

    def test_matches_brute_force_oracle(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 9))
            pred = random_partition(rng, n, int(rng.integers(1, 5)))
            truth = random_partition(rng, n, int(rng.integers(1, 5)))
            report = evaluate(pred, truth)
            expected = metrics_oracle(pred, truth)
            for name in METRICS:
                assert getattr(report, name) == pytest.approx(expected[name], abs=1e-12), name

    def test_relabeling_invariance_all_metrics(self, rng):
        for _ in range(20):
            n = int(rng.integers(4, 10))
            pred = random_partition(rng, n, 3)
            truth = random_partition(rng, n, 3)
            base = evaluate(pred, truth)
            perm_p = rng.permutation(3)[pred]
            perm_t = rng.permutation(3)[truth]
            again = evaluate(perm_p, perm_t)
            for name in METRICS:
                assert getattr(again, name) == pytest.approx(getattr(base, name), abs=1e-12)

    def test_acc_at_least_one_over_k_balanced(self, rng):
        k = 4
        truth = np.repeat(np.arange(k), 10)
        for _ in range(10):
            pred = random_partition(rng, len(truth), k)
            assert evaluate(pred, truth).acc >= 1.0 / k - 1e-12

    def test_independent_predictions_have_near_zero_ari(self, rng):
        truth = np.repeat(np.arange(4), 25)
        aris = []
        for _ in range(1000):
            pred = rng.permutation(truth)
            aris.append(evaluate(pred, truth).ari)
        assert np.mean(np.abs(aris)) < 0.05

    def test_nmi_and_ari_symmetric(self, rng):
        pred = random_partition(rng, 12, 3)
        truth = random_partition(rng, 12, 4)
        fwd = evaluate(pred, truth)
        bwd = evaluate(truth, pred)
        assert fwd.nmi == pytest.approx(bwd.nmi, abs=1e-12)
        assert fwd.ari == pytest.approx(bwd.ari, abs=1e-12)

    def test_accepts_partition_objects(self):
        p = Partition(np.array([0, 0, 1, 1]), 2)
        assert evaluate(p, p).acc == 1.0
