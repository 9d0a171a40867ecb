"""Tests for confusion matrices and per-class metrics."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from binsleuth.evaluation import ClassMismatch, ConfusionMatrix, EvalReport, per_class_metrics


class TestConfusionMatrix:
    """Test counting and merging."""

    def test_from_indices(self):
        """Test that rows count true classes and columns count predictions."""
        matrix = ConfusionMatrix.from_indices(["a", "b"], [0, 0, 1, 1, 1], [0, 1, 1, 1, 0])
        assert matrix.counts.tolist() == [[1, 1], [1, 2]]
        assert matrix.total == 5
        assert matrix.accuracy == pytest.approx(3 / 5)

    def test_merge_adds_counts(self):
        """Test that merging adds cell counts."""
        a = ConfusionMatrix(["a", "b"], np.array([[1, 0], [0, 1]]))
        b = ConfusionMatrix(["a", "b"], np.array([[0, 2], [3, 0]]))
        assert a.merge(b).counts.tolist() == [[1, 2], [3, 1]]

    def test_merge_requires_same_classes(self):
        """Test that merging needs identical class order."""
        with pytest.raises(ClassMismatch):
            ConfusionMatrix(["a", "b"]).merge(ConfusionMatrix(["b", "a"]))

    def test_shape_is_checked(self):
        """Test that counts must be square in the class count."""
        with pytest.raises(ValueError):
            ConfusionMatrix(["a", "b"], np.zeros((3, 3)))

    def test_empty_accuracy_is_zero(self):
        """Test that an empty matrix reports zero accuracy."""
        assert ConfusionMatrix(["a"]).accuracy == 0.0


class TestPerClassMetrics:
    """Test precision, recall and F-measure."""

    def test_perfect(self):
        """Test F-measure 1 on a diagonal matrix."""
        metrics = per_class_metrics(ConfusionMatrix(["a", "b"], np.array([[5, 0], [0, 5]])))
        assert [m.f_measure for m in metrics] == [1.0, 1.0]
        assert [m.support for m in metrics] == [5, 5]

    def test_all_wrong(self):
        """Test F-measure 0 when every prediction is wrong."""
        metrics = per_class_metrics(ConfusionMatrix(["a", "b"], np.array([[0, 5], [5, 0]])))
        assert [m.f_measure for m in metrics] == [0.0, 0.0]

    def test_undefined_ratios_are_zero(self):
        """Test that 0/0 precision and recall read as zero."""
        metrics = per_class_metrics(ConfusionMatrix(["a", "b"], np.array([[4, 0], [0, 0]])))
        assert metrics[1].precision == 0.0
        assert metrics[1].recall == 0.0
        assert metrics[1].f_measure == 0.0

    def test_mixed(self):
        """Test the ratios on a matrix with errors both ways."""
        a, b = per_class_metrics(ConfusionMatrix(["a", "b"], np.array([[3, 1], [2, 4]])))
        assert a.precision == pytest.approx(3 / 5)
        assert a.recall == pytest.approx(3 / 4)
        assert a.f_measure == pytest.approx(2 * 0.6 * 0.75 / 1.35)
        assert b.precision == pytest.approx(4 / 5)

    @given(
        permutation=st.permutations([0, 1, 2, 3]),
        pairs=st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=60),
    )
    def test_relabeling_permutes_rows(self, permutation, pairs):
        """Test that renumbering classes reorders the metric rows and changes no value."""
        names = ["w", "x", "y", "z"]
        true = [t for t, _ in pairs]
        predicted = [p for _, p in pairs]
        original = per_class_metrics(ConfusionMatrix.from_indices(names, true, predicted))

        # class i of the original numbering becomes class permutation[i]
        renamed = [""] * 4
        for old, new in enumerate(permutation):
            renamed[new] = names[old]
        relabeled = per_class_metrics(ConfusionMatrix.from_indices(
            renamed, [permutation[t] for t in true], [permutation[p] for p in predicted]
        ))

        for old, new in enumerate(permutation):
            assert relabeled[new] == original[old]


class TestEvalReport:
    """Test the report container."""

    def test_lookup_and_dict(self):
        """Test per-class lookup, fold weighting and the dict form."""
        confusion = ConfusionMatrix(["a", "b"], np.array([[3, 1], [0, 4]]))
        report = EvalReport.from_confusion(confusion, fold_count=2, seed=1, model_spec="gnb",
                                           fold_accuracies=[1.0, 0.75], fold_sizes=[4, 4])
        assert report.accuracy == pytest.approx(7 / 8)
        assert report.f_measure("b") == pytest.approx(2 * 0.8 * 1.0 / 1.8)
        assert report.weighted_fold_accuracy() == pytest.approx(report.accuracy)
        assert report.to_dict()["per_class"]["a"]["support"] == 4
        with pytest.raises(KeyError):
            report.class_metrics("c")
