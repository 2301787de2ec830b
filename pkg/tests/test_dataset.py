import os
import tempfile
import unittest

import numpy as np
import pandas as pd

from prooflist import BitVector
from prooflist import dataset as ds
from prooflist.errors import EmptyModelError, ParseError, SchemaError

from tests.instances import dataset_from_arrays


def make_table(rows, columns, label="y") -> ds.CategoricalTable:
    frame = pd.DataFrame(rows, columns=columns).astype(str)
    frame[label] = frame[label].astype(int)
    return ds.CategoricalTable(frame, label)


class LoadCsvTest(unittest.TestCase):
    def setUp(self) -> None:
        self.dir = tempfile.TemporaryDirectory()

    def tearDown(self) -> None:
        self.dir.cleanup()

    def write(self, text: str) -> str:
        path = os.path.join(self.dir.name, "data.csv")
        with open(path, "w") as fout:
            fout.write(text)
        return path

    def test_missing_cells_are_dropped(self):
        table = ds.load_categorical_csv(self.write("a,b,y\nx,p,1\nx,,0\ny,q,0\n"), "y")
        assert table.n_rows == 2
        assert table.dropped_rows == 1
        assert table.attributes == ["a", "b"]
        assert table.labels() == BitVector.from_bools([1, 0])

    def test_whitespace_and_label_spellings(self):
        table = ds.load_categorical_csv(self.write("a,y\n x ,yes\ny,No\n"), "y")
        assert list(table.frame["a"]) == ["x", "y"]
        assert list(table.frame["y"]) == [1, 0]

    def test_non_binary_label(self):
        with self.assertRaises(SchemaError):
            ds.load_categorical_csv(self.write("a,y\nx,0\nx,1\ny,2\n"), "y")

    def test_missing_label_column(self):
        with self.assertRaises(SchemaError):
            ds.load_categorical_csv(self.write("a,b\nx,1\n"), "y")

    def test_empty_file(self):
        with self.assertRaises(ParseError):
            ds.load_categorical_csv(self.write(""), "y")

    def test_malformed_row(self):
        with self.assertRaises(ParseError) as ctx:
            ds.load_categorical_csv(self.write("a,y\nx,1\nx,1,extra\n"), "y")
        assert ctx.exception.line == 3


class DiscretizeTest(unittest.TestCase):
    def test_bin_labels(self):
        assert ds.bin_labels([18, 21, 23, 26, 46]) == ["18-20", "21-22", "23-25", "26-45", ">45"]
        assert ds.bin_labels([0, 1, 2, 4]) == ["0", "1", "2-3", ">3"]

    def test_discretize(self):
        table = make_table([[18, 1], [20, 0], [21, 1], [30, 0], [50, 1], [17, 0]], ["age", "y"])
        binned = ds.discretize(table, "age", [18, 21, 23, 26, 46])
        assert list(binned.frame["age"]) == ["18-20", "18-20", "21-22", "26-45", ">45"]
        assert binned.dropped_rows == 1

    def test_bad_edges(self):
        table = make_table([[1, 1]], ["age", "y"])
        with self.assertRaises(ValueError):
            ds.discretize(table, "age", [5, 3])
        with self.assertRaises(SchemaError):
            ds.discretize(table, "height", [1, 2])

    def test_select_columns(self):
        table = make_table([["x", "p", 1]], ["a", "b", "y"])
        assert ds.select_columns(table, ["b"]).attributes == ["b"]
        with self.assertRaises(SchemaError):
            ds.select_columns(table, ["c"])


class MiningTest(unittest.TestCase):
    def setUp(self) -> None:
        self.table = make_table(
            [["x", "p", "1", 1], ["x", "q", "0", 1], ["y", "p", "0", 0], ["y", "q", "1", 0]],
            ["a", "b", "flag", "y"],
        )

    def test_single_binary_attribute(self):
        table = ds.select_columns(self.table, ["a"])
        antecedents = ds.mine_antecedents(table)
        assert [a.name for a in antecedents] == ["a=x", "a=y"]
        assert [a.token for a in antecedents] == ["{a=x}", "{a=y}"]
        assert antecedents[0].captures == BitVector.from_bools([1, 1, 0, 0])

    def test_negations(self):
        table = ds.select_columns(self.table, ["a"])
        antecedents = ds.mine_antecedents(table, include_negations=True)
        assert [a.name for a in antecedents] == ["a=x", "a=y", "NOT a=x", "NOT a=y"]
        assert antecedents[2].token == "{not-a=x}"
        assert antecedents[2].negated
        assert antecedents[2].captures == antecedents[1].captures

    def test_pairs_over_distinct_attributes(self):
        table = ds.select_columns(self.table, ["a", "b"])
        antecedents = ds.mine_antecedents(table, max_clauses=2)
        assert len(antecedents) == 4 + 4
        pairs = [a for a in antecedents if a.clause_count == 2]
        assert {a.name for a in pairs} == {"a=x AND b=p", "a=x AND b=q", "a=y AND b=p", "a=y AND b=q"}
        assert all(a.support == 1 for a in pairs)

    def test_indicators_and_selected_negations(self):
        antecedents = ds.mine_antecedents(
            self.table, include_negations=True, negate_columns=["flag"], indicator_columns=["flag"]
        )
        names = [a.name for a in antecedents]
        assert names == ["a=x", "a=y", "b=p", "b=q", "flag", "NOT flag"]
        assert antecedents.by_token("{flag}").captures == BitVector.from_bools([1, 0, 0, 1])

    def test_support_filter(self):
        antecedents = ds.mine_antecedents(self.table, max_clauses=2, lambda_min=0.3)
        for a in antecedents:
            assert 0.3 <= a.support / 4 <= 0.7
        assert all(a.clause_count == 1 for a in antecedents)

    def test_nothing_survives(self):
        table = make_table([["u", 1], ["v", 0], ["w", 1]], ["a", "y"])
        with self.assertRaises(EmptyModelError):
            ds.mine_antecedents(table, lambda_min=0.4)

    def test_bad_lambda_min(self):
        with self.assertRaises(ValueError):
            ds.mine_antecedents(self.table, lambda_min=0.5)

    def test_evaluate_on_another_table(self):
        antecedents = ds.mine_antecedents(self.table, max_clauses=2)
        other = make_table([["y", "q", "1", 1], ["x", "p", "0", 0]], ["a", "b", "flag", "y"])
        rebuilt = antecedents.evaluate_on(other)
        assert len(rebuilt) == len(antecedents)
        assert rebuilt.by_token("{a=x,b=p}").captures == BitVector.from_bools([0, 1])
        assert rebuilt.by_token("{a=y}").id == antecedents.by_token("{a=y}").id


class MinorityMaskTest(unittest.TestCase):
    def test_distinct_signatures(self):
        dataset = dataset_from_arrays([[0, 0], [0, 1], [1, 0], [1, 1]], [1, 0, 1, 0])
        assert dataset.minority_mask.popcount() == 0

    def test_one_conflicting_pair(self):
        dataset = dataset_from_arrays([[1, 1], [1, 1], [0, 1], [1, 0]], [0, 1, 1, 0])
        assert dataset.minority_mask == BitVector.from_bools([0, 1, 0, 0])
        assert dataset.minority_mask.popcount() / dataset.n_samples == 0.25

    def test_order_independent_and_idempotent(self):
        rng = np.random.default_rng(1)
        features = rng.random((40, 3)) < 0.5
        labels = rng.random(40) < 0.5
        forward = dataset_from_arrays(features, labels)
        backward = dataset_from_arrays(features[:, ::-1], labels)
        assert forward.minority_mask == backward.minority_mask
        assert ds.compute_minority_mask(forward.antecedents, forward.labels) == forward.minority_mask

    def test_matches_grouping_by_hand(self):
        rng = np.random.default_rng(2)
        features = rng.random((64, 3)) < 0.5
        labels = rng.random(64) < 0.5
        dataset = dataset_from_arrays(features, labels)
        expected = 0
        for signature in {tuple(row) for row in features}:
            members = np.all(features == signature, axis=1)
            ones = int(labels[members].sum())
            expected += min(ones, int(members.sum()) - ones)
        assert dataset.minority_mask.popcount() == expected


class FoldTest(unittest.TestCase):
    def setUp(self) -> None:
        self.table = make_table([[str(i), int(i < 3)] for i in range(10)], ["a", "y"])

    def test_partition(self):
        folds = ds.split_folds(self.table, 5, seed=0)
        assert len(folds) == 5
        tests = [list(f.test.frame["a"]) for f in folds]
        assert all(len(t) == 2 for t in tests)
        assert sorted(v for t in tests for v in t) == sorted(str(i) for i in range(10))
        for f in folds:
            assert set(f.test.frame["a"]).isdisjoint(f.train.frame["a"])

    def test_seeded(self):
        a = ds.split_folds(self.table, 5, seed=3)
        b = ds.split_folds(self.table, 5, seed=3)
        assert all(x.test.frame.equals(y.test.frame) for x, y in zip(a, b))

    def test_resampling_only_touches_training_folds(self):
        for fold in ds.split_folds(self.table, 5, seed=1, resample_minority=True):
            y = fold.train.frame["y"]
            assert int(y.sum()) * 2 == len(y)
            assert fold.test.n_rows == 2

    def test_bad_fold_counts(self):
        with self.assertRaises(ValueError):
            ds.split_folds(self.table, 1, seed=0)
        with self.assertRaises(ValueError):
            ds.split_folds(self.table, 11, seed=0)
