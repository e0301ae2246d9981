import os
import tempfile
import unittest

import numpy as np
import pandas as pd

from mixmatch.common.mixmatch_errors import IngestError
from mixmatch.data_models.ingest_config_data import IngestSpec, SplitPercentages
from mixmatch.harness.ingest import (INGEST_SPLITS_HEADER, ingest_csv, ingest_csv_with_splits, split_counts,
                                     write_ingest_splits)

STATE_SIZES = {"FL": 14605, "CT": 2836, "OH": 6664}
STATE_SPLITS = {
    "FL": SplitPercentages(train=49.34, validate=0.16, test=0.5, discard=50.0),
    "CT": SplitPercentages(train=50.0, validate=7.5, test=42.5, discard=0.0),
    "OH": SplitPercentages(train=2.25, validate=0.75, test=2.25, discard=94.75),
}
EXPECTED_COUNTS = {
    "FL": {"train": 7206, "validate": 23, "test": 73, "discard": 7303},
    "CT": {"train": 1419, "validate": 212, "test": 1205, "discard": 0},
    "OH": {"train": 149, "validate": 49, "test": 149, "discard": 6317},
}


def write_state_table(path, seed=0):
    rng = np.random.default_rng(seed)
    states = np.concatenate([np.full(size, state) for state, size in STATE_SIZES.items()])
    rng.shuffle(states)
    n = states.size
    frame = pd.DataFrame({
        "state": states,
        "age": rng.normal(40.0, 10.0, size=n).round(1),
        "cost": rng.normal(600.0, 50.0, size=n).round(2),
        "car_value": rng.choice(["d", "e", "f"], size=n),
        "purchased": rng.integers(0, 2, size=n),
    })
    frame.to_csv(path, index=False)
    return frame


class TestSplitCounts(unittest.TestCase):

    def test_floor_arithmetic(self):
        for state, size in STATE_SIZES.items():
            self.assertEqual(split_counts(size, STATE_SPLITS[state]), EXPECTED_COUNTS[state])

    def test_remainder_without_discard_goes_to_train(self):
        counts = split_counts(7, SplitPercentages(train=50.0, validate=50.0))
        self.assertEqual(counts, {"train": 4, "validate": 3, "test": 0, "discard": 0})

    def test_percentages_must_sum_to_100(self):
        with self.assertRaises(ValueError):
            SplitPercentages(train=50.0, validate=30.0, test=30.0)
        with self.assertRaises(ValueError):
            SplitPercentages(train=110.0, discard=-10.0)
        SplitPercentages(train=49.995, validate=50.0)


class TestIngestCsv(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.directory = tempfile.TemporaryDirectory()
        cls.path = os.path.join(cls.directory.name, "states.csv")
        cls.frame = write_state_table(cls.path)
        cls.spec = IngestSpec(path=cls.path, source_column="state", label_column="purchased",
                              one_hot_columns=["car_value"], splits=STATE_SPLITS, loss="ridge-logistic", seed=11)
        cls.suite, cls.splits = ingest_csv_with_splits(cls.spec)

    @classmethod
    def tearDownClass(cls):
        cls.directory.cleanup()

    def test_split_counts(self):
        self.assertEqual([split.source for split in self.splits], ["CT", "FL", "OH"])
        for split in self.splits:
            expected = EXPECTED_COUNTS[split.source]
            self.assertEqual(split.csv_row(), (split.source, STATE_SIZES[split.source], expected["train"],
                                               expected["validate"], expected["test"], expected["discard"]))

    def test_splits_partition_rows(self):
        states = self.frame["state"].to_numpy()
        for split in self.splits:
            parts = [split.train, split.validate, split.test, split.discard]
            combined = np.concatenate(parts)
            self.assertEqual(combined.size, np.unique(combined).size)
            np.testing.assert_array_equal(np.sort(combined), np.flatnonzero(states == split.source))

    def test_suite(self):
        self.assertEqual(self.suite.K, 3)
        self.assertEqual([len(source) for source in self.suite.sources], [1419, 7206, 149])
        self.assertEqual([source.name for source in self.suite.sources], ["CT", "FL", "OH"])
        self.assertIsNone(self.suite.true_mixture)
        self.assertEqual(len(self.suite.validation), 23 + 212 + 49)
        self.assertEqual(len(self.suite.test), 73 + 1205 + 149)
        # age, cost and three car_value indicators
        self.assertEqual(self.suite.sources[0].x_dim, 5)
        self.assertTrue(set(np.unique(self.suite.validation.y)) <= {-1.0, 1.0})

    def test_deterministic(self):
        _, again = ingest_csv_with_splits(self.spec)
        for first, second in zip(self.splits, again):
            np.testing.assert_array_equal(first.train, second.train)
        _, reseeded = ingest_csv_with_splits(self.spec.model_copy(update={"seed": 12}))
        self.assertFalse(np.array_equal(self.splits[1].train, reseeded[1].train))

    def test_default_split(self):
        spec = self.spec.model_copy(update={"splits": {}, "default_split": SplitPercentages(train=80.0, validate=20.0)})
        suite = ingest_csv(spec)
        self.assertEqual(len(suite.sources[0]), 2836 - 567)

    def test_splits_csv(self):
        out = os.path.join(self.directory.name, "ingest_splits.csv")
        write_ingest_splits(self.splits, out)
        with open(out, encoding="utf-8") as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[0], ",".join(INGEST_SPLITS_HEADER))
        self.assertEqual(lines[2], "FL,14605,7206,23,73,7303")

    def test_missing_column(self):
        with self.assertRaises(IngestError):
            ingest_csv(self.spec.model_copy(update={"label_column": "bought"}))

    def test_categorical_needs_encoding(self):
        with self.assertRaises(IngestError):
            ingest_csv(self.spec.model_copy(update={"one_hot_columns": []}))

    def test_empty_training_split(self):
        splits = dict(STATE_SPLITS, OH=SplitPercentages(train=0.0, validate=50.0, discard=50.0))
        with self.assertRaises(IngestError):
            ingest_csv(self.spec.model_copy(update={"splits": splits}))

    def test_numeric_source_codes(self):
        codes = {"FL": 12, "CT": 9, "OH": 39}
        path = os.path.join(self.directory.name, "codes.csv")
        self.frame.assign(state=self.frame["state"].map(codes)).to_csv(path, index=False)
        # unquoted YAML keys arrive as ints
        spec = IngestSpec.model_validate({
            "path": path, "source_column": "state", "label_column": "purchased", "one_hot_columns": ["car_value"],
            "splits": {codes[state]: split.model_dump(by_alias=True) for state, split in STATE_SPLITS.items()},
        })
        self.assertEqual(sorted(spec.splits), ["12", "39", "9"])
        _, splits = ingest_csv_with_splits(spec)
        names = {str(code): state for state, code in codes.items()}
        for split in splits:
            self.assertEqual(split.csv_row()[2], EXPECTED_COUNTS[names[split.source]]["train"])

    def test_missing_file(self):
        with self.assertRaises(IngestError):
            ingest_csv(self.spec.model_copy(update={"path": os.path.join(self.directory.name, "absent.csv")}))


if __name__ == '__main__':
    unittest.main()
