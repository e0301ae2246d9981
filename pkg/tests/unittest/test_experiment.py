import csv
import os
import tempfile
import unittest

from mixmatch.common.mixmatch_errors import SuiteConfigError
from mixmatch.data_models.experiment_config_data import ExperimentConfigModel
from mixmatch.harness.experiment import (REGRET_CURVE_HEADER, REGRET_SUMMARY_HEADER, experiment_cells,
                                         run_experiment)
from tests.unittest.suite_fixtures import finite_suite, scalar_suite


def read_rows(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


class TestExperiment(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.config = ExperimentConfigModel(algorithms=["genie", "mixmatch", "uniform"], lambdas=[4000, 2000],
                                            node_steps=100, replicas=2, seed=11, workers=2,
                                            out_dir=self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_cells_in_grid_order(self):
        cells = experiment_cells(self.config)
        self.assertEqual(len(cells), 12)
        self.assertEqual([(c.algorithm, c.Lambda, c.replica) for c in cells[:3]],
                         [("genie", 2000, 0), ("genie", 2000, 1), ("genie", 4000, 0)])
        self.assertEqual(len({c.seed for c in cells}), 12)

    def test_writes_curve_and_summary(self):
        report = run_experiment(self.config, scalar_suite())
        curve = read_rows(report.curve_path)
        summary = read_rows(report.summary_path)
        self.assertEqual(tuple(curve[0]), REGRET_CURVE_HEADER)
        self.assertEqual(tuple(summary[0]), REGRET_SUMMARY_HEADER)
        self.assertEqual(len(curve), 13)
        self.assertEqual(len(summary), 7)
        for row in summary[1:]:
            self.assertEqual(row[2], "2")
            self.assertEqual(row[3], "0")
        for outcome in report.outcomes:
            self.assertIsNone(outcome.error)
            self.assertGreaterEqual(outcome.regret, -1e-12)
            self.assertLessEqual(outcome.total_steps, outcome.cell.Lambda + 2 * self.config.node_steps)

    def test_summary_names_regret_kind_and_bounds(self):
        config = self.config.model_copy(update={"lambdas": [2000], "regret_kind": "mixture",
                                                "near_optimality_dim": 0.0, "near_optimality_const": 1.5})
        report = run_experiment(config, scalar_suite())
        summary = read_rows(report.summary_path)
        columns = {name: position for position, name in enumerate(summary[0])}
        rows = {row[0]: row for row in summary[1:]}
        for row in rows.values():
            self.assertEqual(row[columns["regret_kind"]], "mixture")
            self.assertEqual(row[columns["near_optimality_dim"]], "0.0")
            self.assertEqual(row[columns["near_optimality_const"]], "1.5")
        self.assertEqual(rows["genie"][columns["median_regret_bound"]], "")
        mixmatch = [r for r in report.reports if r.algorithm == "mixmatch"][0]
        self.assertEqual(float(rows["mixmatch"][columns["median_regret_bound"]]), mixmatch.median_regret_bound)
        self.assertGreater(mixmatch.median_regret_bound, 0.0)

    def test_default_regret_kind_is_model(self):
        config = self.config.model_copy(update={"algorithms": ["uniform"], "lambdas": [500], "replicas": 1})
        summary = read_rows(run_experiment(config, scalar_suite()).summary_path)
        self.assertEqual(summary[1][summary[0].index("regret_kind")], "model")

    def test_rerun_is_byte_identical(self):
        first = run_experiment(self.config, scalar_suite())
        with open(first.curve_path, "rb") as f:
            curve = f.read()
        other = self.config.model_copy(update={"workers": 1})
        second = run_experiment(other, scalar_suite())
        with open(second.curve_path, "rb") as f:
            self.assertEqual(f.read(), curve)

    def test_failed_cells_are_recorded(self):
        config = self.config.model_copy(update={"algorithms": ["genie", "uniform"], "lambdas": [1000]})
        report = run_experiment(config, finite_suite())
        genie = [o for o in report.outcomes if o.cell.algorithm == "genie"]
        self.assertTrue(all(o.error is not None and o.regret is None for o in genie))
        self.assertEqual(report.reports[0].failed, 2)
        self.assertEqual(report.reports[1].failed, 0)
        curve = read_rows(report.curve_path)
        self.assertEqual(curve[1][3], "")

    def test_rejects_unknown_algorithm(self):
        config = self.config.model_copy(update={"algorithms": ["mixmatch", "oracle"]})
        with self.assertRaises(ValueError):
            run_experiment(config, scalar_suite())

    def test_rejects_unknown_regret_kind(self):
        config = self.config.model_copy(update={"regret_kind": "loss"})
        with self.assertRaises(SuiteConfigError):
            run_experiment(config, scalar_suite())

    def test_output_directory_override(self):
        out_dir = os.path.join(self.tmp.name, "nested")
        config = self.config.model_copy(update={"algorithms": ["uniform"], "lambdas": [500], "replicas": 1})
        report = run_experiment(config, scalar_suite(), out_dir=out_dir)
        self.assertEqual(os.path.dirname(report.curve_path), out_dir)


if __name__ == '__main__':
    unittest.main()
