import json
import os
import tempfile
import unittest
from fractions import Fraction

from prooflist import Ablation, SearchPolicy, SolverConfig, load_config
from prooflist.config import parse_ablations


class ConfigTest(unittest.TestCase):
    def setUp(self) -> None:
        self.dir = tempfile.TemporaryDirectory()

    def tearDown(self) -> None:
        self.dir.cleanup()

    def write(self, values) -> str:
        path = os.path.join(self.dir.name, "config.json")
        with open(path, "w") as fout:
            json.dump(values, fout)
        return path

    def test_packaged_defaults(self):
        config = load_config()
        assert config.regularization == Fraction(1, 100)
        assert config.policy is SearchPolicy.LOWER_BOUND
        assert config.max_nodes is None and config.max_seconds is None
        assert config.ablations == frozenset()
        assert config.trace_sample_interval == 4096

    def test_overrides(self):
        config = load_config(regularization="0.05", policy="bfs", max_nodes=None)
        assert config.regularization == Fraction(1, 20)
        assert config.policy is SearchPolicy.BFS
        assert config.max_nodes is None

    def test_user_file(self):
        config = load_config(self.write({"regularization": 0.005, "ablations": ["no_symmap"]}))
        assert config.regularization == Fraction(1, 200)
        assert config.has(Ablation.NO_SYMMAP)
        assert not config.has(Ablation.NO_LOOKAHEAD)

    def test_unknown_key(self):
        with self.assertRaises(ValueError):
            load_config(self.write({"lambda": 0.01}))

    def test_validation(self):
        with self.assertRaises(ValueError):
            SolverConfig(regularization=-1)
        with self.assertRaises(ValueError):
            SolverConfig(policy="sideways")
        with self.assertRaises(ValueError):
            SolverConfig(max_nodes=0)
        with self.assertRaises(ValueError):
            SolverConfig(ablations=["no_brakes"])

    def test_no_priority_means_breadth_first(self):
        config = SolverConfig(policy="curiosity", ablations=parse_ablations(["no_priority"]))
        assert config.effective_policy is SearchPolicy.BFS
        assert SolverConfig(policy="curiosity").effective_policy is SearchPolicy.CURIOSITY
