"""A small script to benchmark the solver on seeded synthetic instances."""

import time

import numpy as np

from prooflist import BitVector, LabeledDataset, SolverConfig, solve
from prooflist.config import Ablation
from prooflist.dataset import Antecedent, AntecedentSet


def random_dataset(n: int, m: int, seed: int) -> LabeledDataset:
    rng = np.random.default_rng(seed)
    features = rng.random((n, m)) < 0.3
    # Labels follow two of the features, with some noise
    labels = (features[:, 0] & ~features[:, 1]) | (rng.random(n) < 0.1)
    antecedents = AntecedentSet(
        [Antecedent(j, f"f{j}", BitVector.from_numpy(features[:, j]), token=f"{{f{j}}}") for j in range(m)], n
    )
    return LabeledDataset.from_antecedents(antecedents, BitVector.from_numpy(labels))


def run_benchmark(dataset: LabeledDataset, config: SolverConfig) -> float:
    start = time.time()
    result = solve(dataset, config)
    end = time.time()
    print(f"{sorted(a.value for a in config.ablations) or 'full'}: objective {result.best_objective:.4f}, "
          f"{result.counters.lower_bound_evaluations} lower bound evaluations, {result.status.value}")
    return end - start


dataset = random_dataset(2000, 20, seed=1)
full = run_benchmark(dataset, SolverConfig(regularization=0.01))
no_symmap = run_benchmark(dataset, SolverConfig(regularization=0.01, ablations={Ablation.NO_SYMMAP}))

print(f"     Time (full): {full:0.4}s")
print(f"Time (no symmap): {no_symmap:0.4}s")
