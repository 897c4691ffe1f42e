"""Shared fixtures: the seeded random model corpus used across the suite."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pytest

from maxlindag import (
    WeightedModel,
    mlcm_from_weights,
    random_weighted_model,
    reachability_matrix,
    standardize,
    tdm_from_std_mlcm,
)

CORPUS_SEED = 20250801
CORPUS_SIZE = 1000
ALPHAS = (0.5, 1.0, 2.0)
KINDS = ("general", "polytree", "homogeneous")


@dataclass(frozen=True, eq=False)
class CorpusEntry:
    index: int
    kind: str
    model: WeightedModel
    bbar: np.ndarray
    chi: np.ndarray
    reach: np.ndarray

    @property
    def dag(self):
        return self.model.dag

    @property
    def alpha(self) -> float:
        return self.model.alpha

    @property
    def is_max_weighted_kind(self) -> bool:
        return self.kind in ("polytree", "homogeneous")


def build_corpus(count: int = CORPUS_SIZE, seed: int = CORPUS_SEED) -> list[CorpusEntry]:
    rng = np.random.default_rng(seed)
    entries = []
    for index in range(count):
        kind = KINDS[index % len(KINDS)]
        d = int(rng.integers(1, 9))
        density = float(rng.uniform(0.1, 0.9))
        alpha = float(ALPHAS[int(rng.integers(0, len(ALPHAS)))])
        model = random_weighted_model(
            d,
            density=density,
            weight_range=(0.5, 2.0),
            alpha=alpha,
            seed_or_rng=rng,
            polytree=kind == "polytree",
            homogeneous=kind == "homogeneous",
        )
        bbar = standardize(mlcm_from_weights(model), model.alpha)
        chi = tdm_from_std_mlcm(bbar)
        entries.append(
            CorpusEntry(index, kind, model, bbar, chi, reachability_matrix(model.dag))
        )
    return entries


@pytest.fixture(scope="session")
def corpus() -> list[CorpusEntry]:
    return build_corpus()


@pytest.fixture(scope="session")
def rmwm_corpus(corpus) -> list[CorpusEntry]:
    return [entry for entry in corpus if entry.is_max_weighted_kind]
