"""Seeded random instance generation for tests, benchmarks, and the CLI."""
from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .graph import Dag
from .mlcm import WeightedModel, homogeneous_model


def _as_rng(seed_or_rng: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(int(seed_or_rng))


def random_dag(d: int, density: float, seed_or_rng: int | np.random.Generator) -> Dag:
    """Random DAG: upper-triangular edge inclusion under a random node relabeling.

    ``density`` is the inclusion probability of each of the d*(d-1)/2
    candidate edges.
    """
    if d < 1:
        raise ValidationError(f"node count must be at least 1, got {d}")
    if not 0.0 <= density <= 1.0:
        raise ValidationError(f"edge density must lie in [0, 1], got {density}")
    rng = _as_rng(seed_or_rng)
    label = rng.permutation(d) + 1
    edges = set()
    for a in range(d):
        for b in range(a + 1, d):
            if rng.random() < density:
                edges.add((int(label[a]), int(label[b])))
    return Dag(d, edges)


def random_polytree(d: int, seed_or_rng: int | np.random.Generator) -> Dag:
    """Random polytree: a random attachment tree with random edge orientation.

    The underlying undirected graph is a tree, so at most one path joins any
    two nodes and every model on the result is max-weighted.
    """
    if d < 1:
        raise ValidationError(f"node count must be at least 1, got {d}")
    rng = _as_rng(seed_or_rng)
    label = rng.permutation(d) + 1
    edges = set()
    for v in range(2, d + 1):
        u = int(rng.integers(1, v))
        a, b = int(label[u - 1]), int(label[v - 1])
        if rng.random() < 0.5:
            a, b = b, a
        edges.add((a, b))
    return Dag(d, edges)


def random_weighted_model(
    d: int,
    density: float = 0.5,
    weight_range: tuple[float, float] = (0.5, 2.0),
    alpha: float = 1.0,
    seed_or_rng: int | np.random.Generator = 0,
    polytree: bool = False,
    homogeneous: bool = False,
) -> WeightedModel:
    """Random model with log-uniform weights on a random DAG.

    ``polytree`` draws the DAG as a random polytree (ignoring ``density``);
    ``homogeneous`` replaces the random weights with the ancestor-count
    weights that make every path max-weighted.
    """
    lo, hi = (float(w) for w in weight_range)
    if not 0 < lo <= hi:
        raise ValidationError(f"weight range must satisfy 0 < lo <= hi, got {weight_range}")
    rng = _as_rng(seed_or_rng)
    dag = random_polytree(d, rng) if polytree else random_dag(d, density, rng)
    if homogeneous:
        return homogeneous_model(dag, alpha)

    def draw() -> float:
        return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))

    weights = {edge: draw() for edge in sorted(dag.edges)}
    scales = tuple(draw() for _ in range(d))
    return WeightedModel(dag, weights, scales, alpha)
