"""Forward simulation and limit distributions for max-linear models.

Sampling evaluates the noise representation ``X_i = max_j b_ji * Z_j``
directly with i.i.d. regularly varying noise (Pareto or Frechet, both by
inverse-CDF transform).  The empirical tail dependence estimator is the
standard exceedance ratio above empirical marginal quantiles.  The limit
distribution of scaled componentwise maxima is available in closed form for
Monte Carlo validation: ``2 + log G_ij`` at the unit-Frechet scale points
reproduces the tail dependence coefficient exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TailSampleError, ValidationError
from .mlcm import WeightedModel, mlcm_from_weights

_FAMILIES = ("pareto", "frechet")


@dataclass(frozen=True)
class NoiseSpec:
    """Noise family and tail index.

    Pareto has survival ``x**-alpha`` on [1, inf); Frechet has CDF
    ``exp(-x**-alpha)`` on (0, inf).  Both are regularly varying with index
    ``alpha`` and lead to the same tail dependence matrix.
    """

    family: str
    alpha: float

    def __post_init__(self):
        family = str(self.family).strip().lower().replace("é", "e")
        if family not in _FAMILIES:
            raise ValidationError(f"unsupported noise family {self.family!r}; use {_FAMILIES}")
        alpha = float(self.alpha)
        if not np.isfinite(alpha) or alpha <= 0:
            raise ValidationError(f"tail index must be finite and positive, got {alpha}")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "alpha", alpha)


@dataclass(frozen=True, eq=False)
class SampleBlock:
    """Independent draws of a model, one per row, with their provenance."""

    values: np.ndarray
    seed: int
    model: WeightedModel
    noise: NoiseSpec

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _draw_noise(rng: np.random.Generator, noise: NoiseSpec, shape: tuple[int, ...]) -> np.ndarray:
    # Inverse-CDF sampling; u clamped into the open interval to keep the
    # transforms finite.
    u = rng.random(shape)
    np.clip(u, 1e-300, 1.0 - 1e-16, out=u)
    if noise.family == "pareto":
        return u ** (-1.0 / noise.alpha)
    return (-np.log(u)) ** (-1.0 / noise.alpha)


def _evaluate(mlcm: np.ndarray, z: np.ndarray) -> np.ndarray:
    d = mlcm.shape[0]
    x = np.empty_like(z)
    for i in range(d):
        x[:, i] = (z * mlcm[:, i]).max(axis=1)
    return x


def sample(model: WeightedModel, noise: NoiseSpec, n: int, seed: int) -> SampleBlock:
    """Draw ``n`` independent copies of the model, reproducibly per seed.

    The noise tail index must match the model's; mixing indices would
    silently change the standardized coefficient matrix the sample reflects.
    """
    if n < 1:
        raise ValidationError(f"sample size must be at least 1, got {n}")
    if noise.alpha != model.alpha:
        raise ValidationError(
            f"noise tail index {noise.alpha} differs from model tail index {model.alpha}"
        )
    rng = np.random.default_rng(seed)
    z = _draw_noise(rng, noise, (int(n), model.d))
    return SampleBlock(_evaluate(mlcm_from_weights(model), z), int(seed), model, noise)


def empirical_tdm(block: SampleBlock, u: float) -> np.ndarray:
    """Empirical tail dependence matrix at quantile level ``u``.

    chi_hat(i, j) pools the two conditional exceedance ratios:
    ``2 * #{both exceed} / (#{i exceeds} + #{j exceeds})`` with empirical
    marginal quantiles.  Requires at least 50 expected tail exceedances.
    """
    if not 0.0 < u < 1.0:
        raise ValidationError(f"quantile level must lie in (0, 1), got {u}")
    n = block.n
    if n * (1.0 - u) < 50.0:
        raise TailSampleError(
            f"only {n * (1.0 - u):.1f} expected exceedances at u={u} with n={n}; "
            "need at least 50"
        )
    values = block.values
    quantiles = np.quantile(values, u, axis=0)
    exceed = values > quantiles[None, :]
    counts = exceed.sum(axis=0)
    if (counts == 0).any():
        raise TailSampleError("a margin has no exceedances above its empirical quantile")
    joint = exceed.T.astype(np.float64) @ exceed.astype(np.float64)
    chi = 2.0 * joint / (counts[:, None] + counts[None, :])
    np.fill_diagonal(chi, 1.0)
    return chi


def limit_cdf(
    model: WeightedModel,
    x: float | tuple[float, float] | np.ndarray,
    i: int | None = None,
    j: int | None = None,
) -> float:
    """Limit distribution G of scaled componentwise maxima, evaluated at ``x``.

    With no node arguments, ``x`` is a full positive vector and

        G(x) = exp(-sum_j max_{i in De(j)} (b_ji / x_i)**alpha).

    With ``i`` alone, the Frechet marginal ``G_i``; with both ``i`` and
    ``j``, the bivariate marginal ``G_ij`` at ``x = (x_i, x_j)``.  The
    normalizing sequence is ``n**(1/alpha)``.
    """
    b = mlcm_from_weights(model)
    alpha = model.alpha
    if i is None and j is not None:
        raise ValidationError("a bivariate evaluation needs both node arguments")
    if i is not None:
        model.dag._check_node(i)
    if j is not None:
        model.dag._check_node(j)

    if i is not None and j is not None:
        xi, xj = (float(v) for v in np.asarray(x, dtype=float).reshape(2))
        if xi <= 0 or xj <= 0:
            raise ValidationError("evaluation point must be strictly positive")
        rates = np.maximum((b[:, i - 1] / xi) ** alpha, (b[:, j - 1] / xj) ** alpha)
        return float(np.exp(-rates.sum()))
    if i is not None:
        xi = float(np.asarray(x, dtype=float).reshape(()))
        if xi <= 0:
            raise ValidationError("evaluation point must be strictly positive")
        return float(np.exp(-(xi**-alpha) * (b[:, i - 1] ** alpha).sum()))

    point = np.asarray(x, dtype=float).reshape(model.d)
    if (point <= 0).any():
        raise ValidationError("evaluation point must be strictly positive")
    total = 0.0
    for row in range(model.d):
        support = b[row] > 0
        total += ((b[row, support] / point[support]) ** alpha).max()
    return float(np.exp(-total))


def unit_frechet_points(model: WeightedModel) -> np.ndarray:
    """Per-margin scale points where ``-1/log G_i`` equals one.

    At these points ``2 + log G_ij`` equals the tail dependence coefficient
    of the pair.
    """
    b = mlcm_from_weights(model)
    return (b**model.alpha).sum(axis=0) ** (1.0 / model.alpha)


def scaled_block_maxima(
    model: WeightedModel,
    noise: NoiseSpec,
    block_size: int,
    n_blocks: int,
    seed: int,
    chunk_blocks: int = 128,
) -> np.ndarray:
    """Componentwise block maxima scaled by ``block_size**(-1/alpha)``.

    Returns an ``(n_blocks, d)`` array whose rows converge in distribution
    to the limit law of :func:`limit_cdf`.  Blocks are generated in chunks,
    each chunk from its own generator seeded by ``(seed, chunk_index)``;
    results are bit-reproducible for a fixed ``(seed, chunk_blocks)`` pair
    and chunks could be generated concurrently without changing them.
    """
    if block_size < 1 or n_blocks < 1:
        raise ValidationError("block size and block count must be at least 1")
    if noise.alpha != model.alpha:
        raise ValidationError(
            f"noise tail index {noise.alpha} differs from model tail index {model.alpha}"
        )
    b = mlcm_from_weights(model)
    scale = float(block_size) ** (-1.0 / model.alpha)
    out = np.empty((n_blocks, model.d))
    done = 0
    chunk_index = 0
    while done < n_blocks:
        take = min(chunk_blocks, n_blocks - done)
        rng = np.random.default_rng(np.random.SeedSequence((int(seed), chunk_index)))
        z = _draw_noise(rng, noise, (take * block_size, model.d))
        x = _evaluate(b, z).reshape(take, block_size, model.d)
        out[done : done + take] = x.max(axis=1) * scale
        done += take
        chunk_index += 1
    return out
