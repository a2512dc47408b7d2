"""Seeded random draws from the four count models."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .stats import CountSample, ModelParams, NBParams, PoissonParams, ZINBParams, ZIPParams

__all__ = ["RngStream", "sample", "zero_fraction_expected"]


@dataclass
class RngStream:
    """Independent generator keyed by ``(seed, stream_id)``.

    Streams come from ``SeedSequence(seed, spawn_key=(stream_id,))``, the same
    construction ``SeedSequence.spawn`` uses, so distinct ids give independent
    streams and the pair alone fixes the output.
    """

    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if self.seed < 0 or self.stream_id < 0:
            raise DomainError("seed and stream_id must be non-negative")
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        self.generator = np.random.Generator(np.random.PCG64(ss))


def _base_draw(params, n, gen):
    if isinstance(params, (PoissonParams, ZIPParams)):
        return gen.poisson(params.theta, n)
    # gamma-Poisson mixture: shape gamma, mean kappa
    lam = gen.gamma(params.gamma, params.kappa / params.gamma, n)
    return gen.poisson(lam)


def sample(params: ModelParams, n: int, rng: RngStream) -> CountSample:
    """Draw ``n`` independent counts from ``params``.

    Zero-inflated models draw the Bernoulli(``alpha``) structural-zero
    indicator first, then the base variate for every position.
    """
    if not isinstance(params, (PoissonParams, NBParams, ZIPParams, ZINBParams)):
        raise DomainError(f"unknown parameter object {params!r}")
    n = int(n)
    if n < 1:
        raise DomainError("n must be at least 1")
    gen = rng.generator if isinstance(rng, RngStream) else rng
    if isinstance(params, (ZIPParams, ZINBParams)):
        structural = gen.random(n) < params.alpha
        y = _base_draw(params, n, gen)
        y[structural] = 0
    else:
        y = _base_draw(params, n, gen)
    return CountSample(y.astype(np.int64))


def zero_fraction_expected(params: ModelParams) -> float:
    """Probability of a zero count under ``params``."""
    if isinstance(params, PoissonParams):
        return math.exp(-params.theta)
    if isinstance(params, ZIPParams):
        return params.alpha + (1.0 - params.alpha) * math.exp(-params.theta)
    if isinstance(params, (NBParams, ZINBParams)):
        p0 = math.exp(-params.gamma * math.log1p(params.kappa / params.gamma))
        if isinstance(params, NBParams):
            return p0
        return params.alpha + (1.0 - params.alpha) * p0
    raise DomainError(f"unknown parameter object {params!r}")
