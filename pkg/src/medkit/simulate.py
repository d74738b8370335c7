"""Monte Carlo estimate of the success probability of a measurement.

Trial ``t`` draws the state from the priors with the counter-based
uniform ``2t`` and the outcome from the Born rule with uniform ``2t + 1``.
Because each trial only depends on its index, splitting the trials into
shards gives bit-identical totals for any shard count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .ensembles import TwoSetEnsemble
from .errors import InvalidDistribution
from .povm import Povm
from .rng import SplitMix64

NEG_CLAMP = 1e-10
SUM_TOL = 1e-9


@dataclass(frozen=True)
class SimResult:
    trials: int
    successes: int
    seed: int
    shards: int = 1

    @property
    def p_hat(self) -> float:
        return self.successes / self.trials

    @property
    def stderr(self) -> float:
        p = self.p_hat
        return math.sqrt(max(p * (1 - p), 0.0) / self.trials)

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "successes": self.successes,
            "p_hat": self.p_hat,
            "stderr": self.stderr,
            "seed": self.seed,
            "shards": self.shards,
        }


def born_probabilities(rho: np.ndarray, elements: np.ndarray) -> np.ndarray:
    """``Tr(rho Pi_i)`` for every element, checked to form a distribution."""
    probs = np.real(np.einsum("ab,iba->i", rho, elements))
    if probs.min() < -NEG_CLAMP:
        raise InvalidDistribution(f"negative outcome probability {probs.min():.3e}")
    probs = np.clip(probs, 0.0, None)
    total = probs.sum()
    if abs(total - 1.0) > SUM_TOL:
        raise InvalidDistribution(f"outcome probabilities sum to {total!r}")
    return probs / total


def _cdf(p: np.ndarray) -> np.ndarray:
    c = np.cumsum(p)
    c[-1] = 1.0
    return c


def sample_outcome(rho: np.ndarray, P: Povm, rng: SplitMix64) -> int:
    """One Born-rule outcome index drawn with ``rng.random()``."""
    c = _cdf(born_probabilities(rho, P.elements))
    return int(min(np.searchsorted(c, rng.random(), side="right"), len(c) - 1))


def monte_carlo_success(
    e: TwoSetEnsemble,
    P: Povm,
    trials: int,
    seed: int = 0,
    shards: int = 1,
) -> SimResult:
    """Fraction of trials whose outcome names the prepared state."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if shards < 1:
        raise ValueError("shards must be >= 1")
    if P.N != e.N or P.d != e.d:
        raise ValueError("POVM does not match the ensemble")
    prior_cdf = _cdf(e.priors / e.priors.sum())
    outcome_cdf = np.array([_cdf(born_probabilities(r, P.elements)) for r in e.states])
    edges = np.linspace(0, trials, shards + 1).astype(np.int64)
    hits = sum(
        kernels.count_successes(prior_cdf, outcome_cdf, seed, int(lo), int(hi))
        for lo, hi in zip(edges[:-1], edges[1:])
    )
    return SimResult(trials, int(hits), seed, shards)
