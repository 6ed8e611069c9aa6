"""Born-rule outcome distributions and Shannon entropies of local measurements."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .observables import MeasurementBasis
from .states import DensityMatrix, PureState

ZERO_CUTOFF = 1e-14
SUM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ProbabilityDistribution:
    """Joint outcome probabilities, stored as an array with one axis per site."""

    probabilities: np.ndarray

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=float)
        if np.any(p < -1e-12):
            raise DomainError(f"negative probability {p.min():.3e}")
        p = np.clip(p, 0.0, None)
        total = p.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise DomainError(f"probabilities sum to {total!r}")
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    @property
    def outcome_shape(self) -> tuple[int, ...]:
        return self.probabilities.shape

    def marginal(self, sites: Sequence[int]) -> "ProbabilityDistribution":
        """Sum out every site not in ``sites``; kept axes stay in ascending order."""
        sites = sorted(set(sites))
        n = self.probabilities.ndim
        if not sites or any(s < 0 or s >= n for s in sites):
            raise DomainError(f"invalid site selection {sites} for {n} sites")
        drop = tuple(k for k in range(n) if k not in sites)
        return ProbabilityDistribution(self.probabilities.sum(axis=drop))


def _check_bases(dims, bases):
    if len(bases) != len(dims):
        raise DomainError(f"{len(bases)} bases given for {len(dims)} sites")
    for k, (d, b) in enumerate(zip(dims, bases)):
        if b.dim != d:
            raise DomainError(f"site {k}: basis dimension {b.dim} does not match site dimension {d}")


def born_distribution(state, bases: Sequence[MeasurementBasis]) -> ProbabilityDistribution:
    """p(j1..jn) = <j1..jn| rho |j1..jn> for the product of the given local bases."""
    dims = state.dims
    _check_bases(dims, bases)
    n = len(dims)
    if isinstance(state, PureState):
        t = state.amplitudes.reshape(dims)
        for k, b in enumerate(bases):
            t = np.moveaxis(np.tensordot(b.vectors.conj().T, t, axes=([1], [k])), 0, k)
        p = np.abs(t) ** 2
    elif isinstance(state, DensityMatrix):
        t = state.matrix.reshape(dims + dims)
        for k, b in enumerate(bases):
            t = np.moveaxis(np.tensordot(b.vectors.conj().T, t, axes=([1], [k])), 0, k)
            t = np.moveaxis(np.tensordot(t, b.vectors, axes=([n + k], [0])), -1, n + k)
        total = int(np.prod(dims))
        p = np.real(np.diagonal(t.reshape(total, total))).reshape(dims)
    else:
        raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")
    return ProbabilityDistribution(p)


def shannon_entropy(p) -> float:
    """Entropy in bits; entries below 1e-14 count as exact zeros."""
    if isinstance(p, ProbabilityDistribution):
        p = p.probabilities
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > ZERO_CUTOFF]
    return float(-np.sum(p * np.log2(p))) + 0.0


def joint_entropy(state, bases: Sequence[MeasurementBasis]) -> float:
    return shannon_entropy(born_distribution(state, bases))


def conditional_entropy(
    state,
    conditioned: Sequence[int],
    conditioning: Sequence[int],
    bases: Sequence[MeasurementBasis],
) -> float:
    """H(conditioned | conditioning) = H(all) - H(conditioning), from one joint distribution."""
    n = len(state.dims)
    a, b = set(conditioned), set(conditioning)
    if a & b or (a | b) != set(range(n)) or not a or not b:
        raise DomainError(
            f"partition {sorted(a)} | {sorted(b)} must split sites 0..{n - 1} into two nonempty parts"
        )
    dist = born_distribution(state, bases)
    return shannon_entropy(dist) - shannon_entropy(dist.marginal(sorted(b)))


def marginal_entropy(state, sites: Sequence[int], bases: Sequence[MeasurementBasis]) -> float:
    """Shannon entropy of the outcomes on ``sites``, read off the full joint distribution."""
    return shannon_entropy(born_distribution(state, bases).marginal(sites))
