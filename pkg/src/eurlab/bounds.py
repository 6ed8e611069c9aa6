"""Lower bounds for sums of Shannon entropies of several observables.

``multi_observable_bound`` picks the best bound it can justify for a list
of bases on one system: a known tight value from the registry, the
Ballester-Wehner value for square dimensions, or the pairwise composition
of Maassen-Uffink bounds. ``certify_tightness`` checks a claimed bound by
minimizing the entropy sum numerically over pure states.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from . import linalg
from .errors import DomainError
from .observables import MeasurementBasis, is_mutually_unbiased, max_overlap
from .states import PureState, haar_vector

MUB_TOL = 1e-10

PROVENANCES = (
    "maassen_uffink",
    "pairwise_composition",
    "registry_qubit3",
    "registry_qutrit3",
    "registry_qutrit4",
    "ballester_wehner",
    "certified_numerical",
)


@dataclass(frozen=True)
class BoundValue:
    value: float
    tight: bool
    provenance: str

    def __post_init__(self):
        if self.value < 0:
            raise DomainError(f"bound must be nonnegative, got {self.value}")
        if self.provenance not in PROVENANCES:
            raise DomainError(f"unknown provenance {self.provenance!r}")

    def __str__(self):
        return f"{self.value:.9f} {'tight' if self.tight else 'loose'} {self.provenance}"


@dataclass(frozen=True)
class ScenarioBounds:
    """Single-system bound F1 and pair bound F2 for a symmetric scenario."""

    F1: float
    F2: float
    L: int
    F1_tight: bool = False
    F2_tight: bool = False

    def __post_init__(self):
        if not self.F2 >= self.F1 >= 0:
            raise DomainError(f"expected F2 >= F1 >= 0, got F1={self.F1}, F2={self.F2}")


def maassen_uffink(b1: MeasurementBasis, b2: MeasurementBasis) -> BoundValue:
    """-2 log2 c with c the maximal overlap; tight when the bases are unbiased."""
    c = max_overlap(b1, b2)
    value = max(-2.0 * float(np.log2(min(c, 1.0))), 0.0)
    return BoundValue(value, is_mutually_unbiased(b1, b2, MUB_TOL), "maassen_uffink")


def _registry(d: int, L: int) -> BoundValue | None:
    # only entries that are printed with their minimizers; d = 4, 5 are left out
    table = {
        (2, 3): BoundValue(2.0, True, "registry_qubit3"),
        (3, 3): BoundValue(3.0, True, "registry_qutrit3"),
        (3, 4): BoundValue(4.0, True, "registry_qutrit4"),
    }
    return table.get((d, L))


def _int_sqrt(d: int) -> int | None:
    r = int(round(np.sqrt(d)))
    return r if r * r == d else None


def multi_observable_bound(bases: Sequence[MeasurementBasis]) -> BoundValue:
    """Best known lower bound on sum_i H(A_i) for the given eigenbases.

    Candidates are collected and the largest value wins; on a tie a tight
    candidate is preferred over a loose one.
    """
    bases = list(bases)
    L = len(bases)
    if L < 2:
        raise DomainError(f"need at least two observables, got {L}")
    d = bases[0].dim
    if any(b.dim != d for b in bases):
        raise DomainError("all bases must share one dimension")
    key = tuple(sorted(b.key() for b in bases))
    hit = _BOUND_CACHE.get(key)
    if hit is None:
        hit = _BOUND_CACHE[key] = _best_bound(bases)
    return hit


_BOUND_CACHE: dict[tuple, BoundValue] = {}


def _best_bound(bases: list[MeasurementBasis]) -> BoundValue:
    L, d = len(bases), bases[0].dim
    pair_bounds = [maassen_uffink(a, b) for a, b in itertools.combinations(bases, 2)]
    candidates = []
    if L == 2:
        candidates.append(pair_bounds[0])
    else:
        candidates.append(
            BoundValue(float(sum(q.value for q in pair_bounds)) / (L - 1), False, "pairwise_composition")
        )
    unbiased = all(q.tight for q in pair_bounds)
    if unbiased:
        reg = _registry(d, L)
        if reg is not None:
            candidates.append(reg)
        r = _int_sqrt(d)
        if r is not None and r > 1 and L <= r:
            candidates.append(BoundValue(0.5 * L * float(np.log2(d)), True, "ballester_wehner"))
    # stable: first-listed wins among equal (value, tight)
    return max(candidates, key=lambda b: (round(b.value, 12), b.tight))


def product_bases(setting: Sequence[MeasurementBasis], label: str = "") -> MeasurementBasis:
    """The eigenbasis of a product observable A_1 x A_2 x ... as one basis."""
    vecs = linalg.kron(*[b.vectors for b in setting])
    return MeasurementBasis(vecs, label or "x".join(b.label for b in setting))


def scenario_bounds(per_site_bases: Sequence[Sequence[MeasurementBasis]]) -> ScenarioBounds:
    """F1 and F2 for sites that all measure the same list of L bases.

    F1 is the single-system bound. F2 bounds sum_j H(V_j, W_j) for any pair of
    sites over all two-site states, entangled ones included: for qubits with
    the three Pauli bases it is the tight value 3 attained by Bell states;
    otherwise the product bases V_j x W_j are treated as bases of the d^2
    system and bounded with ``multi_observable_bound``, never below F1.
    Outside the qubit case and L = 2 the result is flagged not tight.
    """
    sites = [list(s) for s in per_site_bases]
    if len(sites) < 2:
        raise DomainError("scenario bounds need at least two sites")
    ref = sites[0]
    for k, s in enumerate(sites[1:], start=1):
        if len(s) != len(ref) or any(a.key() != b.key() for a, b in zip(s, ref)):
            raise DomainError(f"site {k} does not measure the same bases as site 0")
    L = len(ref)
    f1 = multi_observable_bound(ref)
    d = ref[0].dim
    if d == 2 and L == 3 and f1.provenance == "registry_qubit3":
        return ScenarioBounds(float(f1.value), 3.0, L, bool(f1.tight), True)
    pair = multi_observable_bound([product_bases((b, b)) for b in ref])
    f2 = max(pair.value, f1.value)
    # two observables are additive, so F2 = 2 F1 is attained when F1 is
    additive = L == 2 and f1.tight and abs(f2 - 2 * f1.value) < 1e-12
    return ScenarioBounds(float(f1.value), float(f2), L, bool(f1.tight), bool(additive))


# ---------------------------------------------------------------------------
# numerical certification


@dataclass(frozen=True)
class Certificate:
    min_found: float
    argmin: PureState
    claimed_bound: float
    hit_iteration_cap: bool
    restarts: int

    @property
    def gap(self) -> float:
        return self.min_found - self.claimed_bound


def params_to_amplitudes(x: np.ndarray, dim: int) -> np.ndarray:
    """Hyperspherical angles x[:dim-1] and relative phases x[dim-1:] -> unit vector.

    The first amplitude carries no phase, which removes the global-phase
    redundancy.
    """
    theta, phi = x[: dim - 1], x[dim - 1:]
    r = np.empty(dim)
    s = 1.0
    for k in range(dim - 1):
        r[k] = s * np.cos(theta[k])
        s *= np.sin(theta[k])
    r[dim - 1] = s
    amps = r.astype(complex)
    amps[1:] *= np.exp(1j * phi)
    return amps


def amplitudes_to_params(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    if abs(v[0]) > 0:
        v = v * (abs(v[0]) / v[0])
    dim = v.size
    mag = np.abs(v)
    theta = np.empty(dim - 1)
    for k in range(dim - 1):
        tail = np.linalg.norm(mag[k + 1:])
        theta[k] = np.arctan2(tail, mag[k])
    phi = np.angle(v[1:])
    return np.concatenate([theta, phi])


class _EntropySum:
    """sum_j H(outcomes of the j-th product setting) as a function of a pure state."""

    def __init__(self, settings: Sequence[Sequence[MeasurementBasis]]):
        rows = [product_bases(s).vectors.conj().T for s in settings]
        self.dim = rows[0].shape[0]
        self.L = len(rows)
        self.stack = np.vstack(rows)

    def of_vector(self, v: np.ndarray) -> float:
        p = np.abs(self.stack @ v) ** 2
        p = p[p > 1e-14]
        return float(-np.sum(p * np.log2(p)))

    def __call__(self, x: np.ndarray) -> float:
        return self.of_vector(params_to_amplitudes(x, self.dim))


def _nelder_mead(f, x0, max_iter: int):
    res = minimize(
        f,
        x0,
        method="Nelder-Mead",
        options={"xatol": 5e-10, "fatol": np.inf, "maxiter": max_iter, "maxfev": 20 * max_iter},
    )
    return res.x, float(res.fun), res.nit >= max_iter


def certify_tightness(
    per_site_bases: Sequence[Sequence[MeasurementBasis]],
    claimed_bound: float,
    restarts: int = 64,
    seed: int = 0,
    max_iter: int = 5000,
) -> Certificate:
    """Minimize sum_j H(V_1^j, ..., V_n^j) over pure states of all sites jointly.

    Each restart starts Nelder-Mead from a Haar-random state, then restarts
    it once from its own optimum; the best of all restarts is returned.
    Deterministic for a fixed seed.
    """
    if restarts < 1:
        raise DomainError("restarts must be >= 1")
    sites = [list(s) for s in per_site_bases]
    counts = {len(s) for s in sites}
    if len(counts) != 1:
        raise DomainError("all sites need the same number of bases")
    settings = [tuple(s[j] for s in sites) for j in range(counts.pop())]
    objective = _EntropySum(settings)
    dims = tuple(s[0].dim for s in sites)
    dim = objective.dim

    best_x, best_f, capped = None, np.inf, False
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        x0 = amplitudes_to_params(haar_vector(dim, rng))
        x, fx, cap1 = _nelder_mead(objective, x0, max_iter)
        x, fx, cap2 = _nelder_mead(objective, x, max_iter)
        if fx < best_f:
            best_x, best_f, capped = x, fx, cap1 or cap2
    amps = params_to_amplitudes(best_x, dim)
    return Certificate(best_f, PureState(dims, amps / np.linalg.norm(amps)), float(claimed_bound), capped, restarts)
