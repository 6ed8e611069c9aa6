"""Quantum states: pure-state families, density matrices, marginals and random states."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .errors import DomainError

NORM_TOL = 1e-12
STATE_TOL = 1e-10
PSD_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PureState:
    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != int(np.prod(dims)):
            raise DomainError(f"{amps.size} amplitudes do not fit dims {dims}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"state norm is {norm!r}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))

    def marginal(self, keep: Sequence[int]) -> "DensityMatrix":
        keep = tuple(keep)
        outer = np.outer(self.amplitudes, self.amplitudes.conj())
        reduced = linalg.partial_trace(outer, self.dims, keep)
        return DensityMatrix(tuple(self.dims[k] for k in keep), reduced)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        m = np.array(self.matrix, dtype=complex)
        total = int(np.prod(dims))
        if m.shape != (total, total):
            raise DomainError(f"matrix shape {m.shape} does not match dims {dims}")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > STATE_TOL:
            raise DomainError(f"density matrix is not Hermitian (deviation {herm:.3e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > STATE_TOL:
            raise DomainError(f"density matrix has trace {tr!r}")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)
        lo = self.eigenvalues()[0]
        if lo < -PSD_TOL:
            raise DomainError(f"density matrix has negative eigenvalue {lo:.3e}")

    def eigenvalues(self) -> np.ndarray:
        cached = self.__dict__.get("_eigenvalues")
        if cached is None:
            cached = linalg.eigvalsh(self.matrix)
            object.__setattr__(self, "_eigenvalues", cached)
        return cached

    def marginal(self, keep: Sequence[int]) -> "DensityMatrix":
        keep = tuple(keep)
        reduced = linalg.partial_trace(self.matrix, self.dims, keep)
        return DensityMatrix(tuple(self.dims[k] for k in keep), reduced)


def as_density(state) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, PureState):
        return state.density()
    raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")


def partial_trace(rho, keep: Sequence[int]) -> DensityMatrix:
    if not isinstance(rho, (PureState, DensityMatrix)):
        raise TypeError(f"expected PureState or DensityMatrix, got {type(rho).__name__}")
    return rho.marginal(keep)


def pure_to_density(psi: PureState) -> DensityMatrix:
    return psi.density()


def entropy_of_spectrum(eigenvalues) -> float:
    lam = np.clip(np.asarray(eigenvalues, dtype=float), 0.0, 1.0)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam))) + 0.0


def von_neumann_entropy(rho) -> float:
    """S(rho) in bits; eigenvalues are clamped to [0, 1] and 0 log 0 = 0."""
    return max(entropy_of_spectrum(as_density(rho).eigenvalues()), 0.0)


def marginal_entropies(state) -> list[float]:
    """von Neumann entropy of every single-site marginal."""
    if not isinstance(state, (PureState, DensityMatrix)):
        raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")
    return [von_neumann_entropy(state.marginal([k])) for k in range(len(state.dims))]


# ---------------------------------------------------------------------------
# state families

FAMILIES = ("bell_phi_plus", "eps_family", "qudit_schmidt", "ghz", "w", "three_qubit_general")


@dataclass(frozen=True)
class StateFamilySpec:
    """A named state family and its parameters.

    Parameters per family: ``eps_family`` takes ``eps``; ``qudit_schmidt``
    takes ``lambdas``; ``ghz`` takes ``l0``; ``w`` takes ``l0`` and ``l2``;
    ``three_qubit_general`` takes ``l0`` .. ``l4`` and ``phi``.
    """

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}; expected one of {FAMILIES}")


def _weight(name: str, x) -> float:
    x = float(x)
    if not np.isfinite(x) or x < 0.0 or x > 1.0:
        raise DomainError(f"parameter {name}={x!r} must lie in [0, 1]")
    return x


def _remainder(name: str, used: float) -> float:
    rest = 1.0 - used
    if rest < -NORM_TOL:
        raise DomainError(f"parameters are not normalizable: {name}^2 would be {rest!r}")
    return float(np.sqrt(max(rest, 0.0)))


def _require(params: dict, *names):
    missing = [n for n in names if n not in params]
    if missing:
        raise DomainError(f"missing parameter(s): {', '.join(missing)}")


def make_state(spec: StateFamilySpec) -> PureState:
    fam, p = spec.family, spec.params
    if fam == "bell_phi_plus":
        a = np.array([1, 0, 0, 1]) / np.sqrt(2.0)
        return PureState((2, 2), a)
    if fam == "eps_family":
        _require(p, "eps")
        eps = _weight("eps", p["eps"])
        a = np.zeros(4)
        a[0], a[3] = eps, _remainder("sqrt(1-eps^2)", eps * eps)
        return PureState((2, 2), a)
    if fam == "qudit_schmidt":
        _require(p, "lambdas")
        lam = np.array([_weight(f"lambda_{i}", x) for i, x in enumerate(p["lambdas"])])
        d = lam.size
        if d < 2:
            raise DomainError("qudit_schmidt needs at least two Schmidt weights")
        total = np.sum(lam ** 2)
        if abs(total - 1.0) > NORM_TOL:
            raise DomainError(f"Schmidt weights are not normalized: sum of squares = {total!r}")
        a = np.zeros(d * d)
        a[np.arange(d) * (d + 1)] = lam
        return PureState((d, d), a / np.linalg.norm(a))
    if fam == "ghz":
        _require(p, "l0")
        l0 = _weight("l0", p["l0"])
        a = np.zeros(8)
        a[0], a[7] = l0, _remainder("l4", l0 * l0)
        return PureState((2, 2, 2), a)
    if fam == "w":
        _require(p, "l0", "l2")
        l0, l2 = _weight("l0", p["l0"]), _weight("l2", p["l2"])
        a = np.zeros(8)
        a[0b000], a[0b101], a[0b110] = l0, l2, _remainder("l3", l0 * l0 + l2 * l2)
        return PureState((2, 2, 2), a)
    # three_qubit_general
    _require(p, "l0", "l1", "l2", "l3", "l4")
    lam = [_weight(f"l{i}", p[f"l{i}"]) for i in range(5)]
    total = sum(x * x for x in lam)
    if abs(total - 1.0) > NORM_TOL:
        raise DomainError(f"l0..l4 are not normalized: sum of squares = {total!r}")
    phi = float(p.get("phi", 0.0))
    a = np.zeros(8, dtype=complex)
    a[0b000] = lam[0]
    a[0b100] = lam[1] * np.exp(1j * phi)
    a[0b101], a[0b110], a[0b111] = lam[2], lam[3], lam[4]
    return PureState((2, 2, 2), a / np.linalg.norm(a))


# ---------------------------------------------------------------------------
# random states


def haar_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_pure(dims: Sequence[int], rng: np.random.Generator) -> PureState:
    dims = tuple(dims)
    return PureState(dims, haar_vector(int(np.prod(dims)), rng))


def _projector(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def _permute_sites(matrix: np.ndarray, dims: tuple[int, ...], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: the factor at position k moves to position order[k]."""
    n = len(dims)
    block_dims = tuple(dims[o] for o in order)
    t = matrix.reshape(block_dims + block_dims)
    inv = np.argsort(order)
    t = t.transpose(list(inv) + [n + i for i in inv])
    total = int(np.prod(dims))
    return t.reshape(total, total)


def random_separable(dims: Sequence[int], terms: int, rng: np.random.Generator) -> DensityMatrix:
    """Dirichlet(1) mixture of products of Haar-random single-site pure states."""
    dims = tuple(dims)
    if terms < 1:
        raise DomainError("terms must be >= 1")
    weights = rng.dirichlet(np.ones(terms))
    total = int(np.prod(dims))
    rho = np.zeros((total, total), dtype=complex)
    for w in weights:
        psi = linalg.kron(*[haar_vector(d, rng) for d in dims])
        rho += w * _projector(psi)
    rho /= np.trace(rho).real
    return DensityMatrix(dims, rho)


def random_biseparable_3qubit(terms: int, rng: np.random.Generator) -> DensityMatrix:
    """Mixture of states that are products across one of the bipartitions A|BC, B|AC, C|AB.

    Each term picks its bipartition uniformly; the single qubit and the pair
    get independent Haar-random pure states.
    """
    if terms < 1:
        raise DomainError("terms must be >= 1")
    dims = (2, 2, 2)
    weights = rng.dirichlet(np.ones(terms))
    rho = np.zeros((8, 8), dtype=complex)
    for w in weights:
        single = int(rng.integers(3))
        pair = [k for k in range(3) if k != single]
        block = _projector(linalg.kron(haar_vector(2, rng), haar_vector(4, rng)))
        # block is ordered (single, pair[0], pair[1])
        rho += w * _permute_sites(block, dims, [single] + pair)
    rho /= np.trace(rho).real
    return DensityMatrix(dims, rho)


def random_state(kind: str, seed: int, dims: Sequence[int] = (2,), terms: int = 1) -> DensityMatrix:
    """Seeded random state: ``pure``, ``separable`` or ``biseparable_3qubit``."""
    rng = np.random.default_rng(seed)
    if kind == "pure":
        return random_pure(dims, rng).density()
    if kind == "separable":
        return random_separable(dims, terms, rng)
    if kind == "biseparable_3qubit":
        return random_biseparable_3qubit(terms, rng)
    raise DomainError(f"unknown random state kind {kind!r}")
