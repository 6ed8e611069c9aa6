"""Measurement bases and observable scenarios.

A non-degenerate observable enters the entropies only through its
eigenbasis, so a :class:`MeasurementBasis` is just an orthonormal basis
stored as the columns of a unitary matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DomainError, UnsupportedDimensionError

GRAM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Orthonormal basis of C^d; column k of ``vectors`` is the k-th basis vector."""

    vectors: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.array(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DomainError(f"basis {self.label!r}: expected a d x d array, got {v.shape}")
        gram = v.conj().T @ v
        err = np.max(np.abs(gram - np.eye(v.shape[0])))
        if err > GRAM_TOL:
            raise DomainError(f"basis {self.label!r}: Gram matrix deviates from identity by {err:.3e}")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"MeasurementBasis(dim={self.dim}, label={self.label!r})"

    def key(self) -> tuple:
        """Hashable fingerprint, used to cache bound computations."""
        return (self.label, self.dim, self.vectors.tobytes())


def _fourier_matrix(d: int) -> np.ndarray:
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)


_SQ2 = 1.0 / np.sqrt(2.0)
_PAULI = {
    "pauli_z": np.array([[1, 0], [0, 1]], dtype=complex),
    "pauli_x": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "pauli_y": np.array([[_SQ2, _SQ2], [1j * _SQ2, -1j * _SQ2]], dtype=complex),
}
_PAULI_LABEL = {"pauli_z": "Z", "pauli_x": "X", "pauli_y": "Y"}


def standard_bases(d: int, kind: str) -> MeasurementBasis:
    """Computational, Fourier, or Pauli eigenbasis.

    Pauli eigenbases list the +1 eigenvector first. The Fourier basis has
    vectors ``v_k[j] = exp(2 pi i j k / d) / sqrt(d)``.
    """
    if d < 1:
        raise DomainError(f"dimension must be positive, got {d}")
    if kind == "computational":
        return MeasurementBasis(np.eye(d, dtype=complex), "comp")
    if kind == "fourier":
        return MeasurementBasis(_fourier_matrix(d), "fourier")
    if kind in _PAULI:
        if d != 2:
            raise DomainError(f"{kind} basis only exists for d=2, got d={d}")
        return MeasurementBasis(_PAULI[kind], _PAULI_LABEL[kind])
    raise DomainError(f"unknown basis kind {kind!r}")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, int(n ** 0.5) + 1))


@lru_cache(maxsize=None)
def _complete_mub_set(d: int) -> tuple[MeasurementBasis, ...]:
    if d == 2:
        return tuple(standard_bases(2, k) for k in ("pauli_z", "pauli_x", "pauli_y"))
    bases = [standard_bases(d, "computational"), standard_bases(d, "fourier")]
    j = np.arange(d)
    omega = np.exp(2j * np.pi / d)
    for r in range(1, d):
        # exponent reduced mod d before exponentiating keeps phases exact
        expo = (r * j[:, None] ** 2 + np.outer(j, j)) % d
        bases.append(MeasurementBasis(omega ** expo / np.sqrt(d), f"mub:{r + 1}"))
    return tuple(bases)


def mub_set(d: int, count: int) -> list[MeasurementBasis]:
    """The first ``count`` bases of a complete set of d+1 MUBs for prime d.

    Order: computational, Fourier, then the Wootters-Fields bases
    ``v_k[j] = omega^(r j^2 + k j) / sqrt(d)`` for r = 1..d-1. For d = 2 the
    set is the Z, X, Y eigenbases.
    """
    if not is_prime(d):
        raise UnsupportedDimensionError(
            f"complete MUB sets are only constructed for prime d; d={d} is not prime"
        )
    if not 1 <= count <= d + 1:
        raise DomainError(f"count must be in [1, {d + 1}] for d={d}, got {count}")
    return list(_complete_mub_set(d)[:count])


def overlaps(b1: MeasurementBasis, b2: MeasurementBasis) -> np.ndarray:
    """Matrix of |<a_j|b_k>|."""
    if b1.dim != b2.dim:
        raise DomainError(f"dimension mismatch: {b1.dim} vs {b2.dim}")
    return np.abs(b1.vectors.conj().T @ b2.vectors)


def max_overlap(b1: MeasurementBasis, b2: MeasurementBasis) -> float:
    """Largest overlap ``max_{j,k} |<a_j|b_k>|`` between two eigenbases."""
    return float(np.max(overlaps(b1, b2)))


def is_mutually_unbiased(b1: MeasurementBasis, b2: MeasurementBasis, tol: float = 1e-10) -> bool:
    ov = overlaps(b1, b2)
    return bool(np.all(np.abs(ov - 1.0 / np.sqrt(b1.dim)) <= tol))


def basis_from_name(d: int, name: str) -> MeasurementBasis:
    """Resolve a basis name: ``Z``, ``X``, ``Y``, ``comp``, ``fourier`` or ``mub:r``.

    ``mub:r`` indexes the complete prime-dimension set from 0 (``mub:0`` is
    computational, ``mub:1`` Fourier).
    """
    key = name.strip()
    if key in ("Z", "X", "Y"):
        return standard_bases(d, "pauli_" + key.lower())
    if key in ("comp", "computational"):
        return standard_bases(d, "computational")
    if key == "fourier":
        return standard_bases(d, "fourier")
    if key.startswith("mub:"):
        try:
            r = int(key[4:])
        except ValueError:
            raise DomainError(f"malformed basis name {name!r}") from None
        if not is_prime(d):
            raise UnsupportedDimensionError(f"mub:r names need prime d; d={d} is not prime")
        if not 0 <= r <= d:
            raise DomainError(f"mub index {r} out of range [0, {d}] for d={d}")
        return _complete_mub_set(d)[r]
    raise DomainError(f"unknown basis name {name!r}")


def bases_from_names(d: int, names: str | Sequence[str]) -> list[MeasurementBasis]:
    if isinstance(names, str):
        names = [n for n in names.split(",") if n.strip()]
    return [basis_from_name(d, n) for n in names]


@dataclass(frozen=True)
class ObservableScenario:
    """Per-site ordered lists of L bases; observable j is the product of the j-th bases."""

    per_site_bases: tuple[tuple[MeasurementBasis, ...], ...]
    L: int = field(init=False)

    def __post_init__(self):
        sites = tuple(tuple(b) for b in self.per_site_bases)
        if not sites:
            raise DomainError("scenario needs at least one site")
        counts = {len(b) for b in sites}
        if len(counts) != 1:
            raise DomainError(f"all sites must use the same number of observables, got {sorted(counts)}")
        for i, site in enumerate(sites):
            if len({b.dim for b in site}) != 1:
                raise DomainError(f"site {i} mixes bases of different dimensions")
        object.__setattr__(self, "per_site_bases", sites)
        object.__setattr__(self, "L", counts.pop())

    @classmethod
    def uniform(cls, bases: Sequence[MeasurementBasis], n_sites: int) -> "ObservableScenario":
        """Every site measures the same list of bases."""
        return cls(tuple(tuple(bases) for _ in range(n_sites)))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(site[0].dim for site in self.per_site_bases)

    @property
    def n_sites(self) -> int:
        return len(self.per_site_bases)

    def setting(self, j: int) -> tuple[MeasurementBasis, ...]:
        """Bases measured jointly for the j-th product observable."""
        return tuple(site[j] for site in self.per_site_bases)

    def settings(self):
        return [self.setting(j) for j in range(self.L)]
