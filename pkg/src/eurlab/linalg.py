"""Dense complex linear algebra: Jacobi eigensolver, Kronecker products, partial trace.

Everything here works on plain ``numpy`` arrays. The matrices involved are
tiny (three qutrits is 27 x 27 at most), so the eigensolver is a cyclic
Jacobi method rather than a LAPACK call.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import DomainError

HERMITIAN_TOL = 1e-10
OFFDIAG_TOL = 1e-13
MAX_SWEEPS = 100


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in ascending order and the matching unit eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"square check failed: matrix has shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("finiteness check failed: matrix has NaN or Inf entries")
    return a


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def eigh(a, tol: float = OFFDIAG_TOL) -> EigenDecomposition:
    """Diagonalize a Hermitian matrix with cyclic complex Jacobi rotations.

    The input is symmetrized as (A + A^H)/2 first. Sweeps over all (p, q)
    pairs continue until the off-diagonal Frobenius norm drops below
    ``tol * max(1, ||A||_F)``.

    Raises
    ------
    DomainError
        If the matrix is not square or not Hermitian within 1e-10 entrywise.
    """
    a = _as_square(a)
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > HERMITIAN_TOL:
        raise DomainError(f"hermiticity check failed: max |A - A^H| = {dev:.3e}")
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))

    for _ in range(MAX_SWEEPS):
        if _off_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                # after the phase change diag(1, conj(phase)) the (p, q) entry is r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                j = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ j
                a[idx, :] = j.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ j

    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], v[:, order])


def eigvalsh(a) -> np.ndarray:
    return eigh(a).eigenvalues


def kron(*factors) -> np.ndarray:
    """Kronecker product of any number of matrices or vectors, left to right."""
    if not factors:
        raise DomainError("kron needs at least one factor")
    return reduce(np.kron, (np.asarray(f, dtype=complex) for f in factors))


def partial_trace(matrix, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    The kept subsystems appear in the order given by ``keep``.
    """
    dims = tuple(int(d) for d in dims)
    keep = tuple(int(k) for k in keep)
    n = len(dims)
    if not keep:
        raise DomainError("keep set is empty")
    if any(k < 0 or k >= n for k in keep) or len(set(keep)) != len(keep):
        raise DomainError(f"keep set {keep} is not a set of subsystem indices in [0, {n})")
    total = int(np.prod(dims))
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (total, total):
        raise DomainError(f"matrix shape {matrix.shape} does not match dims {dims}")

    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[k] for k in keep) + "".join(col[k] for k in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, matrix.reshape(dims + dims))
    m = int(np.prod([dims[k] for k in keep]))
    return reduced.reshape(m, m)
