"""
Dense Hermitian kernel: eigensystems, tensor products, partial traces and
entropies.

Matrices are plain 2-D complex ``numpy.ndarray`` objects. Every entropy is
measured in bits.
"""

from __future__ import annotations

from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np
from scipy.stats import unitary_group

from .errors import DimensionMismatch, NonHermitian, NotAState

HERMITICITY_TOL = 1e-10
PSD_TOL = 1e-9
TRACE_TOL = 1e-9
SUPPORT_TOL = 1e-9

_TIE_TOL = 1e-10
_PHASE_TOL = 1e-10


class HermitianEigensystem(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return a


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def check_hermitian(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    a = as_matrix(m)
    err = hermiticity_error(a)
    if err > tol:
        raise NonHermitian(f"max |M - M^dagger| = {err:.3e} exceeds {tol:.0e}")
    return a


def _phase_normalize(v: np.ndarray) -> np.ndarray:
    idx = np.flatnonzero(np.abs(v) > _PHASE_TOL)
    if idx.size == 0:
        return v
    lead = v[idx[0]]
    return v * (abs(lead) / lead)


def _lex_key(v: np.ndarray) -> tuple:
    r = np.round(v, 10)
    return tuple(x for z in r for x in (z.real, z.imag))


def eig_hermitian(m) -> HermitianEigensystem:
    """
    Eigendecomposition of a Hermitian matrix with a deterministic ordering.

    Eigenvalues are returned in non-increasing order. Each eigenvector is
    rephased so that its first nonzero entry is real and positive; within a
    group of (numerically) equal eigenvalues the vectors are ordered by
    descending lexicographic comparison of their entries.

    Raises
    ------
    NonHermitian
        If ``max |M - M^dagger| > 1e-10``.
    """
    a = check_hermitian(m)
    vals, vecs = np.linalg.eigh(0.5 * (a + a.conj().T))
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = np.column_stack([_phase_normalize(vecs[:, j]) for j in order]) if vals.size else vecs

    out = []
    start = 0
    n = vals.size
    while start < n:
        stop = start + 1
        while stop < n and vals[stop - 1] - vals[stop] <= _TIE_TOL:
            stop += 1
        group = list(range(start, stop))
        if len(group) > 1:
            group.sort(key=lambda j: _lex_key(vecs[:, j]), reverse=True)
        out.extend(group)
        start = stop
    return HermitianEigensystem(vals[out].copy(), vecs[:, out].copy())


def tensor_product(*ops) -> np.ndarray:
    """Kronecker product of one or more operators (or kets), left to right."""
    if not ops:
        raise ValueError("tensor_product needs at least one operand")
    return reduce(_kron, [np.asarray(o, dtype=complex) for o in ops])


def _kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # np.kron minus its generic-shape bookkeeping; hot inside basis searches
    if a.ndim == 1 and b.ndim == 1:
        return (a[:, None] * b[None, :]).ravel()
    if a.ndim == 2 and b.ndim == 2:
        (m, n), (p, q) = a.shape, b.shape
        return (a[:, None, :, None] * b[None, :, None, :]).reshape(m * p, n * q)
    return np.kron(a, b)


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """
    Reduced operator on the parties listed in ``keep``.

    Parameters
    ----------
    m : array_like
        Operator on the composite space, dimension ``prod(dims)``.
    dims : sequence of int
        Local dimensions of the parties.
    keep : int or iterable of int
        Party indices to keep. The output orders them ascending.
    """
    a = as_matrix(m)
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != a.shape[0]:
        raise DimensionMismatch(f"prod(dims)={int(np.prod(dims))} but matrix is {a.shape[0]}x{a.shape[0]}")
    if isinstance(keep, (int, np.integer)):
        keep = [int(keep)]
    keep = sorted(set(int(k) for k in keep))
    n = len(dims)
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise DimensionMismatch(f"keep={keep} is not a nonempty subset of range({n})")
    if len(keep) == n:
        return a.copy()

    t = a.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    if 2 * n > len(letters):
        raise DimensionMismatch("too many parties")
    row = list(letters[:n])
    col = [letters[n + i] if i in keep else row[i] for i in range(n)]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    dk = int(np.prod([dims[i] for i in keep]))
    return reduced.reshape(dk, dk)


def shannon_entropy(p) -> float:
    """Shannon entropy in bits, with ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) if p.size else 0.0


def binary_entropy(x: float) -> float:
    return shannon_entropy([x, 1.0 - x])


def state_spectrum(rho, psd_tol: float = PSD_TOL, trace_tol: float = TRACE_TOL) -> np.ndarray:
    """Eigenvalues of a density matrix after validation, clipped at zero."""
    a = check_hermitian(rho)
    vals = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    _check_spectrum(vals, psd_tol, trace_tol)
    return np.clip(vals, 0.0, None)


def _check_spectrum(vals: np.ndarray, psd_tol: float, trace_tol: float) -> None:
    if vals.size and vals.min() < -psd_tol:
        raise NotAState(f"negative eigenvalue {vals.min():.3e} beyond psd_tol={psd_tol:.0e}")
    tr = float(vals.sum())
    if abs(tr - 1.0) > trace_tol:
        raise NotAState(f"trace {tr:.12g} differs from 1 by more than {trace_tol:.0e}")


def von_neumann_entropy(rho) -> float:
    """``-sum(l log2 l)`` over the spectrum of a validated density matrix."""
    return shannon_entropy(state_spectrum(rho))


def relative_entropy(x, y) -> float:
    """
    Quantum relative entropy ``S(x||y) = -tr(x log y) - S(x)`` in bits.

    Returns ``math.inf`` when the support of ``x`` is not contained in the
    support of ``y``. Tiny negative round-off is clamped to zero.
    """
    xa = check_hermitian(x)
    ya = check_hermitian(y)
    if xa.shape != ya.shape:
        raise DimensionMismatch(f"shapes {xa.shape} and {ya.shape} differ")
    sx = state_spectrum(xa)
    mu, v = np.linalg.eigh(0.5 * (ya + ya.conj().T))
    _check_spectrum(mu, PSD_TOL, TRACE_TOL)

    weights = np.real(np.einsum("ij,ik,kj->j", v.conj(), xa, v))
    null = mu <= PSD_TOL
    if np.any(weights[null] > SUPPORT_TOL):
        return float("inf")
    live = ~null
    cross = -float(np.sum(weights[live] * np.log2(mu[live])))
    value = cross - shannon_entropy(sx)
    if value < 0.0:
        # Klein's inequality; anything beyond round-off is a bug upstream
        if value < -1e-9:
            raise NotAState(f"relative entropy evaluated to {value:.3e} < 0")
        value = 0.0
    return value


def log2_hermitian(m, floor: float = 0.0) -> np.ndarray:
    """Matrix base-2 logarithm of a positive definite matrix.

    Eigenvalues below ``floor`` are raised to it first; with the default of
    zero the input must be strictly positive.
    """
    vals, vecs = np.linalg.eigh(as_matrix(m))
    vals = np.maximum(vals, floor)
    return (vecs * np.log2(vals)) @ vecs.conj().T


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Unitary drawn from the Haar measure on U(d)."""
    if d == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1), dtype=complex)
    return unitary_group.rvs(d, random_state=rng)
