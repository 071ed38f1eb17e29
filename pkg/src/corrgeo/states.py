"""
Multipartite states, product bases and the named state families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from . import linalg
from .errors import DimensionMismatch, InvalidDistribution, NotAState

MAX_TOTAL_DIM = 64
UNITARITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MultipartiteState:
    """A validated density matrix together with its party dimensions.

    Build instances through :func:`validate` (or the family constructors);
    the bare constructor performs no checks.
    """

    dims: tuple[int, ...]
    rho: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def marginal(self, party: int) -> np.ndarray:
        return linalg.partial_trace(self.rho, self.dims, [party])

    def marginals(self) -> list[np.ndarray]:
        return [self.marginal(i) for i in range(self.n_parties)]

    def entropy(self) -> float:
        return linalg.von_neumann_entropy(self.rho)

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))

    def __repr__(self) -> str:
        return f"MultipartiteState(dims={self.dims})"


def validate(dims: Sequence[int], matrix) -> MultipartiteState:
    """
    Check that ``matrix`` is a density matrix on parties of sizes ``dims``.

    Eigenvalues in ``[-psd_tol, 0)`` are clipped to zero and a trace drift of
    at most 1e-9 is renormalized away.

    Raises
    ------
    DimensionMismatch
        Bad party dimensions, or ``prod(dims)`` differs from the matrix size.
    NotAState
        The matrix is not Hermitian, not positive semidefinite or not of unit
        trace. The message names the failed check.
    """
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 2 for d in dims):
        raise DimensionMismatch(f"party dimensions must all be >= 2, got {list(dims)}")
    a = np.array(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    total = int(np.prod(dims))
    if total != a.shape[0]:
        raise DimensionMismatch(f"prod(dims)={total} but matrix is {a.shape[0]}x{a.shape[0]}")
    if total > MAX_TOTAL_DIM:
        raise DimensionMismatch(f"total dimension {total} exceeds the supported maximum {MAX_TOTAL_DIM}")
    if not np.all(np.isfinite(a)):
        raise NotAState("matrix has non-finite entries")

    herm = linalg.hermiticity_error(a)
    if herm > linalg.HERMITICITY_TOL:
        raise NotAState(f"not Hermitian: max |M - M^dagger| = {herm:.3e}")
    a = 0.5 * (a + a.conj().T)

    vals, vecs = np.linalg.eigh(a)
    if vals.min() < -linalg.PSD_TOL:
        raise NotAState(f"not positive semidefinite: eigenvalue {vals.min():.3e}")
    if vals.min() < 0.0:
        vals = np.clip(vals, 0.0, None)
        a = (vecs * vals) @ vecs.conj().T
    tr = float(np.real(np.trace(a)))
    if abs(tr - 1.0) > linalg.TRACE_TOL:
        raise NotAState(f"trace is {tr:.12g}, not 1")
    if tr != 1.0:
        a = a / tr
    return MultipartiteState(dims, a)


def _ket(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def _proj(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def bell_basis() -> list[np.ndarray]:
    """Bell kets in the fixed order Phi+, Phi-, Psi+, Psi-."""
    s = 1.0 / np.sqrt(2.0)
    return [
        s * (_ket("00") + _ket("11")),
        s * (_ket("00") - _ket("11")),
        s * (_ket("01") + _ket("10")),
        s * (_ket("01") - _ket("10")),
    ]


def _distribution(p, n: int, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=float).ravel()
    if p.size != n:
        raise InvalidDistribution(f"{name} needs {n} entries, got {p.size}")
    if np.any(~np.isfinite(p)) or np.any(p < 0):
        raise InvalidDistribution(f"{name} has negative or non-finite entries: {p.tolist()}")
    if abs(p.sum() - 1.0) > 1e-9:
        raise InvalidDistribution(f"{name} sums to {p.sum():.12g}, not 1")
    return p


def bell_diagonal(lam) -> MultipartiteState:
    """Mixture of Bell states; weights are sorted non-increasing first."""
    lam = np.sort(_distribution(lam, 4, "lambda"))[::-1]
    rho = sum(l * _proj(b) for l, b in zip(lam, bell_basis()))
    return validate((2, 2), rho)


def bell_coefficients(x: MultipartiteState) -> np.ndarray:
    """Diagonal of a two-qubit state in the (Phi+, Phi-, Psi+, Psi-) basis."""
    B = np.column_stack(bell_basis())
    return np.real(np.diag(B.conj().T @ x.rho @ B))


def is_bell_diagonal(x: MultipartiteState, tol: float = 1e-9) -> bool:
    if x.dims != (2, 2):
        return False
    B = np.column_stack(bell_basis())
    m = B.conj().T @ x.rho @ B
    return float(np.max(np.abs(m - np.diag(np.diag(m))))) <= tol


def w_ket() -> np.ndarray:
    return (_ket("100") + _ket("010") + _ket("001")) / np.sqrt(3.0)


def w_bar_ket() -> np.ndarray:
    return (_ket("011") + _ket("101") + _ket("110")) / np.sqrt(3.0)


def w_state() -> MultipartiteState:
    return validate((2, 2, 2), _proj(w_ket()))


def closest_separable_w() -> MultipartiteState:
    """Closest separable state to the W state, as tabulated in the literature."""
    rho = (
        8 / 27 * _proj(_ket("000"))
        + 12 / 27 * _proj(w_ket())
        + 6 / 27 * _proj(w_bar_ket())
        + 1 / 27 * _proj(_ket("111"))
    )
    return validate((2, 2, 2), rho)


_PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
_MINUS = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0)
_ZERO = np.array([1.0, 0.0], dtype=complex)
_ONE = np.array([0.0, 1.0], dtype=complex)


def _cluster_terms() -> list[np.ndarray]:
    t = linalg.tensor_product
    return [
        t(_ZERO, _PLUS, _ZERO, _PLUS),
        t(_ONE, _PLUS, _ONE, _PLUS),
        t(_ZERO, _MINUS, _ONE, _MINUS),
        t(_ONE, _MINUS, _ZERO, _MINUS),
    ]


def cluster_ket_4() -> np.ndarray:
    return 0.5 * sum(_cluster_terms())


def cluster_state_4() -> MultipartiteState:
    return validate((2, 2, 2, 2), _proj(cluster_ket_4()))


def closest_separable_cluster4() -> MultipartiteState:
    return validate((2, 2, 2, 2), 0.25 * sum(_proj(v) for v in _cluster_terms()))


def mid_counterexample(q: float, p) -> MultipartiteState:
    """
    Two-qubit state mixing a z-classical and an x-classical part.

    ``(1-q) sum_ij p_ij |ij><ij|_zz + q/2 (|++><++| + |--><--|)`` with
    ``p = (p00, p01, p10, p11)``.
    """
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise InvalidDistribution(f"q must lie in [0, 1], got {q}")
    p = _distribution(p, 4, "p")
    z_part = np.diag(p).astype(complex)
    pp = linalg.tensor_product(_PLUS, _PLUS)
    mm = linalg.tensor_product(_MINUS, _MINUS)
    x_part = 0.5 * (_proj(pp) + _proj(mm))
    return validate((2, 2), (1.0 - q) * z_part + q * x_part)


def product_state(*locals_) -> MultipartiteState:
    """Tensor product of single-party density matrices."""
    dims = tuple(np.asarray(r).shape[0] for r in locals_)
    return validate(dims, linalg.tensor_product(*locals_))


def pure_state(dims: Sequence[int], ket) -> MultipartiteState:
    v = np.asarray(ket, dtype=complex).ravel()
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise NotAState("zero vector")
    v = v / nrm
    return validate(dims, _proj(v))


def random_state(dims: Sequence[int], rank: int | None = None, seed=None) -> MultipartiteState:
    """
    Random density matrix from the induced measure.

    A Haar-random pure state on the system plus a ``rank``-dimensional
    ancilla is drawn and the ancilla traced out. ``rank = prod(dims)`` gives
    the Hilbert-Schmidt measure.
    """
    dims = tuple(int(d) for d in dims)
    total = int(np.prod(dims))
    rank = total if rank is None else int(rank)
    if not 1 <= rank <= total:
        raise DimensionMismatch(f"rank must be in [1, {total}], got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((total, rank)) + 1j * rng.standard_normal((total, rank))
    rho = g @ g.conj().T
    return validate(dims, rho / np.real(np.trace(rho)))


@dataclass(frozen=True, eq=False)
class ProductBasis:
    """One local unitary per party; the columns of each are the local kets."""

    locals: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = []
        for u in self.locals:
            u = np.asarray(u, dtype=complex)
            if u.ndim != 2 or u.shape[0] != u.shape[1]:
                raise DimensionMismatch(f"local basis must be square, got {u.shape}")
            err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
            if err > UNITARITY_TOL:
                raise NotAState(f"local basis is not unitary (|U^dagger U - I| = {err:.2e})")
            mats.append(u)
        object.__setattr__(self, "locals", tuple(mats))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(u.shape[0] for u in self.locals)

    def matrix(self) -> np.ndarray:
        """Full unitary whose columns are the product kets |k1...kN>."""
        return linalg.tensor_product(*self.locals)

    @classmethod
    def computational(cls, dims: Sequence[int]) -> "ProductBasis":
        return cls(tuple(np.eye(d, dtype=complex) for d in dims))


def random_product_basis(dims: Sequence[int], seed=None) -> ProductBasis:
    rng = np.random.default_rng(seed)
    return ProductBasis(tuple(linalg.haar_unitary(int(d), rng) for d in dims))


def n_basis_params(d: int) -> int:
    return d * (d - 1)


def _generator(params: np.ndarray, d: int) -> np.ndarray:
    g = np.zeros((d, d), dtype=complex)
    iu = np.triu_indices(d, 1)
    z = params[0::2] + 1j * params[1::2]
    g[iu] = z
    return g - g.conj().T


def local_unitary(params, d: int) -> np.ndarray:
    """``expm(G)`` for the zero-diagonal anti-Hermitian generator ``G``.

    ``params`` holds the real and imaginary parts of the upper-triangular
    entries of ``G`` in row-major order. For a qubit the pair ``(a, b)``
    rotates the basis by the polar angle ``2|a + ib|`` about an axis in the
    equatorial plane at azimuth ``arg(a + ib)``.
    """
    params = np.asarray(params, dtype=float)
    if params.size != n_basis_params(d):
        raise DimensionMismatch(f"a {d}-level party needs {n_basis_params(d)} parameters, got {params.size}")
    if d == 2:
        a, b = float(params[0]), float(params[1])
        r = math.hypot(a, b)
        if r == 0.0:
            return np.eye(2, dtype=complex)
        z = complex(a, b) / r
        c, s = math.cos(r), math.sin(r)
        return np.array([[c, z * s], [-z.conjugate() * s, c]], dtype=complex)
    return expm(_generator(params, d))


@dataclass(frozen=True, eq=False)
class BasisParameters:
    """
    Optimization coordinates for a product basis.

    ``values`` concatenates ``d(d-1)`` reals per party. The decoded local
    basis is ``reference_n @ local_unitary(values_n)``, so each multi-start
    run works in a chart centred on its own seed basis.
    """

    dims: tuple[int, ...]
    values: np.ndarray
    reference: ProductBasis | None = None

    def decode(self) -> ProductBasis:
        return decode(self.dims, self.values, self.reference)


def decode(dims: Sequence[int], values, reference: ProductBasis | None = None) -> ProductBasis:
    values = np.asarray(values, dtype=float).ravel()
    sizes = [n_basis_params(int(d)) for d in dims]
    if values.size != sum(sizes):
        raise DimensionMismatch(f"expected {sum(sizes)} basis parameters, got {values.size}")
    out = []
    pos = 0
    for i, (d, n) in enumerate(zip(dims, sizes)):
        u = local_unitary(values[pos:pos + n], int(d))
        if reference is not None:
            u = reference.locals[i] @ u
        out.append(u)
        pos += n
    return ProductBasis(tuple(out))
