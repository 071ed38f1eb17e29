"""
The classical side of the correlation diagram: dephasing in product bases,
closest product and classical states, and the quantities built from them
(total mutual information, discord, dissonance, classical correlations, the
L-quantities, one-sided discord and measurement induced disturbance).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import linalg
from .errors import ConsistencyError, DimensionMismatch, WrongArity
from .search import (
    SearchDiagnostics,
    SearchOptions,
    marginal_eigenbasis,
    multistart,
    structured_seeds,
    x_basis,
    y_basis,
)
from .states import MultipartiteState, ProductBasis, validate

DEGENERACY_TOL = 1e-8


@dataclass
class MeasureValue:
    """A correlation value in bits with the object that attains it."""

    value: float
    witness: Any = field(default=None, repr=False)
    method: str = "analytic"
    converged: bool = True
    flags: dict = field(default_factory=dict)

    def __float__(self) -> float:
        return float(self.value)


@dataclass
class DephasingResult:
    basis: ProductBasis
    chi: MultipartiteState
    entropy_chi: float
    diagnostics: SearchDiagnostics | None = None

    @property
    def converged(self) -> bool:
        return self.diagnostics is None or self.diagnostics.converged


def _nonneg(v: float) -> float:
    if -1e-9 <= v < 0.0:
        return 0.0
    return float(v)


def _dephased_probs(rho: np.ndarray, locals_) -> np.ndarray:
    u = linalg.tensor_product(*locals_)
    p = np.real(np.sum(u.conj() * (rho @ u), axis=0))
    return np.clip(p, 0.0, None)


def dephase(x: MultipartiteState, b: ProductBasis) -> MultipartiteState:
    """Remove all coherences of ``x`` in the product basis ``b``."""
    if tuple(b.dims) != tuple(x.dims):
        raise DimensionMismatch(f"basis dims {b.dims} do not match state dims {x.dims}")
    u = b.matrix()
    p = _dephased_probs(x.rho, b.locals)
    p = p / p.sum()
    chi = (u * p) @ u.conj().T
    return validate(x.dims, chi)


def closest_product_state(x: MultipartiteState) -> MultipartiteState:
    """Tensor product of the marginals of ``x``."""
    return validate(x.dims, linalg.tensor_product(*x.marginals()))


def total_mutual_information(x: MultipartiteState) -> MeasureValue:
    pi = closest_product_state(x)
    return MeasureValue(_nonneg(pi.entropy() - x.entropy()), witness=pi)


def _entropy_objective(rho: np.ndarray):
    return lambda locals_: linalg.shannon_entropy(_dephased_probs(rho, locals_))


def closest_classical_state(x: MultipartiteState, opts: SearchOptions | None = None) -> DephasingResult:
    """
    Closest classical state: the dephasing of ``x`` in the product basis
    that minimizes the dephased entropy.

    The search is a multi-start Nelder-Mead over local bases; see
    :class:`~corrgeo.search.SearchOptions`. ``diagnostics.converged`` is False
    when no second restart reproduced the best entropy within ``10 * tol``.
    """
    opts = opts or SearchOptions()
    f = _entropy_objective(x.rho)
    seeds = structured_seeds(f, x.rho, x.dims, min(opts.seeded, opts.restarts))
    out = multistart(f, x.dims, seeds, opts)
    chi = dephase(x, out.basis)
    return DephasingResult(out.basis, chi, chi.entropy(), out.diagnostics)


def _entropy_gap(x: MultipartiteState, res: DephasingResult) -> MeasureValue:
    return MeasureValue(
        _nonneg(res.entropy_chi - x.entropy()),
        witness=res,
        method="numeric",
        converged=res.converged,
    )


def discord(x: MultipartiteState, opts: SearchOptions | None = None) -> MeasureValue:
    return _entropy_gap(x, closest_classical_state(x, opts))


def dissonance(sigma: MultipartiteState, opts: SearchOptions | None = None) -> MeasureValue:
    """Discord of a separable state (normally the closest separable state)."""
    return _entropy_gap(sigma, closest_classical_state(sigma, opts))


def classical_correlations(chi: MultipartiteState) -> MeasureValue:
    """Total mutual information of a classical state."""
    pi = closest_product_state(chi)
    return MeasureValue(_nonneg(pi.entropy() - chi.entropy()), witness=pi)


def l_quantity(x: MultipartiteState, chi: DephasingResult) -> MeasureValue:
    """
    ``S(pi_chi) - S(pi_x)``.

    Also checks that the marginal product of ``chi`` equals the marginal
    product of ``x`` dephased in the same basis.

    Raises
    ------
    ConsistencyError
        If the two product states differ by more than 1e-8 entrywise.
    """
    pi_x = closest_product_state(x)
    pi_chi = closest_product_state(chi.chi)
    expected = dephase(pi_x, chi.basis)
    err = float(np.max(np.abs(pi_chi.rho - expected.rho)))
    if err > 1e-8:
        raise ConsistencyError(f"marginal product of chi deviates from dephased marginals by {err:.2e}")
    return MeasureValue(_nonneg(pi_chi.entropy() - pi_x.entropy()), witness=pi_chi)


def one_sided_dephase(x: MultipartiteState, party: int, u: np.ndarray) -> MultipartiteState:
    """Dephase only ``party`` in the basis given by the columns of ``u``."""
    if x.n_parties != 2:
        raise WrongArity(f"one-sided dephasing is defined for two parties, got {x.n_parties}")
    return validate(x.dims, _one_sided(x.rho, x.dims, party, np.asarray(u, dtype=complex)))


def _one_sided(rho: np.ndarray, dims, party: int, u: np.ndarray) -> np.ndarray:
    da, db = dims
    full = np.kron(u, np.eye(db)) if party == 0 else np.kron(np.eye(da), u)
    r = full.conj().T @ rho @ full
    idx = np.arange(da * db)
    k = idx // db if party == 0 else idx % db
    r = np.where(k[:, None] == k[None, :], r, 0.0)
    return full @ r @ full.conj().T


@dataclass
class OneSidedWitness:
    party: int
    basis: np.ndarray
    chi: MultipartiteState
    classical_correlations: float
    identity_gap: float
    diagnostics: SearchDiagnostics | None = None


def _one_sided_terms(x: MultipartiteState, party: int, u: np.ndarray, s_rho: float, s_pi: float):
    chi = _one_sided(x.rho, x.dims, party, u)
    s_chi = linalg.shannon_entropy(np.linalg.eigvalsh(0.5 * (chi + chi.conj().T)).clip(0.0))
    marg = [linalg.partial_trace(chi, x.dims, [i]) for i in range(2)]
    s_pichi = sum(linalg.shannon_entropy(np.linalg.eigvalsh(m).clip(0.0)) for m in marg)
    d = s_chi - s_rho
    l_ = s_pichi - s_pi
    c = s_pichi - s_chi
    return chi, d, l_, c


def original_discord(x: MultipartiteState, measured_party: int = 0, opts: SearchOptions | None = None) -> MeasureValue:
    """
    Discord with projective measurement on one party only.

    Minimizes ``D(b) - L(b)`` over orthonormal bases ``b`` of
    ``measured_party``. The witness records ``identity_gap``, the deviation of
    the value from ``T - C(b)`` at the optimal basis.

    Raises
    ------
    WrongArity
        If ``x`` is not bipartite.
    """
    if x.n_parties != 2:
        raise WrongArity(f"original discord needs two parties, got {x.n_parties}")
    if measured_party not in (0, 1):
        raise WrongArity(f"measured_party must be 0 or 1, got {measured_party}")
    opts = opts or SearchOptions()
    s_rho = x.entropy()
    pi = closest_product_state(x)
    s_pi = pi.entropy()
    t = s_pi - s_rho

    def f(locals_):
        _, d, l_, _ = _one_sided_terms(x, measured_party, locals_[0], s_rho, s_pi)
        return d - l_

    d = x.dims[measured_party]
    eig = marginal_eigenbasis(x.rho, x.dims)[measured_party]
    seeds = [[np.eye(d, dtype=complex)], [x_basis(d)], [y_basis(d)], [eig]][: min(opts.seeded, opts.restarts)]
    out = multistart(f, [d], seeds, opts)
    u = out.basis.locals[0]
    chi, dd, l_, c = _one_sided_terms(x, measured_party, u, s_rho, s_pi)
    value = dd - l_
    witness = OneSidedWitness(
        party=measured_party,
        basis=u,
        chi=validate(x.dims, chi),
        classical_correlations=c,
        identity_gap=abs(value - (t - c)),
        diagnostics=out.diagnostics,
    )
    return MeasureValue(_nonneg(value), witness=witness, method="numeric", converged=out.diagnostics.converged)


def original_discord_at(x: MultipartiteState, u: np.ndarray, measured_party: int = 0) -> tuple[float, float, float]:
    """``(delta(b), T, C(b))`` for a fixed measurement basis ``u``."""
    if x.n_parties != 2:
        raise WrongArity(f"original discord needs two parties, got {x.n_parties}")
    s_rho = x.entropy()
    s_pi = closest_product_state(x).entropy()
    _, d, l_, c = _one_sided_terms(x, measured_party, np.asarray(u, dtype=complex), s_rho, s_pi)
    return d - l_, s_pi - s_rho, c


def mid(x: MultipartiteState) -> MeasureValue:
    """
    Measurement induced disturbance ``S(eta) - S(rho)``, with ``eta`` the
    dephasing of ``rho`` in the eigenbases of its marginals.

    Degenerate marginals make ``eta`` basis-dependent; the deterministic
    eigenvector ordering of :func:`~corrgeo.linalg.eig_hermitian` fixes it and
    ``flags['degenerate_marginal']`` is set.
    """
    if x.n_parties != 2:
        raise WrongArity(f"MID is defined for two parties, got {x.n_parties}")
    systems = [linalg.eig_hermitian(m) for m in x.marginals()]
    degenerate = any(np.any(np.abs(np.diff(s.eigenvalues)) <= DEGENERACY_TOL) for s in systems)
    basis = ProductBasis(tuple(s.eigenvectors for s in systems))
    eta = dephase(x, basis)
    return MeasureValue(
        _nonneg(eta.entropy() - x.entropy()),
        witness=DephasingResult(basis, eta, eta.entropy()),
        flags={"degenerate_marginal": bool(degenerate)},
    )
