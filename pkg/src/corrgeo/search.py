"""
Multi-start Nelder-Mead search over product bases.

Every restart runs in a chart centred on its own seed basis, i.e. the
search variable ``p`` is mapped to ``seed_n @ expm(G_n(p_n))`` per party and
each local search starts at ``p = 0``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from . import linalg
from .states import ProductBasis, local_unitary, n_basis_params

_INITIAL_STEP = 0.35


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("CORRGEO_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SearchOptions:
    """Knobs for the basis search.

    ``tol`` is the entropy tolerance (Nelder-Mead ``fatol``), ``xtol`` the
    parameter tolerance. The first ``seeded`` restarts start from structured
    bases, the remainder from Haar-random ones.
    """

    restarts: int = 32
    seeded: int = 8
    tol: float = 1e-8
    xtol: float = 1e-6
    seed: int = 0
    threads: int | None = None
    max_evals: int = 20000


@dataclass
class SearchDiagnostics:
    restarts: int
    evaluations: int
    gap: float
    converged: bool
    values: list[float] = field(default_factory=list, repr=False)
    best_restart: int = 0


@dataclass
class SearchOutcome:
    basis: ProductBasis
    value: float
    diagnostics: SearchDiagnostics


def _fourier(d: int) -> np.ndarray:
    k = np.arange(d)
    return np.exp(2j * np.pi * np.outer(k, k) / d) / np.sqrt(d)


def x_basis(d: int) -> np.ndarray:
    return _fourier(d)


def y_basis(d: int) -> np.ndarray:
    if d == 2:
        return np.array([[1, 1], [1j, -1j]], dtype=complex) / np.sqrt(2.0)
    # Fourier basis twisted by a quadratic phase
    return np.diag(np.exp(1j * np.pi * np.arange(d) ** 2 / d)) @ _fourier(d)


def marginal_eigenbasis(rho: np.ndarray, dims: Sequence[int]) -> list[np.ndarray]:
    return [linalg.eig_hermitian(linalg.partial_trace(rho, dims, [i])).eigenvectors for i in range(len(dims))]


def _unitaries(values: np.ndarray, refs: Sequence[np.ndarray], sizes: Sequence[int]) -> list[np.ndarray]:
    out = []
    pos = 0
    for ref, n in zip(refs, sizes):
        d = ref.shape[0]
        out.append(ref @ local_unitary(values[pos:pos + n], d))
        pos += n
    return out


def structured_seeds(
    objective: Callable[[list[np.ndarray]], float],
    rho: np.ndarray,
    dims: Sequence[int],
    count: int,
) -> list[list[np.ndarray]]:
    """
    Deterministic starting bases.

    Uniform choices (computational, x, y, marginal eigenbases) come first,
    followed by greedy per-party mixtures of those four axes, each started
    from one of the uniform choices.
    """
    eig = marginal_eigenbasis(rho, dims)
    menu = [
        [np.eye(d, dtype=complex) for d in dims],
        [x_basis(d) for d in dims],
        [y_basis(d) for d in dims],
        eig,
    ]
    seeds = [list(m) for m in menu]
    for start in menu:
        current = list(start)
        best = objective(current)
        for _ in range(3):
            improved = False
            for n in range(len(dims)):
                for option in menu:
                    trial = list(current)
                    trial[n] = option[n]
                    val = objective(trial)
                    if val < best - 1e-12:
                        best, current, improved = val, trial, True
            if not improved:
                break
        seeds.append(current)
    return seeds[:count]


def multistart(
    objective: Callable[[list[np.ndarray]], float],
    dims: Sequence[int],
    seeds: Sequence[Sequence[np.ndarray]],
    opts: SearchOptions,
) -> SearchOutcome:
    """
    Minimize ``objective`` over product bases of parties ``dims``.

    ``objective`` receives the list of local unitaries. ``seeds`` fill the
    first restarts; the rest start from Haar-random bases drawn from
    ``opts.seed``. Restarts are reduced by minimum value with ties broken by
    restart index, so the result does not depend on the thread count.
    """
    dims = [int(d) for d in dims]
    sizes = [n_basis_params(d) for d in dims]
    npar = sum(sizes)
    n_restarts = max(1, int(opts.restarts))

    refs = [list(s) for s in seeds][:n_restarts]
    rng = np.random.default_rng(opts.seed)
    while len(refs) < n_restarts:
        refs.append([linalg.haar_unitary(d, rng) for d in dims])

    def run(ref):
        f = lambda p: objective(_unitaries(p, ref, sizes))
        x0 = np.zeros(npar)
        simplex = np.vstack([x0, _INITIAL_STEP * np.eye(npar)])
        res = minimize(
            f,
            x0,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": opts.xtol,
                "fatol": opts.tol,
                "maxfev": opts.max_evals,
                "adaptive": npar > 6,
            },
        )
        # restart once from the optimum with a fresh, smaller simplex
        simplex = np.vstack([res.x, res.x + 0.05 * np.eye(npar)])
        res2 = minimize(
            f,
            res.x,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": opts.xtol,
                "fatol": opts.tol,
                "maxfev": opts.max_evals,
                "adaptive": npar > 6,
            },
        )
        best = res2 if res2.fun <= res.fun else res
        return float(best.fun), best.x, res.nfev + res2.nfev

    threads = opts.threads if opts.threads is not None else default_threads()
    if threads > 1 and n_restarts > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, refs))
    else:
        results = [run(r) for r in refs]

    values = [r[0] for r in results]
    order = sorted(range(len(values)), key=lambda i: (values[i], i))
    ibest = order[0]
    gap = values[order[1]] - values[ibest] if len(order) > 1 else 0.0
    locals_ = _unitaries(results[ibest][1], refs[ibest], sizes)
    diag = SearchDiagnostics(
        restarts=n_restarts,
        evaluations=sum(r[2] for r in results),
        gap=float(gap),
        converged=bool(len(order) == 1 or gap <= 10 * opts.tol),
        values=values,
        best_restart=ibest,
    )
    return SearchOutcome(ProductBasis(tuple(locals_)), values[ibest], diag)
