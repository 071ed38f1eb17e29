"""
Independent reference computations for two-qubit states.

Everything here works in the Bloch / correlation-tensor picture and never
touches the package's dephasing or search code.
"""

import numpy as np

PAULI = [
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]


def h2(p):
    """Binary entropy in bits, elementwise."""
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    out = np.zeros_like(p)
    for q in (p, 1.0 - p):
        m = q > 0
        out[m] -= q[m] * np.log2(q[m])
    return out


def xlog(p):
    p = np.clip(p, 0.0, None)
    out = np.zeros_like(p)
    m = p > 0
    out[m] = -p[m] * np.log2(p[m])
    return out


def correlation_tensor(rho):
    return np.array([[np.real(np.trace(rho @ np.kron(a, b))) for b in PAULI] for a in PAULI])


def hemisphere_grid(step_deg=1.0):
    """Bloch directions on a 1-degree (theta, phi) grid, theta in [0, 90].

    n and -n define the same measurement basis, so the upper hemisphere
    covers every grid basis of the full sphere.
    """
    th = np.deg2rad(np.arange(0.0, 90.0 + 1e-9, step_deg))
    ph = np.deg2rad(np.arange(0.0, 360.0, step_deg))
    T, P = np.meshgrid(th, ph, indexing="ij")
    return np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1).reshape(-1, 3)


def _conditional_vectors(a, b, K, grid):
    """Per A-direction outcome weights p_s and conditional Bloch vectors r_s of B."""
    an = grid @ a
    na_K = grid @ K
    out = []
    for s in (1.0, -1.0):
        ps = 0.5 * (1.0 + s * an)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = (b[None, :] + s * na_K) / (1.0 + s * an)[:, None]
        out.append((ps, np.nan_to_num(r)))
    return out


def _row_lower_bounds(a, b, K, grid, margin=1e-3):
    """
    Lower bound on the entropy over all B directions, for every A direction.

    For fixed n_A the objective is concave in n_B over the unit ball, so its
    minimum sits on the boundary of the ellipse {(r_+.n, r_-.n)}. That
    boundary is parametrized by a circle through the SVD of [r_+; r_-]. The
    circle is sampled at 1 degree and ``margin`` absorbs the sampling error.
    """
    (pp, rp), (pm, rm) = _conditional_vectors(a, b, K, grid)
    R = np.stack([rp, rm], axis=1)  # (n, 2, 3)
    U, S, _ = np.linalg.svd(R, full_matrices=False)
    ang = np.deg2rad(np.arange(0.0, 360.0, 1.0))
    w = np.stack([np.cos(ang), np.sin(ang)])  # (2, m)
    x = U @ (S[:, :, None] * w[None, :, :])  # (n, 2, m): r_s . n on the boundary
    x = np.clip(x, -1.0, 1.0)
    f = pp[:, None] * h2(0.5 * (1.0 + x[:, 0])) + pm[:, None] * h2(0.5 * (1.0 + x[:, 1]))
    return xlog(pp) + xlog(pm) + f.min(axis=1) - margin


def grid_min_dephased_entropy(rho, cutoff=np.inf, step_deg=1.0):
    """
    Minimum over the 1-degree grid (both parties) of the entropy of rho
    dephased in a product basis.

    Rows (directions of A) whose lower bound is at least ``cutoff`` or the
    running minimum are skipped, so the return value is the exact grid
    minimum whenever that minimum is below ``cutoff``, and some value not
    below ``cutoff`` otherwise.
    """
    T = correlation_tensor(rho)
    a, b, K = T[1:, 0], T[0, 1:], T[1:, 1:]
    grid = np.unique(np.round(hemisphere_grid(step_deg), 12), axis=0)
    an = grid @ a
    bn = grid @ b
    KB = grid @ K.T
    lb = _row_lower_bounds(a, b, K, grid)

    best = np.inf
    for i in np.argsort(lb):
        if lb[i] >= min(best, cutoff):
            break
        cross = KB @ grid[i]
        p = np.empty((4, len(grid)))
        k = 0
        for s in (1.0, -1.0):
            for t in (1.0, -1.0):
                p[k] = 0.25 * (1.0 + s * an[i] + t * bn + s * t * cross)
                k += 1
        best = min(best, float(xlog(p).sum(axis=0).min()))
    return best if best < np.inf else float(max(lb.min(), cutoff))


def grid_min_one_sided_discord(rho, step_deg=1.0):
    """
    Minimum over the 1-degree grid of measurement directions on party A of
    ``S(rho_A) - S(rho) + sum_s p_s S(rho_B | s)``.
    """
    T = correlation_tensor(rho)
    a, b, K = T[1:, 0], T[0, 1:], T[1:, 1:]
    grid = hemisphere_grid(step_deg)
    cond = sum(
        ps * h2(0.5 * (1.0 + np.minimum(np.linalg.norm(r, axis=1), 1.0)))
        for ps, r in _conditional_vectors(a, b, K, grid)
    )
    s_a = float(h2(0.5 * (1.0 + np.linalg.norm(a))))
    s_rho = float(xlog(np.linalg.eigvalsh(rho)).sum())
    return s_a - s_rho + float(cond.min())
