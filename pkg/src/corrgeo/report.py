"""
Full correlation analysis of a state, the subadditivity audit and
parameter sweeps.
"""

from __future__ import annotations

import csv
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np

from .classical import (
    MeasureValue,
    classical_correlations,
    closest_classical_state,
    l_quantity,
    mid,
    original_discord,
    total_mutual_information,
)
from .entanglement import ReeOptions, ree
from .errors import CorrGeoError
from .search import SearchOptions, default_threads
from .states import MultipartiteState
from .statefile import build_family

log = logging.getLogger(__name__)

MEASURES = ("E", "D", "Q", "C", "T", "L", "delta", "mid")
QUANTITIES = ("T_rho", "D", "C_rho", "L_rho", "E", "T_sigma", "Q", "C_sigma", "L_sigma")
AUDIT_TOL = 1e-3
MAX_SWEEP_POINTS = 10 ** 6


def parse_measures(text: str | None) -> frozenset[str]:
    if text is None or text.strip() in ("", "all"):
        return frozenset(MEASURES)
    items = {t.strip() for t in text.split(",") if t.strip()}
    unknown = items - set(MEASURES)
    if unknown:
        raise CorrGeoError(f"unknown measures {sorted(unknown)}; choose from {', '.join(MEASURES)}")
    return frozenset(items)


@dataclass(frozen=True)
class AnalysisOptions:
    measures: frozenset = frozenset(MEASURES)
    search: SearchOptions = field(default_factory=SearchOptions)
    ree: ReeOptions = field(default_factory=ReeOptions)


@dataclass
class CorrelationReport:
    dims: tuple[int, ...]
    T_rho: MeasureValue | None = None
    D: MeasureValue | None = None
    C_rho: MeasureValue | None = None
    L_rho: MeasureValue | None = None
    E: MeasureValue | None = None
    T_sigma: MeasureValue | None = None
    Q: MeasureValue | None = None
    C_sigma: MeasureValue | None = None
    L_sigma: MeasureValue | None = None
    delta: MeasureValue | None = None
    mid: MeasureValue | None = None
    residual_rho: float | None = None
    residual_sigma: float | None = None
    subadditivity_gap: float | None = None
    q_candidates: list[float] = field(default_factory=list)
    flags: dict = field(default_factory=dict)
    audit: dict | None = None

    def values(self) -> dict[str, float | None]:
        out = {}
        for name in QUANTITIES + ("delta", "mid"):
            mv = getattr(self, name)
            out[name] = None if mv is None else float(mv.value)
        return out

    @property
    def non_converged(self) -> bool:
        return bool(self.flags.get("non_convergence"))

    def to_dict(self) -> dict:
        methods = {}
        for name in QUANTITIES + ("delta", "mid"):
            mv = getattr(self, name)
            if mv is not None:
                methods[name] = mv.method
        d = {
            "dims": list(self.dims),
            "quantities": {k: _num(v) for k, v in self.values().items()},
            "methods": methods,
            "identity_residuals": {"rho": _num(self.residual_rho), "sigma": _num(self.residual_sigma)},
            "subadditivity_gap": _num(self.subadditivity_gap),
            "flags": dict(self.flags),
        }
        if self.q_candidates:
            d["q_candidates"] = [_num(q) for q in self.q_candidates]
        if self.audit is not None:
            d["audit"] = {k: (_num(v) if isinstance(v, float) else v) for k, v in self.audit.items()}
        return d


def _num(v):
    if v is None:
        return None
    return float(f"{float(v):.12g}")


def _needs(measures: frozenset) -> tuple[bool, bool]:
    rho_chain = bool(measures & {"D", "C", "L"})
    sigma_chain = bool(measures & {"E", "Q", "C", "T", "L"})
    return rho_chain, sigma_chain


def full_analysis(x: MultipartiteState, opts: AnalysisOptions | None = None) -> CorrelationReport:
    """
    Compute every requested correlation quantity of ``x``.

    The closest separable state comes from :func:`~corrgeo.entanglement.ree`;
    both closest classical states come from the basis search. Bipartite
    inputs additionally get the one-sided discord and MID. The returned
    report always carries residuals of the two closed-path identities
    (when both paths were computed), the subadditivity gap and flags.
    """
    opts = opts or AnalysisOptions()
    m = opts.measures
    rep = CorrelationReport(dims=x.dims)
    flags = {"non_convergence": False, "sigma_non_unique": False, "marginal_degeneracy": False}
    rho_chain, sigma_chain = _needs(m)

    rep.T_rho = total_mutual_information(x)
    if rho_chain:
        chi = closest_classical_state(x, opts.search)
        rep.D = MeasureValue(max(0.0, chi.entropy_chi - x.entropy()), chi, "numeric", chi.converged)
        rep.C_rho = classical_correlations(chi.chi)
        rep.L_rho = l_quantity(x, chi)
        rep.residual_rho = abs(rep.T_rho.value - (rep.D.value + rep.C_rho.value - rep.L_rho.value))
        flags["non_convergence"] |= not chi.converged

    if sigma_chain:
        e = ree(x, opts.ree)
        rep.E = MeasureValue(e.value, e, e.method, e.converged)
        flags["non_convergence"] |= not e.converged
        sigma = e.sigma
        rep.T_sigma = total_mutual_information(sigma)
        chi_s = closest_classical_state(sigma, opts.search)
        rep.Q = MeasureValue(max(0.0, chi_s.entropy_chi - sigma.entropy()), chi_s, "numeric", chi_s.converged)
        rep.C_sigma = classical_correlations(chi_s.chi)
        rep.L_sigma = l_quantity(sigma, chi_s)
        rep.residual_sigma = abs(rep.T_sigma.value - (rep.Q.value + rep.C_sigma.value - rep.L_sigma.value))
        flags["non_convergence"] |= not chi_s.converged
        rep.subadditivity_gap = rep.T_rho.value - (rep.E.value + rep.Q.value + rep.C_sigma.value)
        if e.candidates:
            flags["sigma_non_unique"] = True
            rep.q_candidates = [rep.Q.value]
            for cand in e.candidates:
                cc = closest_classical_state(cand, opts.search)
                rep.q_candidates.append(max(0.0, cc.entropy_chi - cand.entropy()))

    if x.n_parties == 2:
        if "delta" in m:
            rep.delta = original_discord(x, 0, opts.search)
            flags["non_convergence"] |= not rep.delta.converged
        if "mid" in m:
            rep.mid = mid(x)
            flags["marginal_degeneracy"] = bool(rep.mid.flags.get("degenerate_marginal"))

    rep.flags = flags
    for name in QUANTITIES + ("delta", "mid"):
        mv = getattr(rep, name)
        if mv is not None and mv.value < -1e-9:
            raise CorrGeoError(f"{name} evaluated to {mv.value:.3e} < 0")
    if rep.subadditivity_gap is not None:
        rep.audit = subadditivity_audit(rep)
    return rep


def subadditivity_audit(report: CorrelationReport, tol: float = AUDIT_TOL) -> dict:
    """
    Record ``T_rho - (E + Q + C_sigma)`` and flag values below ``-tol``.

    A violation is logged at WARNING level together with every quantity
    involved. It is a finding about the state, not an error.
    """
    vals = report.values()
    if report.subadditivity_gap is None:
        raise CorrGeoError("subadditivity audit needs T_rho, E, Q and C_sigma")
    gap = float(report.subadditivity_gap)
    violation = gap < -tol
    rec = {
        "gap": gap,
        "tolerance": tol,
        "violation": violation,
        "T_rho": vals["T_rho"],
        "E": vals["E"],
        "Q": vals["Q"],
        "C_sigma": vals["C_sigma"],
        "L_sigma": vals["L_sigma"],
        "ree_method": report.E.method if report.E is not None else None,
    }
    if violation:
        log.warning("subadditivity violated: T_rho - (E+Q+C_sigma) = %.6g; witnesses %s", gap, rec)
    return rec


# --------------------------------------------------------------------------
# sweeps

@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    steps: int

    def points(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.min])
        return np.linspace(self.min, self.max, self.steps)


@dataclass(frozen=True)
class SweepSpec:
    """A family name, a rectangular grid over its parameters and options."""

    family: str
    axes: tuple[Axis, ...] = ()
    fixed: dict = field(default_factory=dict)
    measures: frozenset = frozenset(MEASURES)
    seed: int = 0
    restarts: int | None = None
    tol: float | None = None
    ree_terms: int | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        if "family" not in d:
            raise CorrGeoError("sweep spec needs a 'family'")
        axes = []
        for name, ax in (d.get("grid") or {}).items():
            try:
                axes.append(Axis(str(name), float(ax["min"]), float(ax["max"]), int(ax["steps"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise CorrGeoError(f"bad grid axis {name!r}: {exc}") from None
        measures = d.get("measures", "all")
        if isinstance(measures, (list, tuple)):
            measures = ",".join(measures)
        opts = d.get("options") or {}
        spec = cls(
            family=str(d["family"]),
            axes=tuple(axes),
            fixed=dict(d.get("fixed") or {}),
            measures=parse_measures(measures),
            seed=int(d.get("seed", 0)),
            restarts=opts.get("restarts"),
            tol=opts.get("tol"),
            ree_terms=opts.get("ree_terms"),
        )
        spec.check()
        return spec

    def check(self) -> None:
        total = 1
        for ax in self.axes:
            if ax.steps < 1:
                raise CorrGeoError(f"axis {ax.name!r} needs at least one step")
            total *= ax.steps
        if total > MAX_SWEEP_POINTS:
            raise CorrGeoError(f"sweep has {total} points, more than {MAX_SWEEP_POINTS}")
        # fail fast on family/parameter errors
        for point in self.grid():
            build_family(self.family, point, self.fixed)

    def grid(self) -> Iterator[dict]:
        names = [ax.name for ax in self.axes]
        for combo in itertools.product(*[ax.points() for ax in self.axes]):
            yield dict(zip(names, (float(v) for v in combo)))

    def options(self) -> AnalysisOptions:
        s = SearchOptions(seed=self.seed)
        if self.restarts is not None:
            s = replace(s, restarts=int(self.restarts))
        if self.tol is not None:
            s = replace(s, tol=float(self.tol))
        return AnalysisOptions(self.measures, s, ReeOptions(seed=self.seed, terms=self.ree_terms))


CSV_FIELDS = QUANTITIES + ("delta", "mid", "residual_rho", "residual_sigma", "subadditivity_gap", "flags")


def csv_header(spec: SweepSpec) -> list[str]:
    return ["point"] + [ax.name for ax in spec.axes] + list(CSV_FIELDS)


def report_row(report: CorrelationReport) -> list[str]:
    vals = report.values()
    row = [_fmt(vals[q]) for q in QUANTITIES + ("delta", "mid")]
    row += [_fmt(report.residual_rho), _fmt(report.residual_sigma), _fmt(report.subadditivity_gap)]
    row.append(";".join(sorted(k for k, v in report.flags.items() if v)))
    return row


def _fmt(v) -> str:
    return "" if v is None else f"{float(v):.12g}"


def sweep(spec: SweepSpec) -> Iterator[list[str]]:
    """Yield one CSV row per grid point, in row-major grid order."""
    opts = spec.options()
    points = list(spec.grid())

    def work(item):
        i, point = item
        x = build_family(spec.family, point, spec.fixed)
        rep = full_analysis(x, opts)
        return [str(i)] + [_fmt(point[ax.name]) for ax in spec.axes] + report_row(rep)

    threads = default_threads()
    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            yield from pool.map(work, enumerate(points))
    else:
        for item in enumerate(points):
            yield work(item)


def write_sweep(spec: SweepSpec, stream) -> int:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(csv_header(spec))
    n = 0
    for row in sweep(spec):
        writer.writerow(row)
        n += 1
    return n
