"""Golden checks against known closed forms and worked examples."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import states
from .classical import closest_classical_state, discord, mid, original_discord
from .entanglement import ree
from .linalg import binary_entropy, shannon_entropy
from .report import full_analysis


@dataclass
class Check:
    name: str
    value: float
    expected: float
    tol: float

    @property
    def ok(self) -> bool:
        return abs(self.value - self.expected) <= self.tol


@dataclass
class AtLeast(Check):
    @property
    def ok(self) -> bool:
        return self.value >= self.expected - self.tol


def run_selftest() -> list[Check]:
    rows: list[Check] = []

    w = full_analysis(states.w_state()).values()
    for key, ref, tol in (
        ("E", 1.17, 0.02),
        ("D", 1.58, 0.01),
        ("Q", 0.94, 0.02),
        ("C_rho", 1.17, 0.01),
        ("C_sigma", 0.36, 0.02),
        ("L_rho", 0.0, 0.01),
        ("L_sigma", 0.24, 0.02),
    ):
        rows.append(Check(f"W {key}", w[key], ref, tol))

    c4 = full_analysis(states.cluster_state_4()).values()
    rows.append(Check("C4 E", c4["E"], 2.0, 5e-3))
    rows.append(Check("C4 Q", c4["Q"], 0.0, 5e-3))
    rows.append(Check("C4 C_rho", c4["C_rho"], 2.0, 1e-3))
    rows.append(Check("C4 T_rho - (E + C_rho)", c4["T_rho"] - c4["E"] - c4["C_rho"], 0.0, 1e-2))

    bd = states.bell_diagonal([0.7, 0.1, 0.1, 0.1])
    rows.append(Check("Bell-diag E = 1 - h(l1)", ree(bd).value, 1 - binary_entropy(0.7), 1e-9))
    rows.append(Check("Bell-diag S(chi) = 1 + h(l1+l2)", closest_classical_state(bd).entropy_chi, 1 + binary_entropy(0.8), 1e-6))
    t_bd = 2.0 - shannon_entropy([0.7, 0.1, 0.1, 0.1])
    rows.append(Check("Bell-diag one-sided discord", original_discord(bd).value, t_bd - (1 - binary_entropy(0.8)), 1e-6))

    phi = states.bell_diagonal([1, 0, 0, 0])
    rows.append(Check("Phi+ E", ree(phi).value, 1.0, 1e-9))
    rows.append(Check("Phi+ D", discord(phi).value, 1.0, 1e-6))
    rows.append(Check("Phi+ MID", mid(phi).value, 1.0, 1e-9))

    x = states.mid_counterexample(0.6, [0.3, 0.25, 0.25, 0.2])
    rows.append(AtLeast("MID - D on the two-basin state", mid(x).value - discord(x).value, 0.05, 0.0))

    t_w = 3 * binary_entropy(1 / 3)
    rows.append(AtLeast("W subadditivity gap", t_w - (w["E"] + w["Q"] + w["C_sigma"]), 0.0, 1e-3))
    rows.append(Check("W T_rho = 3 h(1/3)", w["T_rho"], t_w, 1e-9))
    rows.append(Check("W E = log2(27/12)", w["E"], math.log2(27 / 12), 1e-9))
    return rows
