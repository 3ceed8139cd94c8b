"""Generalised Hamilton-Jacobi report for a general (non-classical) spinor field.

For ``psi = sqrt(rho) exp(beta g0123 / 2) R`` the Dirac-Hestenes equation,
multiplied on the right by ``psi^-1``, splits into

    -dS = m cos(beta) V - e A + <T>_1,     <T>_3 = 0,
    T   = m sin(beta) g0123 V - G,

with ``V = R g0 R~`` and ``G`` the gradient term built from
``d ln psi_0`` and the gradient of beta. Three readings of the beta term are
available through ``mode``:

``linear``  (default) ``G = (d ln psi_0) J + g0123 (d beta) / 2``
``log``     the same with ``d beta / beta``; points with beta <= 0 are masked
``exact``   ``G = (d ln psi_0 + (d beta) g0123 / 2) J``, what the product rule gives

where ``J = psi g21 psi^-1``. The ``exact`` reading makes the residual equal
the grade-1 part of the Dirac-Hestenes residual times ``psi^-1``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import pandas as pd

from stalab import sta_core as sc
from stalab.field_lab.fields import MultivectorField, as_points
from stalab.field_lab.grid import Grid4
from stalab.sta_core import Multivector
from stalab.spinor_kit import invariant_decompose
from stalab.utils.errors import SingularSpinor

logger = logging.getLogger(__name__)

GhjeMode = Literal["linear", "log", "exact"]
MODES = ("linear", "log", "exact")
METADATA = {
    "beta_term": "the beta-gradient term is applied after the psi psi^-1 cancellation",
    "constraint": "grade-3 part of T inherits the chosen beta-gradient reading",
}


@dataclass(frozen=True)
class GhjeReport:
    points: np.ndarray
    mode: str
    beta_field: np.ndarray
    variable_mass: np.ndarray
    quantum_potential_1form: np.ndarray
    constraint_grade3_norm: np.ndarray
    ghje_residual_1form: np.ndarray
    decomposition_residual: np.ndarray
    masked: np.ndarray
    metadata: dict = field(default_factory=lambda: dict(METADATA))

    @property
    def masked_count(self) -> int:
        return int(np.count_nonzero(self.masked))

    def max_abs(self, name: str) -> float:
        values = np.asarray(getattr(self, name))
        if values.ndim > 1:
            values = np.linalg.norm(values, axis=-1)
        keep = values[~self.masked] if values.shape[:1] == self.masked.shape else values
        return float(np.max(np.abs(keep))) if keep.size else 0.0

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.points, columns=["t", "x", "y", "z"])
        frame["beta"] = self.beta_field
        frame["variable_mass"] = self.variable_mass
        frame["constraint_grade3_norm"] = self.constraint_grade3_norm
        frame["decomposition_residual"] = self.decomposition_residual
        frame["masked"] = self.masked
        for mu in range(4):
            frame[f"quantum_potential_{mu}"] = self.quantum_potential_1form[:, mu]
            frame[f"ghje_residual_{mu}"] = self.ghje_residual_1form[:, mu]
        frame.index.name = "node"
        return frame


def _region_points(region) -> np.ndarray:
    if isinstance(region, Grid4):
        return region.points().reshape(-1, 4)
    return as_points(region).reshape(-1, 4)


def _point_terms(psi: Multivector, grad: np.ndarray, eps_scale: float):
    """Pieces of the decomposition at one event.

    Returns beta, V, J, d ln psi_0 (vector part), d beta, dS and the direct
    product d psi g21 psi^-1.
    """
    rho, beta, rotor = invariant_decompose(psi, eps_scale)
    inv = sc.versor_inverse(psi, eps_scale)
    rrev = sc.reverse(rotor)
    v = sc.sandwich(rotor, sc.G0)
    j = sc.sandwich(rotor, sc.G21)
    d_log_psi0 = sc.Multivector()
    d_beta = np.zeros(4)
    d_s = np.zeros(4)
    for mu, g in enumerate(sc.GAMMA_UP):
        lmu = sc.gp(inv, Multivector(grad[mu]))
        omega = sc.grade(lmu, 2)
        d_beta[mu] = 2.0 * lmu[15]
        d_s[mu] = -sc.dot(omega, sc.G21)
        k_mu = sc.gp(sc.gp(rotor, omega - sc.G21 * d_s[mu]), rrev) + lmu[0]
        d_log_psi0 = d_log_psi0 + sc.gp(g, k_mu)
    direct = Multivector(np.zeros(sc.DIM))
    for mu, g in enumerate(sc.GAMMA_UP):
        direct = direct + sc.gp(g, Multivector(grad[mu]))
    direct = sc.gp(sc.gp(direct, sc.G21), inv)
    return beta, v, j, d_log_psi0, d_beta, d_s, direct


def ghje_report(
    bpsi: MultivectorField,
    a: MultivectorField,
    m: float,
    e: float,
    region,
    mode: GhjeMode = "linear",
    eps_scale: float = sc.DEFAULT_EPS_SCALE,
) -> GhjeReport:
    if mode not in MODES:
        raise ValueError(f"unknown ghje mode {mode!r}, expected one of {MODES}")
    pts = _region_points(region)
    n = len(pts)
    values = bpsi.evaluate(pts)
    grads = bpsi.gradient_array(pts)
    a_values = a.evaluate(pts)

    beta_field = np.zeros(n)
    q = np.zeros((n, 4))
    constraint = np.zeros(n)
    residual = np.zeros((n, 4))
    decomposition = np.zeros(n)
    masked = np.zeros(n, dtype=bool)

    for i in range(n):
        try:
            beta, v, j, d_log_psi0, d_beta, d_s, direct = _point_terms(Multivector(values[i]), grads[i], eps_scale)
        except SingularSpinor:
            logger.error("non-invertible spinor at node %d", i)
            raise
        beta_field[i] = beta
        d_beta_vec = sc.vector(*d_beta)
        exact = sc.gp(d_log_psi0 + sc.gp(d_beta_vec, sc.G5) * 0.5, j)
        d_s_vec = sc.vector(*d_s)
        decomposition[i] = sc.norm(exact - d_s_vec - direct)

        if mode == "exact":
            g_term = exact
        else:
            slope = d_beta_vec
            if mode == "log":
                if beta <= 0.0:
                    masked[i] = True
                    continue
                slope = d_beta_vec / beta
            g_term = sc.gp(d_log_psi0, j) + sc.gp(sc.G5, slope) * 0.5

        t = sc.gp(sc.G5, v) * (m * np.sin(beta)) - g_term
        q[i] = sc.vector_components(-sc.grade(g_term, 1))
        constraint[i] = sc.norm(sc.grade(t, 3))
        rhs = v * (m * np.cos(beta)) - Multivector(a_values[i]) * e + sc.grade(t, 1)
        residual[i] = sc.vector_components(-d_s_vec - rhs)

    if masked.any():
        logger.warning("log-beta reading masked %d of %d points with beta <= 0", int(masked.sum()), n)
        q[masked] = np.nan
        constraint[masked] = np.nan
        residual[masked] = np.nan

    return GhjeReport(
        points=pts,
        mode=mode,
        beta_field=beta_field,
        variable_mass=m * np.cos(beta_field),
        quantum_potential_1form=q,
        constraint_grade3_norm=constraint,
        ghje_residual_1form=residual,
        decomposition_residual=decomposition,
        masked=masked,
    )
