"""Both directions of the classical HJE / Dirac-Hestenes equivalence."""

from __future__ import annotations

import logging
from typing import Literal, NamedTuple

import numpy as np

from stalab import sta_core as sc
from stalab.field_lab.fields import ConstantField, PlaneWaveSpinor, affine_scalar
from stalab.field_lab.grid import Grid4, grid_gradient
from stalab.field_lab.residuals import dh_residual, hje_residual
from stalab.sta_core import Multivector
from stalab.spinor_kit import MomentumSpec, invariant_decompose

logger = logging.getLogger(__name__)

Direction = Literal["hje_to_dirac", "dirac_to_hje", "both"]

DEFAULT_EVENTS = np.array(
    [
        [0.0, 0.0, 0.0, 0.0],
        [0.3, -0.2, 0.5, 0.1],
        [-1.1, 0.7, 0.2, -0.4],
        [2.5, 1.0, -1.5, 0.8],
    ]
)


class EquivalenceReport(NamedTuple):
    direction: str
    hje_residual: float
    dh_residual: float
    recovered_hje_residual: float
    momentum_error: float

    def max_residual(self) -> float:
        return max(abs(self.hje_residual), self.dh_residual, abs(self.recovered_hje_residual))


def action_field(spec: MomentumSpec):
    """S(x) = S_0 - Pi_mu x^mu."""
    return affine_scalar(spec.action_phase, -np.asarray(spec.pi))


def _hje_to_dirac(spec: MomentumSpec, events: np.ndarray) -> tuple[float, float]:
    s = action_field(spec)
    a = ConstantField(spec.a_vector())
    psi = PlaneWaveSpinor(spec)
    hje = max((hje_residual(s, a, spec.mass, spec.charge, x) for x in events), key=abs)
    dh = max(sc.norm(dh_residual(psi, a, spec.mass, spec.charge, x)) for x in events)
    return float(hje), float(dh)


def extract_phase(psi_values: np.ndarray, reference: Multivector) -> np.ndarray:
    """Wrapped phase S - S(ref) of a classical spinor sampled on a grid.

    ``psi_values`` has shape counts + (16,); ``reference`` is the rotor at the
    reference node.
    """
    shape = psi_values.shape[:-1]
    flat = psi_values.reshape(-1, sc.DIM)
    ref_inv = sc.reverse(reference).coeffs
    phase = np.empty(len(flat))
    for i, c in enumerate(flat):
        rotor = invariant_decompose(Multivector(c)).rotor
        u = sc.gp_batch(ref_inv, rotor.coeffs)
        # exp(s g21) = cos s - sin s g12
        phase[i] = np.arctan2(-u[8], u[0])
    return phase.reshape(shape)


def phase_gradient(phase: np.ndarray, grid: Grid4, order: int = 4) -> np.ndarray:
    """dS/dx^mu at interior nodes, unwrapping along each coordinate line before differencing.

    S enters only through derivatives so the additive branch is irrelevant.
    """
    parts = []
    for mu in range(4):
        grad = grid_gradient(np.unwrap(phase, axis=mu), grid, order)
        parts.append(grad[..., mu])
    return np.stack(parts, axis=-1)


def _dirac_to_hje(spec: MomentumSpec, events: np.ndarray, h: float) -> tuple[float, float]:
    psi = PlaneWaveSpinor(spec)
    worst_hje, worst_pi = 0.0, 0.0
    for x in events:
        grid = Grid4.centered(x, 2 * h, h)
        values = psi.evaluate(grid.points())
        reference = invariant_decompose(psi.value(grid.origin)).rotor
        grad = phase_gradient(extract_phase(values, reference), grid, order=4)
        pi = -grad[0, 0, 0, 0]
        p = sc.vector(*pi) + spec.a_vector() * spec.charge
        worst_hje = max(worst_hje, abs(sc.dot(p, p) - spec.mass**2))
        worst_pi = max(worst_pi, float(np.linalg.norm(pi - np.asarray(spec.pi))))
    return worst_hje, worst_pi


def equivalence_suite(
    spec: MomentumSpec,
    direction: Direction = "both",
    events=None,
    h: float = 0.05,
) -> EquivalenceReport:
    """Check HJE -> Dirac (analytic derivatives) and Dirac -> HJE (phase recovery)."""
    if direction not in ("hje_to_dirac", "dirac_to_hje", "both"):
        raise ValueError(f"unknown direction {direction!r}")
    events = DEFAULT_EVENTS if events is None else np.asarray(events, dtype=np.float64).reshape(-1, 4)
    hje = dh = recovered = pi_err = 0.0
    if direction in ("hje_to_dirac", "both"):
        hje, dh = _hje_to_dirac(spec, events)
        logger.info("HJE -> Dirac: hje residual %.3e, dh residual %.3e", hje, dh)
    if direction in ("dirac_to_hje", "both"):
        recovered, pi_err = _dirac_to_hje(spec, events, h)
        logger.info("Dirac -> HJE: recovered hje residual %.3e, momentum error %.3e", recovered, pi_err)
    return EquivalenceReport(direction, hje, dh, recovered, pi_err)
