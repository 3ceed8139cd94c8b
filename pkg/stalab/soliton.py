"""Subluminal soliton potential and its massless field.

The potential is ``A = C * E(xi) * P(omega t - k z) * g1`` with
``E(xi) = sin(m xi) / xi``, ``xi^2 = x^2 + y^2 + Gamma^2 (z - v t)^2`` and
``P`` either ``sin`` or ``cos``. ``F0 = dA`` is even with grades 0 and 2, and
both ``d^2 A`` and ``d F0`` vanish because ``omega^2 - k^2 = m^2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from stalab import sta_core as sc
from stalab.field_lab.fields import AnalyticField, as_points
from stalab.field_lab.grid import Grid4, grid_dalembertian, grid_dirac_op
from stalab.sta_core import Multivector
from stalab.spinor_kit import EvenMultivector
from stalab.utils.errors import SingularVersor, SuperluminalSpeed

logger = logging.getLogger(__name__)

Phase = Literal["sin", "cos"]
ENVELOPE_SERIES_CUTOFF = 1e-4
SLOPE_SERIES_CUTOFF = 1e-2
_G1 = 2
_G01 = 5


class SolitonParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    amplitude: float
    mass: float = Field(gt=0.0)
    speed: float = Field(ge=0.0)
    gamma: float
    omega: float
    wavenumber: float
    phase: Phase = "sin"
    # omega^2 - k^2 = dispersion_factor * m^2; 1 for genuine solutions
    dispersion_factor: float = 1.0

    def dispersion_defect(self) -> float:
        return self.omega**2 - self.wavenumber**2 - self.mass**2


def params_from(amplitude: float, m: float, v: float, phase: Phase = "sin") -> SolitonParams:
    if v >= 1.0:
        raise SuperluminalSpeed(f"soliton speed must be below 1, got {v}")
    if v < 0.0:
        raise ValueError(f"soliton speed must be non-negative, got {v}")
    if m <= 0.0:
        raise ValueError(f"mass must be positive, got {m}")
    gamma = 1.0 / math.sqrt(1.0 - v * v)
    return SolitonParams(
        amplitude=amplitude,
        mass=m,
        speed=v,
        gamma=gamma,
        omega=gamma * m,
        wavenumber=gamma * m * v,
        phase=phase,
    )


def with_broken_dispersion(p: SolitonParams, factor: float = 2.0) -> SolitonParams:
    """Control case with omega^2 - k^2 = factor * m^2 and the same k."""
    omega = math.sqrt(p.wavenumber**2 + factor * p.mass**2)
    return p.model_copy(update={"omega": omega, "dispersion_factor": factor})


def boosted_event(p: SolitonParams, x) -> np.ndarray:
    """Co-moving coordinates (t', x, y, z') of an event."""
    pts = as_points(x)
    t, z = pts[..., 0], pts[..., 3]
    out = pts.copy()
    out[..., 0] = p.gamma * (t - p.speed * z)
    out[..., 3] = p.gamma * (z - p.speed * t)
    return out


def _xi(p: SolitonParams, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    u = pts[..., 3] - p.speed * pts[..., 0]
    xi = np.sqrt(pts[..., 1] ** 2 + pts[..., 2] ** 2 + (p.gamma * u) ** 2)
    return xi, u


def envelope(m: float, xi: np.ndarray) -> np.ndarray:
    """sin(m xi) / xi with the limit m at the centre."""
    xi = np.asarray(xi, dtype=np.float64)
    small = m * xi < ENVELOPE_SERIES_CUTOFF
    safe = np.where(small, 1.0, xi)
    return np.where(small, m * (1.0 - (m * xi) ** 2 / 6.0), np.sin(m * safe) / safe)


def envelope_slope(m: float, xi: np.ndarray) -> np.ndarray:
    """E'(xi) / xi = (m xi cos(m xi) - sin(m xi)) / xi^3, finite at the centre."""
    xi = np.asarray(xi, dtype=np.float64)
    small = m * xi < SLOPE_SERIES_CUTOFF
    safe = np.where(small, 1.0, xi)
    exact = (m * safe * np.cos(m * safe) - np.sin(m * safe)) / safe**3
    x2 = xi * xi
    series = -(m**3) / 3.0 + m**5 * x2 / 30.0 - m**7 * x2 * x2 / 840.0
    return np.where(small, series, exact)


def _carrier(p: SolitonParams, phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if p.phase == "sin":
        return np.sin(phi), np.cos(phi)
    return np.cos(phi), -np.sin(phi)


def potential_scalar(p: SolitonParams, points) -> np.ndarray:
    pts = as_points(points)
    xi, _ = _xi(p, pts)
    carrier, _ = _carrier(p, p.omega * pts[..., 0] - p.wavenumber * pts[..., 3])
    return p.amplitude * envelope(p.mass, xi) * carrier


def potential_gradient(p: SolitonParams, points) -> np.ndarray:
    """d a / d x^mu for the scalar amplitude a of the potential, shape (..., 4)."""
    pts = as_points(points)
    xi, u = _xi(p, pts)
    carrier, slope = _carrier(p, p.omega * pts[..., 0] - p.wavenumber * pts[..., 3])
    g = envelope_slope(p.mass, xi)
    e = envelope(p.mass, xi)
    g2 = p.gamma**2
    # E'(xi) d xi = g * (xi d xi)
    xi_dxi = np.stack([-p.speed * g2 * u, pts[..., 1], pts[..., 2], g2 * u], axis=-1)
    dphi = np.array([p.omega, 0.0, 0.0, -p.wavenumber])
    grad = (g * carrier)[..., None] * xi_dxi + (e * slope)[..., None] * dphi
    return p.amplitude * grad


def potential_at(p: SolitonParams, x) -> Multivector:
    c = np.zeros(sc.DIM)
    c[_G1] = float(potential_scalar(p, x))
    return Multivector(c)


def f0_batch(p: SolitonParams, points) -> np.ndarray:
    """F0 = (gamma^mu d_mu a) g1 at every point, shape (..., 16)."""
    grad = potential_gradient(p, points)
    vec = np.zeros(grad.shape[:-1] + (sc.DIM,))
    vec[..., 1:5] = grad
    return sc.gp_batch(vec, sc.G1.coeffs)


def f0_at(p: SolitonParams, x) -> EvenMultivector:
    return EvenMultivector(f0_batch(p, as_points(x)))


def potential_field(p: SolitonParams) -> AnalyticField:
    def value(pts):
        out = np.zeros(pts.shape[:-1] + (sc.DIM,))
        out[..., _G1] = potential_scalar(p, pts)
        return out

    def gradient(pts):
        out = np.zeros(pts.shape[:-1] + (4, sc.DIM))
        out[..., _G1] = potential_gradient(p, pts)
        return out

    return AnalyticField(value, gradient)


def f0_field(p: SolitonParams) -> AnalyticField:
    return AnalyticField(lambda pts: f0_batch(p, pts))


def wave_residual(p: SolitonParams, grid: Grid4, order: int = 2) -> np.ndarray:
    """|d^2 A| at interior nodes by second differences."""
    return np.abs(grid_dalembertian(potential_scalar(p, grid.points()), grid, order))


def massless_dirac_residual(p: SolitonParams, grid: Grid4, order: int = 2) -> np.ndarray:
    """|d F0| at interior nodes, differentiating analytic F0 samples."""
    return np.linalg.norm(grid_dirac_op(f0_batch(p, grid.points()), grid, order), axis=-1)


RESIDUALS = {"wave": wave_residual, "dirac": massless_dirac_residual}


@dataclass(frozen=True)
class ConvergenceReport:
    residual: str
    h: float
    coarse_max: float
    fine_max: float
    ratio: float
    expected_ratio: float
    tolerance: float

    @property
    def converged(self) -> bool:
        return abs(self.ratio - self.expected_ratio) <= self.tolerance * self.expected_ratio


def convergence_study(
    p: SolitonParams,
    residual: str = "wave",
    center=(0.35, 0.3, -0.25, 0.4),
    extent: float = 0.2,
    h: float = 0.02,
    order: int = 2,
    tolerance: float = 0.2,
) -> ConvergenceReport:
    """Max residual on the nodes shared by spacings h and h/2.

    An order-``order`` stencil on a genuine solution shrinks the residual by
    ``2**order`` when h halves.
    """
    fn = RESIDUALS[residual]
    coarse = Grid4.centered(center, extent / 2, h)
    fine = Grid4.centered(center, extent / 2, h / 2)
    w = order // 2
    r_coarse = fn(p, coarse, order)
    r_fine = fn(p, fine, order)
    # coarse interior index i is node i + w, i.e. fine node 2(i + w), i.e. fine interior index 2i + w
    n_interior = r_coarse.shape[0]
    common = slice(w, w + 2 * n_interior, 2)
    r_fine = r_fine[common, common, common, common]
    coarse_max = float(np.max(r_coarse))
    fine_max = float(np.max(r_fine))
    ratio = coarse_max / fine_max if fine_max > 0.0 else math.inf
    logger.info("%s residual: h=%g max %.3e, h/2 max %.3e, ratio %.3f", residual, h, coarse_max, fine_max, ratio)
    return ConvergenceReport(residual, h, coarse_max, fine_max, ratio, 2.0**order, tolerance)


@dataclass(frozen=True)
class RestFrameReport:
    g01_max_error: float
    other_components_max: float
    points: int


def rest_frame_check(p: SolitonParams, points) -> RestFrameReport:
    """Compare the g01 part of F0 with C m E(r) P'(m t) in the rest frame.

    The remaining components come from the spatial gradient of the envelope
    and are reported, not required to vanish.
    """
    if p.speed != 0.0:
        raise ValueError("rest_frame_check needs a soliton at rest")
    pts = points.points().reshape(-1, 4) if isinstance(points, Grid4) else as_points(points).reshape(-1, 4)
    f0 = f0_batch(p, pts)
    r = np.linalg.norm(pts[:, 1:], axis=-1)
    _, slope = _carrier(p, p.mass * pts[:, 0])
    expected = p.amplitude * p.mass * envelope(p.mass, r) * slope
    others = f0.copy()
    others[:, _G01] = 0.0
    return RestFrameReport(
        g01_max_error=float(np.max(np.abs(f0[:, _G01] - expected))),
        other_components_max=float(np.max(np.linalg.norm(others, axis=-1))),
        points=len(pts),
    )


@dataclass(frozen=True)
class VelocityConstraintReport:
    events: np.ndarray
    skipped: np.ndarray
    grade1_purity_defect: np.ndarray
    deviation: np.ndarray
    unit_defect: np.ndarray
    target: np.ndarray

    @property
    def evaluated(self) -> int:
        return int(np.count_nonzero(~self.skipped))


def velocity_constraint_report(p: SolitonParams, events, eps_scale: float = sc.DEFAULT_EPS_SCALE) -> VelocityConstraintReport:
    """m F0 g0 F0^-1 against the constant 1-form m Gamma (g0 - v g3) at each event."""
    pts = as_points(events).reshape(-1, 4)
    target = sc.vector(p.mass * p.gamma, 0.0, 0.0, -p.mass * p.gamma * p.speed)
    n = len(pts)
    skipped = np.zeros(n, dtype=bool)
    purity = np.full(n, np.nan)
    deviation = np.full(n, np.nan)
    unit = np.full(n, np.nan)
    for i, c in enumerate(f0_batch(p, pts)):
        f0 = Multivector(c)
        try:
            inv = sc.versor_inverse(f0, eps_scale)
        except SingularVersor:
            skipped[i] = True
            continue
        w = sc.gp(sc.gp(f0, sc.G0), inv) * p.mass
        w1 = sc.grade(w, 1)
        purity[i] = sc.norm(w - w1)
        deviation[i] = sc.norm(w1 - target)
        unit[i] = abs(sc.dot(w1, w1) / p.mass**2 - 1.0)
    if skipped.any():
        logger.warning("skipped %d of %d events where F0 is not invertible", int(skipped.sum()), n)
    return VelocityConstraintReport(pts, skipped, purity, deviation, unit, sc.vector_components(target))
