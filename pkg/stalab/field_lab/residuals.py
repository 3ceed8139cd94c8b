"""Dirac operator and residuals of the first-order field equations.

Sign conventions: ``Pi = -dS`` and the linear Dirac-Hestenes equation reads
``d psi g21 - m psi g0 + e A psi = 0``.
"""

from __future__ import annotations

import logging
import math
from typing import NamedTuple

import numpy as np

from stalab import sta_core as sc
from stalab.field_lab.fields import MultivectorField, PlaneWaveSpinor
from stalab.sta_core import Multivector
from stalab.spinor_kit import MomentumSpec
from stalab.utils.errors import NonPositiveDensity, NonUnitVelocity

logger = logging.getLogger(__name__)

UNIT_VELOCITY_TOL = 1e-9


def _apply_gammas(grad: np.ndarray, table=sc.gp_batch) -> Multivector:
    out = np.zeros(sc.DIM)
    for mu, g in enumerate(sc.GAMMA_UP):
        out += table(g.coeffs, grad[mu])
    return Multivector(out)


def dirac_op(f: MultivectorField, x) -> Multivector:
    """gamma^mu d_mu f at x."""
    return _apply_gammas(f.gradient(x))


def exterior_derivative(f: MultivectorField, x) -> Multivector:
    """d f = gamma^mu wedge d_mu f."""
    return _apply_gammas(f.gradient(x), sc.wedge_batch)


def hje_residual(s: MultivectorField, a: MultivectorField, m: float, e: float, x) -> float:
    """(Pi + eA)^2 - m^2 with Pi = -dS."""
    pi = -dirac_op(s, x)
    p = pi + a.value(x) * e
    return sc.dot(p, p) - m * m


def _unit_velocity(v: MultivectorField, x) -> Multivector:
    vx = v.value(x)
    vv = sc.dot(vx, vx)
    if abs(vv - 1.0) > UNIT_VELOCITY_TOL:
        raise NonUnitVelocity(f"V^2 = {vv:.12g} at {list(np.asarray(x, dtype=float))}")
    return vx


def lorentz_consistency(v: MultivectorField, a: MultivectorField, m: float, e: float, x) -> Multivector:
    """V ⌟ d(mV - eA); zero whenever mV - eA is exact."""
    vx = _unit_velocity(v, x)
    form = m * v + (-e) * a
    return sc.lcontract(vx, exterior_derivative(form, x))


class VelocityGradient(NamedTuple):
    contract_dirac: Multivector
    contract_curl: Multivector
    contract_exterior: Multivector
    directional: Multivector


def velocity_gradient_identity(v: MultivectorField, x) -> VelocityGradient:
    """The four equal forms of the acceleration of a unit velocity field.

    V ⌟ (dV), V ⌟ (d ∧ V), V ⌟ dV and (V . d) V agree whenever V^2 = 1.
    """
    vx = _unit_velocity(v, x)
    grad = v.gradient(x)
    curl = _apply_gammas(grad, sc.wedge_batch)
    contravariant = np.asarray(sc.METRIC) * sc.vector_components(vx)
    directional = Multivector(contravariant @ grad)
    return VelocityGradient(
        contract_dirac=sc.lcontract(vx, dirac_op(v, x)),
        contract_curl=sc.lcontract(vx, curl),
        contract_exterior=sc.lcontract(vx, exterior_derivative(v, x)),
        directional=directional,
    )


def dh_residual(psi: MultivectorField, a: MultivectorField, m: float, e: float, x) -> Multivector:
    """d psi g21 - m psi g0 + e A psi at x."""
    p = psi.value(x)
    return sc.gp(dirac_op(psi, x), sc.G21) - sc.gp(p, sc.G0) * m + sc.gp(a.value(x), p) * e


def nonlinear_dh_residual(rho: MultivectorField, spec: MomentumSpec, x) -> Multivector:
    """Residual of the density-modulated equation for psi = sqrt(rho) R(Pi) exp(S g21).

    d psi g21 - m psi g0 + e A psi - (d ln psi_0) psi g21 with
    d ln psi_0 = d ln(rho) / 2. ``A`` is the constant potential of ``spec``.
    """
    r = float(rho.value(x)[0])
    if r <= 0.0:
        raise NonPositiveDensity(f"rho = {r:.3e} at {list(np.asarray(x, dtype=float))}")
    dr = rho.gradient(x)[:, 0]
    wave = PlaneWaveSpinor(spec)
    root = math.sqrt(r)
    psi_c = wave.value(x)
    psi = psi_c * root
    grad = dr[:, None] / (2.0 * root) * psi_c.coeffs + root * wave.gradient(x)
    d_psi = _apply_gammas(grad)
    log_psi0 = sc.vector(*(0.5 * dr / r))
    psi_i = sc.gp(psi, sc.G21)
    return (
        sc.gp(d_psi, sc.G21)
        - sc.gp(psi, sc.G0) * spec.mass
        + sc.gp(spec.a_vector(), psi) * spec.charge
        - sc.gp(log_psi0, psi_i)
    )


def log_derivative_check(psi0: MultivectorField, rho: MultivectorField, x) -> float:
    """|gamma^mu (d_mu psi_0) psi_0^-1 - d ln(rho) / 2| for a field psi_0 = sqrt(rho) R."""
    p = psi0.value(x)
    inv = sc.versor_inverse(p)
    grad = psi0.gradient(x)
    lhs = Multivector(sum(sc.gp_batch(g.coeffs, sc.gp_batch(grad[mu], inv.coeffs)) for mu, g in enumerate(sc.GAMMA_UP)))
    r = float(rho.value(x)[0])
    if r <= 0.0:
        raise NonPositiveDensity(f"rho = {r:.3e}")
    rhs = sc.vector(*(0.5 * rho.gradient(x)[:, 0] / r))
    return sc.norm(lhs - rhs)
