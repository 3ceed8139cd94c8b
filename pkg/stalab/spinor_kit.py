"""Spinor-level constructions on even multivectors.

An invertible Dirac-Hestenes spinor factors as
``psi = sqrt(rho) * exp(g0123 * beta / 2) * R`` with ``R`` a rotor. This
module computes that factorisation, builds the boost rotor that carries
``g0`` to the kinetic momentum ``(Pi + eA) / m``, and reads velocity and
spin observables off a spinor.
"""

from __future__ import annotations

import logging
import math
from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from stalab import sta_core as sc
from stalab.sta_core import Multivector
from stalab.utils.errors import (
    DegenerateBoost,
    NonClassicalBeta,
    NonUnitVelocity,
    NotEven,
    OffShell,
    SingularSpinor,
    SingularVersor,
)

logger = logging.getLogger(__name__)

EVEN_INDEX = np.array([0, 5, 6, 7, 8, 9, 10, 15])
EVEN_NAMES = [sc.BLADE_NAMES[i] for i in EVEN_INDEX]
ON_SHELL_TOL = 1e-9
BETA_TOL = 1e-9


class EvenMultivector(Multivector):
    """Element of the even subalgebra (grades 0, 2 and 4).

    Accepts either the 8 even coefficients in the order of ``EVEN_NAMES`` or
    a full 16-coefficient array whose odd part is negligible.
    """

    __slots__ = ()

    def __init__(self, coeffs=None, tol: float = 1e-12):
        if isinstance(coeffs, Multivector):
            coeffs = coeffs.coeffs
        if coeffs is None:
            super().__init__()
            return
        arr = np.asarray(coeffs, dtype=np.float64).ravel()
        if arr.size == len(EVEN_INDEX):
            full = np.zeros(sc.DIM)
            full[EVEN_INDEX] = arr
        elif arr.size == sc.DIM:
            scale = max(1.0, float(np.max(np.abs(arr))))
            odd = np.abs(arr[sc.GRADES % 2 == 1])
            if np.any(odd > tol * scale):
                raise NotEven(f"odd part of size {odd.max():.3e} in an even multivector")
            full = sc.even_batch(arr)
        else:
            raise ValueError(f"expected 8 or 16 coefficients, got {arr.size}")
        super().__init__(full)

    @property
    def even_coeffs(self) -> np.ndarray:
        return np.array(self.coeffs[EVEN_INDEX])

    def __repr__(self) -> str:
        return f"EvenMultivector({sc.format_multivector(self, compact=True)})"


class InvariantFactors(NamedTuple):
    rho: float
    beta: float
    rotor: EvenMultivector


class SpinObservables(NamedTuple):
    omega: Multivector
    spin: Multivector


class MomentumSpec(BaseModel):
    """Canonical momentum, potential and charge data of a plane-wave solution.

    Components are covariant (``pi = Pi_mu``), natural units.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    pi: tuple[float, float, float, float]
    a_pot: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    mass: float = Field(gt=0.0)
    charge: float = 0.0
    action_phase: float = 0.0

    @field_validator("pi", "a_pot", mode="before")
    @classmethod
    def _split(cls, value):
        if isinstance(value, str):
            return tuple(float(v) for v in value.split(","))
        return value

    def pi_vector(self) -> Multivector:
        return sc.vector(*self.pi)

    def a_vector(self) -> Multivector:
        return sc.vector(*self.a_pot)

    def kinetic(self) -> Multivector:
        """Pi + eA."""
        return self.pi_vector() + self.a_vector() * self.charge

    def on_shell_defect(self) -> float:
        p = self.kinetic()
        return sc.dot(p, p) - self.mass**2

    def with_mass(self, mass: float) -> "MomentumSpec":
        return self.model_copy(update={"mass": mass})


def as_even(a: Multivector) -> EvenMultivector:
    return a if isinstance(a, EvenMultivector) else EvenMultivector(a.coeffs)


def compose(rho: float, beta: float, rotor: Multivector) -> EvenMultivector:
    if rho < 0.0:
        raise ValueError(f"rho must be non-negative, got {rho}")
    phase = sc.scalar(math.cos(beta / 2)) + sc.G5 * math.sin(beta / 2)
    return as_even(sc.gp(phase, rotor) * math.sqrt(rho))


def invariant_decompose(psi: Multivector, eps_scale: float = sc.DEFAULT_EPS_SCALE) -> InvariantFactors:
    """Split psi into density rho, Takabayashi angle beta and a rotor."""
    psi = as_even(psi)
    n = sc.gp(psi, sc.reverse(psi))
    s, p = n[0], n[15]
    rho = math.hypot(s, p)
    size = float(np.max(np.abs(psi.coeffs)))
    eps = eps_scale * size**2
    if rho <= eps:
        raise SingularSpinor(f"psi*reverse(psi) has magnitude {rho:.3e} <= {eps:.3e}")
    beta = math.atan2(p, s)
    if beta <= -math.pi:
        beta = math.pi
    unphase = sc.scalar(math.cos(beta / 2)) - sc.G5 * math.sin(beta / 2)
    rotor = as_even(sc.gp(psi, unphase) / math.sqrt(rho))
    return InvariantFactors(rho, beta, rotor)


def beta_distance(beta: float) -> float:
    """Angular distance of beta from the classical set {0, pi}."""
    b = abs(beta)
    return min(b, abs(math.pi - b))


def is_rotor(r: Multivector, tol: float = 1e-12) -> bool:
    if sc.grade_mask(r, tol) - {0, 2, 4}:
        return False
    return sc.gp(r, sc.reverse(r)).allclose(sc.ONE, atol=tol)


def _check_on_shell(spec: MomentumSpec, tol: float) -> Multivector:
    p = spec.kinetic()
    defect = spec.on_shell_defect()
    scale = max(1.0, spec.mass**2, p[1] ** 2)
    if abs(defect) > tol * scale:
        raise OffShell(f"(Pi + eA)^2 - m^2 = {defect:.3e} exceeds {tol * scale:.3e}")
    return p


def boost_rotor(spec: MomentumSpec, tol: float = ON_SHELL_TOL) -> EvenMultivector:
    """R = (m + (Pi + eA) g0) / sqrt(2 m (m + Pi_0 + eA_0)).

    ``R g0 reverse(R) = (Pi + eA) / m`` for forward on-shell momenta.
    """
    p = _check_on_shell(spec, tol)
    m = spec.mass
    denom = m + p[1]
    if denom <= tol * m:
        raise DegenerateBoost(f"m + Pi_0 + eA_0 = {denom:.3e} is not positive")
    r = (sc.gp(p, sc.G0) + m) / math.sqrt(2.0 * m * denom)
    return as_even(r)


def boost_rotor_exp(spec: MomentumSpec, tol: float = ON_SHELL_TOL) -> EvenMultivector:
    """Exponential form exp((chi / 2) n) of the boost rotor, n the unit boost plane."""
    p = _check_on_shell(spec, tol)
    m = spec.mass
    if m + p[1] <= tol * m:
        raise DegenerateBoost(f"m + Pi_0 + eA_0 = {m + p[1]:.3e} is not positive")
    plane = sc.wedge(p, sc.G0)
    size = math.sqrt(max(sc.scalar_part(sc.gp(plane, plane)), 0.0))
    if size <= 1e-15 * max(1.0, abs(p[1])):
        return as_even(sc.ONE)
    chi = math.asinh(size / m)
    return as_even(sc.exp_biform(plane * (0.5 * chi / size)))


def rotor_from_velocity(v: Multivector, tol: float = 1e-9) -> EvenMultivector:
    """Boost rotor taking g0 to the unit forward 1-form v."""
    vv = sc.dot(v, v)
    if abs(vv - 1.0) > tol:
        raise NonUnitVelocity(f"v^2 = {vv:.12g}, expected 1")
    denom = 1.0 + v[1]
    if denom <= tol:
        raise DegenerateBoost("velocity is not future pointing")
    return as_even((sc.gp(v, sc.G0) + 1.0) / math.sqrt(2.0 * denom))


def classical_spinor(spec: MomentumSpec, tol: float = ON_SHELL_TOL) -> EvenMultivector:
    """psi = R(Pi) exp(S g21) at the action phase carried by ``spec``."""
    r = boost_rotor(spec, tol)
    return as_even(sc.gp(r, sc.exp_biform(sc.G21 * spec.action_phase)))


def spinor_inverse(psi: Multivector, eps_scale: float = sc.DEFAULT_EPS_SCALE) -> Multivector:
    try:
        return sc.versor_inverse(psi, eps_scale)
    except SingularVersor as exc:
        raise SingularSpinor(str(exc)) from exc


def velocity(psi: Multivector, eps_scale: float = sc.DEFAULT_EPS_SCALE) -> Multivector:
    """Grade-1 velocity psi g0 psi^-1 of a classical spinor (beta 0 or pi)."""
    factors = invariant_decompose(psi, eps_scale)
    if beta_distance(factors.beta) > BETA_TOL:
        raise NonClassicalBeta(f"beta = {factors.beta:.12g} is neither 0 nor pi")
    full = sc.gp(sc.gp(psi, sc.G0), spinor_inverse(psi, eps_scale))
    v = sc.grade(full, 1)
    logger.debug("velocity grade-3 leak %.3e, v^2 - 1 = %.3e", sc.norm(sc.grade(full, 3)), sc.dot(v, v) - 1.0)
    return v


def spin_observables(psi: Multivector, k: float, eps_scale: float = sc.DEFAULT_EPS_SCALE) -> SpinObservables:
    """Spin biform k psi g21 reverse(psi) and the spin 1-form dual(Omega) ⌞ V."""
    v = velocity(psi, eps_scale)
    omega = sc.sandwich(psi, sc.G21) * k
    return SpinObservables(omega, sc.rcontract(sc.dual(omega), v))


def rotate_dilate(psi: Multivector, v: Multivector) -> Multivector:
    """v -> psi v reverse(psi), a rotation scaled by rho."""
    return sc.sandwich(psi, v)


def random_on_shell(
    rng: np.random.Generator,
    mass_range: tuple[float, float] = (0.5, 2.0),
    max_rapidity: float = 2.0,
    with_potential: bool = True,
) -> MomentumSpec:
    """Random spec with (Pi + eA)^2 = m^2 and a future-pointing kinetic momentum."""
    m = float(rng.uniform(*mass_range))
    n = rng.normal(size=3)
    n /= np.linalg.norm(n)
    chi = float(rng.uniform(0.0, max_rapidity))
    # covariant spatial components carry the opposite sign of the contravariant ones
    kinetic = np.concatenate(([m * math.cosh(chi)], -m * math.sinh(chi) * n))
    if with_potential:
        e = float(rng.uniform(-1.0, 1.0))
        a = rng.normal(scale=0.5, size=4)
    else:
        e, a = 0.0, np.zeros(4)
    pi = kinetic - e * a
    return MomentumSpec(
        pi=tuple(pi.tolist()),
        a_pot=tuple(a.tolist()),
        mass=m,
        charge=e,
        action_phase=float(rng.uniform(-math.pi, math.pi)),
    )


def random_even(rng: np.random.Generator, scale: float = 1.0) -> EvenMultivector:
    return EvenMultivector(rng.normal(scale=scale, size=len(EVEN_INDEX)))
