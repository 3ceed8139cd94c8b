"""Multivector-valued fields on Minkowski spacetime.

Every field evaluates on arrays of events of shape ``(..., 4)`` (contravariant
coordinates ``t, x, y, z``) and returns coefficients of shape ``(..., 16)``.
Closed-form families also return exact first derivatives ``d f / d x^mu`` with
shape ``(..., 4, 16)``.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from numbers import Real
from typing import Callable

import numpy as np

from stalab import sta_core as sc
from stalab.sta_core import Multivector
from stalab.spinor_kit import MomentumSpec, classical_spinor

logger = logging.getLogger(__name__)

ArrayFn = Callable[[np.ndarray], np.ndarray]


def as_points(x) -> np.ndarray:
    pts = np.asarray(x, dtype=np.float64)
    if pts.shape[-1] != 4:
        raise ValueError(f"events need 4 coordinates, got shape {pts.shape}")
    return pts


class MultivectorField(ABC):
    analytic = True

    @abstractmethod
    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Coefficients at ``points``, shape ``(..., 16)``."""

    @abstractmethod
    def gradient_array(self, points: np.ndarray) -> np.ndarray:
        """Partial derivatives at ``points``, shape ``(..., 4, 16)``."""

    def value(self, x) -> Multivector:
        return Multivector(self.evaluate(as_points(x)[None, :])[0])

    def gradient(self, x) -> np.ndarray:
        return self.gradient_array(as_points(x)[None, :])[0]

    def __add__(self, other: "MultivectorField") -> "MultivectorField":
        return SumField(self, other)

    def __mul__(self, other):
        if isinstance(other, Real):
            return ScaledField(float(other), self)
        return ProductField(self, other)

    def __rmul__(self, other):
        if isinstance(other, Real):
            return ScaledField(float(other), self)
        return NotImplemented


class ConstantField(MultivectorField):
    def __init__(self, value):
        self.constant = Multivector(sc.as_coeffs(value))

    def evaluate(self, points):
        pts = as_points(points)
        return np.broadcast_to(self.constant.coeffs, pts.shape[:-1] + (sc.DIM,)).copy()

    def gradient_array(self, points):
        pts = as_points(points)
        return np.zeros(pts.shape[:-1] + (4, sc.DIM))


class LinearField(MultivectorField):
    """f(x) = c + x^mu * slope[mu]."""

    def __init__(self, constant, slope):
        self.constant = Multivector(sc.as_coeffs(constant))
        self.slope = np.asarray(slope, dtype=np.float64).reshape(4, sc.DIM)

    def evaluate(self, points):
        pts = as_points(points)
        return self.constant.coeffs + pts @ self.slope

    def gradient_array(self, points):
        pts = as_points(points)
        return np.broadcast_to(self.slope, pts.shape[:-1] + (4, sc.DIM)).copy()


class CoordinateField(LinearField):
    """The scalar coordinate field x^mu."""

    def __init__(self, mu: int, scale: float = 1.0):
        slope = np.zeros((4, sc.DIM))
        slope[mu, 0] = scale
        super().__init__(0.0, slope)
        self.mu = mu


def affine_scalar(offset: float, covector) -> LinearField:
    """Scalar field offset + k_mu x^mu."""
    slope = np.zeros((4, sc.DIM))
    slope[:, 0] = np.asarray(covector, dtype=np.float64)
    return LinearField(offset, slope)


def _phase_factor(s: np.ndarray) -> np.ndarray:
    """Coefficients of exp(s g21) = cos s + sin s g21."""
    out = np.zeros(s.shape + (sc.DIM,))
    out[..., 0] = np.cos(s)
    out += np.sin(s)[..., None] * sc.G21.coeffs
    return out


class PlaneWaveSpinor(MultivectorField):
    """psi(x) = psi_0 exp(S(x) g21) with S(x) = S_0 - Pi_mu x^mu."""

    def __init__(self, spec: MomentumSpec, amplitude: float = 1.0):
        self.spec = spec
        self.amplitude = amplitude
        self.psi0 = classical_spinor(spec.model_copy(update={"action_phase": 0.0})) * amplitude
        self.pi = np.asarray(spec.pi, dtype=np.float64)

    def phase(self, points) -> np.ndarray:
        return self.spec.action_phase - as_points(points) @ self.pi

    def evaluate(self, points):
        return sc.gp_batch(self.psi0.coeffs, _phase_factor(self.phase(points)))

    def gradient_array(self, points):
        psi_i = sc.gp_batch(self.evaluate(points), sc.G21.coeffs)
        return -self.pi[:, None] * psi_i[..., None, :]


class ModulatedSpinor(MultivectorField):
    """sqrt(rho) exp(beta g0123 / 2) R0 exp(S g21) with Gaussian rho, affine beta and S.

    ``rho = rho0 * exp(-|x - center|^2 / (2 width^2))`` uses the coordinate
    Euclidean norm; ``width=None`` keeps rho constant.
    """

    def __init__(
        self,
        rotor: Multivector = sc.ONE,
        rho0: float = 1.0,
        center=(0.0, 0.0, 0.0, 0.0),
        width: float | None = None,
        beta0: float = 0.0,
        beta_slope=(0.0, 0.0, 0.0, 0.0),
        phase0: float = 0.0,
        momentum=(0.0, 0.0, 0.0, 0.0),
    ):
        if rho0 <= 0.0:
            raise ValueError("rho0 must be positive")
        self.rotor = Multivector(sc.as_coeffs(rotor))
        self.rho0 = rho0
        self.center = np.asarray(center, dtype=np.float64)
        self.width = width
        self.beta0 = beta0
        self.beta_slope = np.asarray(beta_slope, dtype=np.float64)
        self.phase0 = phase0
        self.momentum = np.asarray(momentum, dtype=np.float64)

    def log_rho_gradient(self, points) -> np.ndarray:
        pts = as_points(points)
        if self.width is None:
            return np.zeros(pts.shape)
        return -(pts - self.center) / self.width**2

    def rho(self, points) -> np.ndarray:
        pts = as_points(points)
        if self.width is None:
            return np.full(pts.shape[:-1], self.rho0)
        r2 = np.sum((pts - self.center) ** 2, axis=-1)
        return self.rho0 * np.exp(-r2 / (2.0 * self.width**2))

    def beta(self, points) -> np.ndarray:
        return self.beta0 + as_points(points) @ self.beta_slope

    def phase(self, points) -> np.ndarray:
        return self.phase0 - as_points(points) @ self.momentum

    def evaluate(self, points):
        pts = as_points(points)
        b = self.beta(pts)
        duality = np.zeros(b.shape + (sc.DIM,))
        duality[..., 0] = np.cos(b / 2)
        duality[..., 15] = np.sin(b / 2)
        out = sc.gp_batch(sc.gp_batch(duality, self.rotor.coeffs), _phase_factor(self.phase(pts)))
        return np.sqrt(self.rho(pts))[..., None] * out

    def gradient_array(self, points):
        pts = as_points(points)
        psi = self.evaluate(pts)
        half_log = 0.5 * self.log_rho_gradient(pts)
        dual_part = sc.gp_batch(sc.G5.coeffs, psi)
        phase_part = sc.gp_batch(psi, sc.G21.coeffs)
        return (
            half_log[..., :, None] * psi[..., None, :]
            + 0.5 * self.beta_slope[:, None] * dual_part[..., None, :]
            - self.momentum[:, None] * phase_part[..., None, :]
        )


class AnalyticField(MultivectorField):
    """Field from user callables on point arrays.

    Without ``gradient_fn`` the gradient falls back to fourth-order central
    differences with step ``step`` and the field reports ``analytic = False``.
    """

    def __init__(self, value_fn: ArrayFn, gradient_fn: ArrayFn | None = None, step: float = 1e-4):
        self.value_fn = value_fn
        self.gradient_fn = gradient_fn
        self.step = step
        self.analytic = gradient_fn is not None

    def evaluate(self, points):
        return np.asarray(self.value_fn(as_points(points)), dtype=np.float64)

    def gradient_array(self, points):
        pts = as_points(points)
        if self.gradient_fn is not None:
            return np.asarray(self.gradient_fn(pts), dtype=np.float64)
        h = self.step
        rows = []
        for mu in range(4):
            e = np.zeros(4)
            e[mu] = h
            d = (
                -self.evaluate(pts + 2 * e)
                + 8 * self.evaluate(pts + e)
                - 8 * self.evaluate(pts - e)
                + self.evaluate(pts - 2 * e)
            ) / (12 * h)
            rows.append(d)
        return np.stack(rows, axis=-2)


class SumField(MultivectorField):
    def __init__(self, left: MultivectorField, right: MultivectorField):
        self.left, self.right = left, right
        self.analytic = left.analytic and right.analytic

    def evaluate(self, points):
        return self.left.evaluate(points) + self.right.evaluate(points)

    def gradient_array(self, points):
        return self.left.gradient_array(points) + self.right.gradient_array(points)


class ProductField(MultivectorField):
    """Pointwise geometric product; the gradient follows the product rule."""

    def __init__(self, left: MultivectorField, right: MultivectorField):
        self.left, self.right = left, right
        self.analytic = left.analytic and right.analytic

    def evaluate(self, points):
        return sc.gp_batch(self.left.evaluate(points), self.right.evaluate(points))

    def gradient_array(self, points):
        a, b = self.left.evaluate(points), self.right.evaluate(points)
        da, db = self.left.gradient_array(points), self.right.gradient_array(points)
        return sc.gp_batch(da, b[..., None, :]) + sc.gp_batch(a[..., None, :], db)


class ScaledField(MultivectorField):
    def __init__(self, factor: float, field: MultivectorField):
        self.factor, self.field = factor, field
        self.analytic = field.analytic

    def evaluate(self, points):
        return self.factor * self.field.evaluate(points)

    def gradient_array(self, points):
        return self.factor * self.field.gradient_array(points)
