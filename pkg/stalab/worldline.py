"""Timelike worldlines: Lorentz-force integration and transported frames.

Vectors along a curve are stored as arrays of covariant components on
``g0..g3``; events are contravariant coordinates, so ``dx^mu / dtau =
eta^{mu mu} v_mu``. Every integrator is classical RK4 on the proper-time grid
of a :class:`Trajectory`; mid-step values of v and a come from cubic Hermite
interpolants built on the recorded derivative chain.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
import pandas as pd
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from stalab import sta_core as sc
from stalab.field_lab.fields import ConstantField, ModulatedSpinor, MultivectorField
from stalab.field_lab.residuals import dh_residual
from stalab.sta_core import Multivector
from stalab.spinor_kit import EVEN_INDEX, EVEN_NAMES, is_rotor, rotor_from_velocity
from stalab.utils.errors import (
    NonOrthogonalSpin,
    NonOrthonormalFrame,
    NonRotorInitial,
    NonUnitVelocity,
)

logger = logging.getLogger(__name__)

ETA = np.asarray(sc.METRIC)
STATE_TOL = 1e-9
CHAIN_EPS = 1e-12


def mdot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Metric inner product of covariant component arrays along the last axis."""
    return np.sum(ETA * a * b, axis=-1)


def _as_mv(comps: np.ndarray) -> np.ndarray:
    out = np.zeros(np.shape(comps)[:-1] + (sc.DIM,))
    out[..., 1:5] = comps
    return out


def _components(mv: np.ndarray) -> np.ndarray:
    return np.asarray(mv)[..., 1:5]


def _gamma_down_frame(rotor: Multivector) -> np.ndarray:
    return np.array([sc.vector_components(sc.sandwich(rotor, g)) for g in sc.GAMMA_DOWN])


@dataclass(frozen=True)
class WorldlineState:
    tau: float
    event: np.ndarray
    velocity: np.ndarray
    coframe: np.ndarray
    rotor: Multivector
    spin: np.ndarray

    def __post_init__(self):
        vv = float(mdot(self.velocity, self.velocity))
        if abs(vv - 1.0) > STATE_TOL:
            raise NonUnitVelocity(f"v^2 = {vv:.12g}, expected 1")
        gram = np.einsum("am,bm,m->ab", self.coframe, self.coframe, ETA)
        if not np.allclose(gram, np.diag(ETA), atol=STATE_TOL):
            raise NonOrthonormalFrame("coframe is not orthonormal")
        if not is_rotor(self.rotor, STATE_TOL):
            raise NonRotorInitial("state rotor does not satisfy R R~ = 1")
        sv = float(mdot(self.spin, self.velocity))
        if abs(sv) > STATE_TOL * max(1.0, float(abs(mdot(self.spin, self.spin)))):
            raise NonOrthogonalSpin(f"S.v = {sv:.3e}")


def initial_state(velocity, event=(0.0, 0.0, 0.0, 0.0), spin=None, tau: float = 0.0) -> WorldlineState:
    """State whose coframe is the boost of the standard frame to ``velocity``."""
    v = np.asarray(velocity, dtype=np.float64)
    rotor = rotor_from_velocity(sc.vector(*v))
    frame = _gamma_down_frame(rotor)
    s = frame[3] if spin is None else np.asarray(spin, dtype=np.float64)
    return WorldlineState(tau, np.asarray(event, dtype=np.float64), v, frame, rotor, s)


@dataclass(frozen=True)
class Trajectory:
    tau: np.ndarray
    events: np.ndarray
    velocities: np.ndarray
    accelerations: np.ndarray
    jerks: np.ndarray
    snaps: np.ndarray
    charge_to_mass: float
    constant_field: bool

    @property
    def steps(self) -> int:
        return len(self.tau) - 1

    def velocity_norm_drift(self) -> float:
        return float(np.max(np.abs(mdot(self.velocities, self.velocities) - 1.0)))


class Interpolants(NamedTuple):
    velocity: CubicHermiteSpline
    acceleration: CubicHermiteSpline


def interpolants(traj: Trajectory) -> Interpolants:
    return Interpolants(
        CubicHermiteSpline(traj.tau, traj.velocities, traj.accelerations, axis=0),
        CubicHermiteSpline(traj.tau, traj.accelerations, traj.jerks, axis=0),
    )


FieldLike = Multivector | MultivectorField


def _force_matrix(f: Multivector, qm: float) -> np.ndarray:
    """Matrix M with (qm v ⌟ F) = M v on covariant components."""
    basis = _as_mv(np.eye(4))
    return _components(sc.lcontract_batch(basis, f.coeffs)).T * qm


def lorentz_integrate(
    initial: WorldlineState,
    f: FieldLike,
    m: float,
    e: float,
    dtau: float,
    steps: int,
    renormalize: bool = False,
) -> Trajectory:
    """RK4 for m dv/dtau = e v ⌟ F, dx^mu/dtau = eta^{mu mu} v_mu.

    ``f`` is a constant biform or a field evaluated at the current event.
    The drift of v^2 is reported, not corrected, unless ``renormalize``.
    """
    if dtau <= 0.0:
        raise ValueError("dtau must be positive")
    if m <= 0.0:
        raise ValueError("mass must be positive")
    qm = e / m
    constant = isinstance(f, Multivector)
    matrix = _force_matrix(f, qm) if constant else None

    def accel(x: np.ndarray, v: np.ndarray) -> np.ndarray:
        if constant:
            return matrix @ v
        fx = f.evaluate(x[None, :])[0]
        return qm * _components(sc.lcontract_batch(_as_mv(v), fx))

    n = steps + 1
    tau = initial.tau + dtau * np.arange(n)
    xs = np.empty((n, 4))
    vs = np.empty((n, 4))
    xs[0], vs[0] = initial.event, initial.velocity
    for i in range(steps):
        x, v = xs[i], vs[i]
        k1x, k1v = ETA * v, accel(x, v)
        k2x, k2v = ETA * (v + 0.5 * dtau * k1v), accel(x + 0.5 * dtau * k1x, v + 0.5 * dtau * k1v)
        k3x, k3v = ETA * (v + 0.5 * dtau * k2v), accel(x + 0.5 * dtau * k2x, v + 0.5 * dtau * k2v)
        k4x, k4v = ETA * (v + dtau * k3v), accel(x + dtau * k3x, v + dtau * k3v)
        xs[i + 1] = x + dtau / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        vn = v + dtau / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if renormalize:
            vn = vn / math.sqrt(mdot(vn, vn))
        vs[i + 1] = vn

    if constant:
        acc = vs @ matrix.T
        jerk = acc @ matrix.T
        snap = jerk @ matrix.T
    else:
        acc = np.array([accel(x, v) for x, v in zip(xs, vs)])
        jerk = np.gradient(acc, tau, axis=0, edge_order=2)
        snap = np.gradient(jerk, tau, axis=0, edge_order=2)
    traj = Trajectory(tau, xs, vs, acc, jerk, snap, qm, constant)
    logger.info("integrated %d steps, max |v^2 - 1| = %.3e", steps, traj.velocity_norm_drift())
    return traj


def _rk4_along(traj: Trajectory, y0: np.ndarray, rhs: Callable[[float, np.ndarray], np.ndarray],
               after_step: Callable[[np.ndarray], np.ndarray] | None = None) -> np.ndarray:
    ys = np.empty((len(traj.tau),) + np.shape(y0))
    ys[0] = y0
    for i in range(traj.steps):
        t0, h = traj.tau[i], traj.tau[i + 1] - traj.tau[i]
        y = ys[i]
        k1 = rhs(t0, y)
        k2 = rhs(t0 + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t0 + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t0 + h, y + h * k3)
        yn = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        ys[i + 1] = after_step(yn) if after_step is not None else yn
    return ys


def _fermi_rhs(interp: Interpolants) -> Callable[[float, np.ndarray], np.ndarray]:
    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        v = interp.velocity(t)
        a = interp.acceleration(t)
        return mdot(y, v)[..., None] * a - mdot(a, y)[..., None] * v

    return rhs


def fermi_transport(y0, traj: Trajectory) -> np.ndarray:
    """DY/dtau = (Y.v) a - (a.Y) v = (a ∧ v) ⌞ Y; accepts one vector or a stack."""
    y0 = np.asarray(y0, dtype=np.float64)
    return _rk4_along(traj, y0, _fermi_rhs(interpolants(traj)))


def fermi_darboux(traj: Trajectory) -> Callable[[float], np.ndarray]:
    """tau -> a ∧ v, the rotation biform of a Fermi-transported frame."""
    interp = interpolants(traj)

    def omega(t: float) -> np.ndarray:
        return sc.wedge_batch(_as_mv(interp.acceleration(t)), _as_mv(interp.velocity(t)))

    return omega


def darboux_of_frame(frame: np.ndarray, dframe: np.ndarray, tol: float = STATE_TOL) -> Multivector:
    """Omega_D = 1/2 sum_b (D e_b) ∧ e^b for an orthonormal frame e_b with derivatives."""
    frame = np.asarray(frame, dtype=np.float64)
    gram = np.einsum("am,bm,m->ab", frame, frame, ETA)
    if not np.allclose(gram, np.diag(ETA), atol=tol):
        raise NonOrthonormalFrame(f"frame Gram matrix deviates by {np.max(np.abs(gram - np.diag(ETA))):.3e}")
    upper = ETA[:, None] * frame
    omega = sc.wedge_batch(_as_mv(np.asarray(dframe)), _as_mv(upper)).sum(axis=0) * 0.5
    return Multivector(omega)


def darboux_reconstruction_residual(frame: np.ndarray, dframe: np.ndarray, omega) -> float:
    """max_a |D e_a - Omega ⌞ e_a|."""
    rebuilt = _components(sc.rcontract_batch(sc.as_coeffs(omega), _as_mv(np.asarray(frame))))
    return float(np.max(np.linalg.norm(np.asarray(dframe) - rebuilt, axis=-1)))


class RotorTrack(NamedTuple):
    rotors: np.ndarray
    max_renormalization: float

    def frames(self) -> np.ndarray:
        """e_a = R gamma_a R~ at every sample, shape (N, 4, 4)."""
        out = np.empty((len(self.rotors), 4, 4))
        for i, r in enumerate(self.rotors):
            out[i] = _gamma_down_frame(Multivector(r))
        return out


def rotor_evolve(r0, omega, traj: Trajectory) -> RotorTrack:
    """DR/dtau = 1/2 Omega R with renormalisation to R R~ = 1 after each step.

    ``omega`` is a callable tau -> 16 coefficients or an (N, 16) array sampled
    on ``traj.tau`` (cubic-spline interpolated at mid-steps).
    """
    r0 = Multivector(sc.as_coeffs(r0))
    if not is_rotor(r0, STATE_TOL):
        raise NonRotorInitial("initial rotor does not satisfy R R~ = 1")
    if callable(omega):
        omega_at = omega
    else:
        samples = np.asarray(omega, dtype=np.float64)
        omega_at = CubicSpline(traj.tau, samples, axis=0)

    corrections: list[float] = []

    def rhs(t: float, r: np.ndarray) -> np.ndarray:
        return 0.5 * sc.gp_batch(omega_at(t), r)

    def renormalize(r: np.ndarray) -> np.ndarray:
        size = math.sqrt(sc.gp_batch(r, sc.reverse_batch(r))[0])
        corrections.append(abs(size - 1.0))
        return r / size

    rotors = _rk4_along(traj, r0.coeffs.copy(), rhs, renormalize)
    worst = max(corrections, default=0.0)
    logger.debug("rotor renormalisation mean %.3e over %d steps", float(np.mean(corrections or [0.0])), len(corrections))
    logger.info("rotor renormalisation max %.3e", worst)
    return RotorTrack(rotors, worst)


def spin_part(omega_d, v, a) -> Multivector:
    """Omega_D - a ∧ v, the part of the rotation beyond Fermi transport."""
    return Multivector(sc.as_coeffs(omega_d)) - sc.wedge(sc.vector(*a), sc.vector(*v))


def pauli_lubanski(spin: np.ndarray, k: float) -> np.ndarray:
    return k * np.asarray(spin)


class SpinTrack(NamedTuple):
    spin: np.ndarray
    pauli_lubanski: np.ndarray


def spin_evolution(s0, traj: Trajectory, k: float) -> SpinTrack:
    """DS/dtau = -S ⌟ (a ∧ v) for a torque-free spin 1-form, W = k S."""
    s0 = np.asarray(s0, dtype=np.float64)
    sv = float(mdot(s0, traj.velocities[0]))
    if abs(sv) > STATE_TOL * max(1.0, abs(float(mdot(s0, s0)))):
        raise NonOrthogonalSpin(f"S0.v0 = {sv:.3e}")
    interp = interpolants(traj)

    def rhs(t: float, s: np.ndarray) -> np.ndarray:
        bivector = sc.wedge_batch(_as_mv(interp.acceleration(t)), _as_mv(interp.velocity(t)))
        return -_components(sc.lcontract_batch(_as_mv(s), bivector))

    spins = _rk4_along(traj, s0, rhs)
    return SpinTrack(spins, pauli_lubanski(spins, k))


# ---------------------------------------------------------------------------
# Frenet frames
# ---------------------------------------------------------------------------

class Curvatures(NamedTuple):
    kappa0: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray


@dataclass(frozen=True)
class FrenetFrame:
    frames: np.ndarray
    curvatures: Curvatures
    rank: np.ndarray = field(repr=False)

    @property
    def degenerate_frenet(self) -> bool:
        """Straight worldline somewhere: |a| below the chain threshold."""
        return bool(np.any(self.rank == 1))

    @property
    def degenerate(self) -> bool:
        return bool(np.any(self.rank < 4))

    def darboux(self) -> np.ndarray:
        """kappa0 f1∧f0 + kappa1 f2∧f1 + kappa2 f3∧f2 at every sample."""
        f = _as_mv(self.frames)
        k0, k1, k2 = self.curvatures
        return (
            k0[:, None] * sc.wedge_batch(f[:, 1], f[:, 0])
            + k1[:, None] * sc.wedge_batch(f[:, 2], f[:, 1])
            + k2[:, None] * sc.wedge_batch(f[:, 3], f[:, 2])
        )


def _project_out(u: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    w = u.copy()
    for b in basis:
        w = w - mdot(w, b) / mdot(b, b) * b
    return w


def _normalize(w: np.ndarray) -> np.ndarray:
    return w / math.sqrt(abs(float(mdot(w, w))))


def _orientation_completion(f0: np.ndarray, f1: np.ndarray, f2: np.ndarray) -> np.ndarray:
    tri = sc.wedge_batch(sc.wedge_batch(_as_mv(f0), _as_mv(f1)), _as_mv(f2))
    f3 = _normalize(_components(sc.gp_batch(tri, sc.G5.coeffs)))
    # orientation of the lower-index standard frame, whose 4-volume is -g0123
    if sc.wedge_batch(tri, _as_mv(f3))[15] > 0.0:
        f3 = -f3
    return f3


def _complete(frame: list[np.ndarray]) -> list[np.ndarray]:
    for mu in range(4):
        if len(frame) == 3:
            break
        w = _project_out(np.eye(4)[mu], frame)
        if abs(float(mdot(w, w))) > 1e-6:
            frame.append(_normalize(w))
    return frame + [_orientation_completion(*frame[:3])]


def _frenet_point(v, a, jerk, snap, eps: float):
    f0 = v
    k0 = math.sqrt(max(-float(mdot(a, a)), 0.0))
    if k0 * k0 < eps:
        return _complete([f0]), (0.0, 0.0, 0.0), 1
    f1 = a / k0
    w2 = _project_out(jerk, [f0, f1])
    size2 = -float(mdot(w2, w2))
    if size2 < eps:
        return _complete([f0, f1]), (k0, 0.0, 0.0), 2
    norm2 = math.sqrt(size2)
    f2 = -w2 / norm2
    k1 = float(mdot(jerk, f2)) / k0
    f3 = _orientation_completion(f0, f1, f2)
    k2 = -float(mdot(snap, f3)) / norm2
    return [f0, f1, f2, f3], (k0, k1, k2), 4


def frenet_frame(traj: Trajectory, eps: float = CHAIN_EPS) -> FrenetFrame:
    """Frenet coframe f^0 = v, f^1 = a / kappa0, kappa1 >= 0, positively oriented.

    Chains that die early are completed from the coordinate basis with the
    missing curvatures set to zero; ``rank`` records where that happened.
    """
    n = len(traj.tau)
    frames = np.empty((n, 4, 4))
    kappas = np.zeros((n, 3))
    rank = np.empty(n, dtype=int)
    for i in range(n):
        frame, ks, rank[i] = _frenet_point(traj.velocities[i], traj.accelerations[i], traj.jerks[i], traj.snaps[i], eps)
        frames[i] = np.array(frame)
        kappas[i] = ks
    if np.any(rank == 1):
        logger.warning("degenerate Frenet chain: straight worldline on %d samples", int(np.sum(rank == 1)))
    elif np.any(rank < 4):
        logger.warning("degenerate Frenet chain: planar acceleration on %d samples", int(np.sum(rank < 4)))
    return FrenetFrame(frames, Curvatures(kappas[:, 0], kappas[:, 1], kappas[:, 2]), rank)


class AlignedSpin(NamedTuple):
    kappa2: float
    frame: np.ndarray
    rotor: Multivector


def align_spin_plane(omega_s, frame: np.ndarray) -> AlignedSpin:
    """Rotate the spatial triad of ``frame`` so a spatial spin biform reads kappa2 f^2 ∧ f^1.

    The rotation keeps f0 and is the smallest one carrying f3 onto the spin
    axis (up to sign).
    """
    frame = np.asarray(frame, dtype=np.float64)
    f0 = sc.vector(*frame[0])
    axis = sc.rcontract(sc.dual(Multivector(sc.as_coeffs(omega_s))), f0)
    size2 = -sc.dot(axis, axis)
    if size2 <= 0.0:
        return AlignedSpin(0.0, frame.copy(), sc.ONE)
    axis = axis / math.sqrt(size2)
    old = sc.vector(*frame[3])
    if sc.dot(old, axis) > 0.0:
        axis = -axis
    rotor = (sc.ONE - sc.gp(axis, old)) / math.sqrt(2.0 * (1.0 - sc.dot(old, axis)))
    aligned = np.array([sc.vector_components(sc.sandwich(rotor, sc.vector(*f))) for f in frame])
    spin_axis = sc.rcontract(sc.dual(Multivector(sc.as_coeffs(omega_s))), f0)
    kappa2 = sc.dot(spin_axis, sc.vector(*aligned[3]))
    return AlignedSpin(kappa2, aligned, rotor)


# ---------------------------------------------------------------------------
# free-particle plane wave from a spinning frame
# ---------------------------------------------------------------------------

class PlaneWaveEquivalence(NamedTuple):
    mass: float
    momentum: np.ndarray
    dirac_residual: float
    rotor_equation_residual: float
    comoving_residual: float | None


def plane_wave_equivalence(kappa2: float, velocity, events=None, taus=(0.0, 0.7, 2.3)) -> PlaneWaveEquivalence:
    """psi(x) = psi_0 exp(g21 p.x) with p = (kappa2 / 2) v solves the free equation with m = -kappa2 / 2.

    Along the worldline x(tau) = tau v the restriction R(tau) obeys
    dR/dtau = 1/2 kappa2 f2 f1 R with f_a = R g_a R~; in the co-moving frame
    (v = g0) dR/dtau is also checked against d_t psi.
    """
    v = np.asarray(velocity, dtype=np.float64)
    vv = float(mdot(v, v))
    if abs(vv - 1.0) > STATE_TOL:
        raise NonUnitVelocity(f"v^2 = {vv:.12g}, expected 1")
    p = 0.5 * kappa2 * v
    m = -0.5 * kappa2
    psi0 = rotor_from_velocity(sc.vector(*v))
    wave = ModulatedSpinor(rotor=psi0, momentum=-p)
    zero = ConstantField(0.0)
    events = np.array([[0.0, 0.0, 0.0, 0.0], [0.4, -0.3, 1.2, 0.5], [-2.0, 0.1, 0.3, -0.7]]) if events is None else np.asarray(events, dtype=np.float64)
    dirac = max(sc.norm(dh_residual(wave, zero, m, 0.0, x)) for x in events.reshape(-1, 4))

    contravariant = ETA * v
    rotor_residual = 0.0
    comoving = 0.0 if np.allclose(v, [1.0, 0.0, 0.0, 0.0], atol=STATE_TOL) else None
    for tau in taus:
        x = tau * contravariant
        r = wave.value(x)
        grad = wave.gradient(x)
        d_r = Multivector(contravariant @ grad)
        f2f1 = sc.gp(sc.sandwich(r, sc.G2), sc.sandwich(r, sc.G1))
        expected = sc.gp(f2f1, r) * (0.5 * kappa2)
        rotor_residual = max(rotor_residual, sc.norm(d_r - expected))
        if comoving is not None:
            comoving = max(comoving, sc.norm(Multivector(grad[0]) - expected))
    return PlaneWaveEquivalence(m, p, float(dirac), rotor_residual, comoving)


# ---------------------------------------------------------------------------
# scenarios and export
# ---------------------------------------------------------------------------

def cyclotron_field(strength: float) -> Multivector:
    return sc.wedge(sc.G1, sc.G2) * strength


def hyperbolic_field(strength: float) -> Multivector:
    return sc.wedge(sc.G1, sc.G0) * strength


def scenario(name: str, strength: float = 1.0, rapidity: float = 0.0) -> tuple[WorldlineState, Multivector]:
    """Initial state and constant field for ``free``, ``cyclotron`` or ``hyperbolic``."""
    if name == "free":
        return initial_state((math.cosh(rapidity), 0.0, 0.0, -math.sinh(rapidity))), Multivector()
    if name == "cyclotron":
        v = (math.cosh(rapidity), -math.sinh(rapidity), 0.0, 0.0)
        return initial_state(v), cyclotron_field(strength)
    if name == "hyperbolic":
        return initial_state((1.0, 0.0, 0.0, 0.0)), hyperbolic_field(strength)
    raise ValueError(f"unknown worldline scenario {name!r}")


def rotation_period(traj: Trajectory, plane: tuple[int, int] = (1, 2)) -> float:
    """Proper time for the spatial velocity to turn once around in ``plane``."""
    i, j = plane
    angle = np.unwrap(np.arctan2(traj.velocities[:, j], traj.velocities[:, i]))
    swept = np.abs(angle - angle[0])
    if swept[-1] < 2 * math.pi:
        raise ValueError("trajectory does not complete one revolution")
    k = int(np.searchsorted(swept, 2 * math.pi))
    return float(np.interp(2 * math.pi, swept[k - 1 : k + 1], traj.tau[k - 1 : k + 1]))


def trajectory_frame(traj: Trajectory, coframe=None, rotors=None, spins=None) -> pd.DataFrame:
    """Columns tau, t..z, v0..v3, e{a}_{mu}, R_<even blade>, S0..S3; absent parts are NaN."""
    n = len(traj.tau)
    data = {"tau": traj.tau}
    for mu, name in enumerate(["t", "x", "y", "z"]):
        data[name] = traj.events[:, mu]
    for mu in range(4):
        data[f"v{mu}"] = traj.velocities[:, mu]
    frames = np.full((n, 4, 4), np.nan) if coframe is None else np.asarray(coframe)
    for a in range(4):
        for mu in range(4):
            data[f"e{a}_{mu}"] = frames[:, a, mu]
    rot = np.full((n, sc.DIM), np.nan) if rotors is None else np.asarray(rotors)
    for idx, name in zip(EVEN_INDEX, EVEN_NAMES):
        data[f"R_{name}"] = rot[:, idx]
    spin = np.full((n, 4), np.nan) if spins is None else np.asarray(spins)
    for mu in range(4):
        data[f"S{mu}"] = spin[:, mu]
    return pd.DataFrame(data)
