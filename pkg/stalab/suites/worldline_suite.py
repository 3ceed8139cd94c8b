"""Scenario integration with transported frames, spin and the plane-wave construction."""

import logging
import math
from pathlib import Path

import numpy as np

from stalab import sta_core as sc
from stalab import worldline as wl
from stalab.suites import SuiteResult
from stalab.utils.config import RunConfig, Settings
from stalab.utils.errors import ConfigError

logger = logging.getLogger(__name__)

HYPERBOLIC_SPAN = 2.0
FREE_SPAN = 10.0
PERIOD_MARGIN = 1.05
CLOSED_FORM_SPAN = 10.0
CLOSED_FORM_RAPIDITY = 0.8


def _step(params) -> float:
    if params.dtau is not None:
        return params.dtau
    rate = abs(params.charge * params.strength) / params.mass
    if params.scenario == "cyclotron":
        return PERIOD_MARGIN * 2 * math.pi / rate / params.steps
    if params.scenario == "hyperbolic":
        return HYPERBOLIC_SPAN / rate / params.steps
    return FREE_SPAN / params.steps


def _oracle(params, traj: wl.Trajectory, v0: np.ndarray) -> tuple[str, float]:
    rate = abs(params.charge * params.strength) / params.mass
    if params.scenario == "cyclotron":
        return "cyclotron_period", abs(wl.rotation_period(traj) - 2 * math.pi / rate)
    if params.scenario == "hyperbolic":
        g = params.charge * params.strength / params.mass
        return "hyperbolic_v0", float(np.max(np.abs(traj.velocities[:, 0] - np.cosh(g * traj.tau))))
    return "free_velocity", float(np.max(np.abs(traj.velocities - v0)))


def _gram_drift(frames: np.ndarray) -> float:
    gram = np.einsum("nam,nbm,m->nab", frames, frames, wl.ETA)
    return float(np.max(np.abs(gram - gram[0])))


def _fermi_darboux_defect(traj: wl.Trajectory, frames: np.ndarray) -> float:
    """|Omega_D - a ∧ e_0| for the transported frame, with D e_a from the transport law."""
    worst = 0.0
    for k in range(0, len(traj.tau), max(1, len(traj.tau) // 50)):
        v, a, frame = traj.velocities[k], traj.accelerations[k], frames[k]
        dframe = wl.mdot(frame, v)[:, None] * a - wl.mdot(a, frame)[:, None] * v
        omega = wl.darboux_of_frame(frame, dframe)
        worst = max(worst, sc.norm(omega - sc.wedge(sc.vector(*a), sc.vector(*frame[0]))))
    return worst


def _closed_form_rotor(kappa2: float) -> float:
    """Constant Omega = kappa2 g21 from a z-boost rotor, against R0 exp(kappa2 g21 tau / 2)."""
    v = (math.cosh(CLOSED_FORM_RAPIDITY), 0.0, 0.0, -math.sinh(CLOSED_FORM_RAPIDITY))
    state = wl.initial_state(v)
    span = CLOSED_FORM_SPAN / abs(kappa2)
    steps = 2000
    traj = wl.lorentz_integrate(state, sc.Multivector(), 1.0, 0.0, span / steps, steps)
    omega = (sc.G21 * kappa2).coeffs
    track = wl.rotor_evolve(state.rotor, np.tile(omega, (len(traj.tau), 1)), traj)
    worst = 0.0
    for tau, r in zip(traj.tau, track.rotors):
        expected = sc.gp(state.rotor, sc.exp_biform(sc.G21 * (0.5 * kappa2 * tau)))
        worst = max(worst, sc.norm(sc.Multivector(r) - expected))
    return worst


def run(config: RunConfig, out_dir: Path, settings: Settings) -> SuiteResult:
    params = config.params
    if params.scenario == "cyclotron" and params.rapidity == 0.0:
        raise ConfigError("cyclotron scenario needs a non-zero rapidity")
    if params.scenario != "free" and params.charge * params.strength == 0.0:
        raise ConfigError(f"{params.scenario} scenario needs non-zero charge and field strength")
    if params.kappa2 == 0.0:
        raise ConfigError("kappa2 must be non-zero")

    state, field = wl.scenario(params.scenario, params.strength, params.rapidity)
    traj = wl.lorentz_integrate(state, field, params.mass, params.charge, _step(params), params.steps)
    result = SuiteResult()
    result.check("velocity_norm_drift", traj.velocity_norm_drift(), params.norm_tolerance)
    name, value = _oracle(params, traj, state.velocity)
    result.check(name, value, params.oracle_tolerance)

    frames = wl.fermi_transport(state.coframe, traj)
    result.check("fermi_gram_drift", _gram_drift(frames), params.norm_tolerance)
    result.check("fermi_darboux", _fermi_darboux_defect(traj, frames), params.norm_tolerance)

    track = wl.rotor_evolve(state.rotor, wl.fermi_darboux(traj), traj)
    rotor_frames = track.frames()
    result.check("rotor_frame_reconstruction", float(np.max(np.abs(rotor_frames - frames))), params.frame_tolerance)
    result.check("rotor_closed_form", _closed_form_rotor(params.kappa2), params.closed_form_tolerance)

    spin = wl.spin_evolution(state.spin, traj, params.spin_k)
    s = spin.spin
    result.check("spin_orthogonality", float(np.max(np.abs(wl.mdot(s, traj.velocities)))), params.norm_tolerance)
    result.check("spin_norm_drift", float(np.max(np.abs(wl.mdot(s, s) - wl.mdot(s[0], s[0])))), params.norm_tolerance)
    result.check("spin_fermi_agreement", float(np.max(np.abs(s - frames[:, 3]))), params.norm_tolerance)

    frenet = wl.frenet_frame(traj)
    k0, k1, k2 = frenet.curvatures
    if params.scenario == "hyperbolic":
        g = abs(params.charge * params.strength) / params.mass
        result.check("frenet_kappa0", float(np.max(np.abs(k0 - g))), params.oracle_tolerance)

    pw = wl.plane_wave_equivalence(params.kappa2, params.plane_wave_velocity)
    result.check("plane_wave_dirac_residual", pw.dirac_residual, params.plane_wave_tolerance)
    result.check("plane_wave_rotor_equation", pw.rotor_equation_residual, params.plane_wave_tolerance)
    if pw.comoving_residual is not None:
        result.check("plane_wave_comoving", pw.comoving_residual, params.plane_wave_tolerance)

    result.diagnostics.update(
        scenario=params.scenario,
        dtau=float(traj.tau[1] - traj.tau[0]),
        steps=traj.steps,
        rotor_renormalization_max=track.max_renormalization,
        degenerate_frenet=frenet.degenerate_frenet,
        frenet_chain_complete=not frenet.degenerate,
        kappa_mean=[float(np.mean(k0)), float(np.mean(k1)), float(np.mean(k2))],
        plane_wave_mass=pw.mass,
    )
    frame = wl.trajectory_frame(traj, coframe=frames, rotors=track.rotors, spins=s)
    frame.to_csv(out_dir / "trajectory.csv", index=False, float_format="%.17g")
    result.artifacts.append("trajectory.csv")
    return result
