import math

import numpy as np
import pytest

from stalab import sta_core as sc
from stalab import worldline as wl
from stalab.field_lab import AnalyticField, ConstantField, velocity_gradient_identity
from stalab.utils.errors import NonOrthogonalSpin, NonOrthonormalFrame, NonRotorInitial, NonUnitVelocity

STEPS = 2000
RAPIDITY = 0.5


def _cyclotron(omega=1.0, steps=STEPS):
    state, field = wl.scenario("cyclotron", omega, RAPIDITY)
    dtau = 1.05 * 2 * math.pi / omega / steps
    return state, wl.lorentz_integrate(state, field, 1.0, 1.0, dtau, steps)


def _frames_of(rotor) -> np.ndarray:
    return wl.RotorTrack(np.array([sc.as_coeffs(rotor)]), 0.0).frames()[0]


def _volume(frame: np.ndarray) -> float:
    """g0123 coefficient of e_0 ∧ e_1 ∧ e_2 ∧ e_3."""
    e = [sc.vector(*row) for row in frame]
    return sc.wedge(sc.wedge(e[0], e[1]), sc.wedge(e[2], e[3]))["g0123"]


def _upper(frame: np.ndarray, a: int) -> sc.Multivector:
    return sc.vector(*(wl.ETA[a] * frame[a]))


def test_initial_state_is_boosted_standard_frame():
    v = (math.cosh(0.3), 0.0, math.sinh(0.3), 0.0)
    state = wl.initial_state(v)
    np.testing.assert_allclose(state.coframe[0], v, atol=1e-15)
    np.testing.assert_allclose(state.spin, state.coframe[3])
    assert wl.mdot(state.spin, state.velocity) == pytest.approx(0.0, abs=1e-15)


def test_state_validation():
    with pytest.raises(NonUnitVelocity):
        wl.initial_state((2.0, 0.0, 0.0, 0.0))
    with pytest.raises(NonOrthogonalSpin):
        wl.initial_state((1.0, 0.0, 0.0, 0.0), spin=(1.0, 0.0, 0.0, 0.0))
    good = wl.initial_state((1.0, 0.0, 0.0, 0.0))
    with pytest.raises(NonOrthonormalFrame):
        wl.WorldlineState(0.0, good.event, good.velocity, 2 * good.coframe, good.rotor, good.spin)
    with pytest.raises(NonRotorInitial):
        wl.WorldlineState(0.0, good.event, good.velocity, good.coframe, good.rotor * 2.0, good.spin)


def test_integrator_arguments():
    state, field = wl.scenario("hyperbolic")
    with pytest.raises(ValueError):
        wl.lorentz_integrate(state, field, 1.0, 1.0, 0.0, 10)
    with pytest.raises(ValueError):
        wl.lorentz_integrate(state, field, 0.0, 1.0, 0.1, 10)
    with pytest.raises(ValueError):
        wl.scenario("spiral")


def test_free_particle_moves_in_a_straight_line():
    state, field = wl.scenario("free", rapidity=0.4)
    traj = wl.lorentz_integrate(state, field, 1.0, 1.0, 0.01, 100)
    np.testing.assert_allclose(traj.velocities, np.tile(state.velocity, (101, 1)), atol=0.0)
    # dx^3/dtau = -v_3 = sinh(0.4)
    assert traj.events[-1, 3] == pytest.approx(math.sinh(0.4), rel=1e-12)
    frenet = wl.frenet_frame(traj)
    assert frenet.degenerate_frenet and frenet.degenerate
    np.testing.assert_array_equal(frenet.curvatures.kappa0, 0.0)


def test_cyclotron_period_and_norm():
    _, traj = _cyclotron(omega=1.5)
    assert traj.constant_field
    assert traj.velocity_norm_drift() <= 1e-10
    assert wl.rotation_period(traj) == pytest.approx(2 * math.pi / 1.5, abs=1e-6)
    np.testing.assert_allclose(traj.velocities[:, 0], math.cosh(RAPIDITY), atol=1e-12)


def test_rotation_period_needs_a_full_turn():
    state, field = wl.scenario("cyclotron", 1.0, RAPIDITY)
    traj = wl.lorentz_integrate(state, field, 1.0, 1.0, 0.01, 100)
    with pytest.raises(ValueError):
        wl.rotation_period(traj)


def test_hyperbolic_motion():
    g = 0.8
    state, field = wl.scenario("hyperbolic", g)
    traj = wl.lorentz_integrate(state, field, 1.0, 1.0, 2.0 / g / STEPS, STEPS)
    np.testing.assert_allclose(traj.velocities[:, 0], np.cosh(g * traj.tau), atol=1e-9)
    frenet = wl.frenet_frame(traj)
    np.testing.assert_allclose(frenet.curvatures.kappa0, g, atol=1e-9)
    assert frenet.degenerate and not frenet.degenerate_frenet
    assert np.all(frenet.rank == 2)


def test_cyclotron_frenet_curvatures():
    omega = 1.2
    _, traj = _cyclotron(omega)
    frenet = wl.frenet_frame(traj)
    assert not frenet.degenerate
    k0, k1, k2 = frenet.curvatures
    np.testing.assert_allclose(k0, omega * math.sinh(RAPIDITY), atol=1e-9)
    np.testing.assert_allclose(k1, omega * math.cosh(RAPIDITY), atol=1e-9)
    np.testing.assert_allclose(k2, 0.0, atol=1e-9)
    frames = frenet.frames
    gram = np.einsum("nam,nbm,m->nab", frames, frames, wl.ETA)
    np.testing.assert_allclose(gram, np.broadcast_to(np.diag(wl.ETA), gram.shape), atol=1e-12)
    assert _volume(frames[7]) == pytest.approx(_volume(_frames_of(sc.ONE)))
    assert frenet.darboux().shape == (len(traj.tau), sc.DIM)


def test_frenet_frame_is_rebuilt_by_its_darboux_biform():
    _, traj = _cyclotron(1.2)
    frenet = wl.frenet_frame(traj)
    frames, omega = frenet.frames, frenet.darboux()
    h = traj.tau[1] - traj.tau[0]
    for k in range(2, len(traj.tau) - 2, 97):
        dframe = (-frames[k + 2] + 8 * frames[k + 1] - 8 * frames[k - 1] + frames[k - 2]) / (12 * h)
        assert wl.darboux_reconstruction_residual(frames[k], dframe, omega[k]) <= 1e-6
        assert wl.darboux_of_frame(frames[k], dframe).allclose(sc.Multivector(omega[k]), atol=1e-6)


def _varying_field(pts):
    """(1 + x / 10) g1∧g2 + 0.3 g1∧g0."""
    out = np.zeros(pts.shape[:-1] + (sc.DIM,))
    out[..., 8] = 1.0 + 0.1 * pts[..., 1]
    out[..., 5] = -0.3
    return out


def test_field_valued_force_matches_the_constant_path():
    state, f = wl.scenario("cyclotron", 1.0, RAPIDITY)
    dtau = 1.05 * 2 * math.pi / STEPS
    exact = wl.lorentz_integrate(state, f, 1.0, 1.0, dtau, STEPS)
    sampled = wl.lorentz_integrate(state, ConstantField(f), 1.0, 1.0, dtau, STEPS)
    assert exact.constant_field and not sampled.constant_field
    np.testing.assert_allclose(sampled.velocities, exact.velocities, atol=1e-12)
    np.testing.assert_allclose(sampled.accelerations, exact.accelerations, atol=1e-12)
    np.testing.assert_allclose(sampled.jerks, exact.jerks, atol=1e-4)
    np.testing.assert_allclose(sampled.snaps, exact.snaps, atol=1e-3)


def test_lorentz_integration_in_a_varying_field():
    state = wl.initial_state((math.cosh(0.3), 0.0, -math.sinh(0.3), 0.0))
    traj = wl.lorentz_integrate(state, AnalyticField(_varying_field), 2.0, 1.5, 0.0025, 2000)
    assert not traj.constant_field
    assert traj.velocity_norm_drift() <= 1e-9
    for i in range(0, 2001, 250):
        f = sc.Multivector(_varying_field(traj.events[i]))
        force = sc.lcontract(sc.vector(*traj.velocities[i]), f) * 0.75
        np.testing.assert_allclose(traj.accelerations[i], sc.vector_components(force), atol=1e-14)
    slope = np.gradient(traj.velocities, traj.tau, axis=0)
    np.testing.assert_allclose(slope[1:-1], traj.accelerations[1:-1], atol=1e-4)
    frames = wl.frenet_frame(traj).frames
    gram = np.einsum("nam,nbm,m->nab", frames, frames, wl.ETA)
    np.testing.assert_allclose(gram, np.broadcast_to(np.diag(wl.ETA), gram.shape), atol=1e-8)


def test_acceleration_is_the_contracted_curl_of_the_velocity_field():
    g = 0.8
    state, field = wl.scenario("hyperbolic", g)
    traj = wl.lorentz_integrate(state, field, 1.0, 1.0, 2.0 / g / STEPS, STEPS)
    sign = math.copysign(1.0, traj.velocities[-1, 1])

    def value(pts):
        out = np.zeros(pts.shape[:-1] + (sc.DIM,))
        t = pts[..., 0]
        out[..., 1] = np.sqrt(1.0 + (g * t) ** 2)
        out[..., 2] = sign * g * t
        return out

    def gradient(pts):
        out = np.zeros(pts.shape[:-1] + (4, sc.DIM))
        t = pts[..., 0]
        out[..., 0, 1] = g * g * t / np.sqrt(1.0 + (g * t) ** 2)
        out[..., 0, 2] = sign * g
        return out

    velocity_field = AnalyticField(value, gradient)
    for i in range(0, STEPS + 1, 250):
        x = traj.events[i]
        np.testing.assert_allclose(value(x)[1:5], traj.velocities[i], atol=1e-9)
        forms = velocity_gradient_identity(velocity_field, x)
        np.testing.assert_allclose(sc.vector_components(forms.contract_exterior), traj.accelerations[i], atol=1e-9)
        assert forms.contract_exterior.allclose(forms.directional, atol=1e-12)


def test_fermi_transport_preserves_the_frame():
    state, traj = _cyclotron()
    frames = wl.fermi_transport(state.coframe, traj)
    gram = np.einsum("nam,nbm,m->nab", frames, frames, wl.ETA)
    np.testing.assert_allclose(gram, np.broadcast_to(np.diag(wl.ETA), gram.shape), atol=1e-10)
    np.testing.assert_allclose(frames[:, 0], traj.velocities, atol=1e-9)


def test_transport_over_ten_thousand_steps(rng):
    steps = 10_000
    state, field = wl.scenario("cyclotron", 1.0, RAPIDITY)
    traj = wl.lorentz_integrate(state, field, 1.0, 1.0, 1.05 * 2 * math.pi / steps, steps)
    assert traj.velocity_norm_drift() <= 1e-9
    pair = rng.normal(size=(2, 4))
    moved = wl.fermi_transport(pair, traj)
    gram0 = np.einsum("am,bm,m->ab", pair, pair, wl.ETA)
    gram = np.einsum("nam,nbm,m->nab", moved, moved, wl.ETA)
    np.testing.assert_allclose(gram, np.broadcast_to(gram0, gram.shape), atol=1e-9)
    track = wl.spin_evolution(state.spin, traj, k=0.5)
    assert np.max(np.abs(wl.mdot(track.spin, track.spin) + 1.0)) <= 1e-9


def test_hyperbolic_spin_follows_fermi_transport():
    g = 0.8
    state, field = wl.scenario("hyperbolic", g)
    traj = wl.lorentz_integrate(state, field, 1.0, 1.0, 2.0 / g / STEPS, STEPS)
    s0 = np.array([0.0, 0.6, 0.8, 0.0])
    track = wl.spin_evolution(s0, traj, k=0.5)
    np.testing.assert_allclose(track.spin, wl.fermi_transport(s0, traj), atol=1e-9)
    np.testing.assert_allclose(wl.mdot(track.spin, traj.velocities), 0.0, atol=1e-9)
    np.testing.assert_allclose(wl.mdot(track.spin, track.spin), -1.0, atol=1e-9)
    # the boost-plane part turns with the velocity, the transverse part stays put
    np.testing.assert_allclose(track.spin[:, 2:], np.tile([0.8, 0.0], (STEPS + 1, 1)), atol=1e-12)
    np.testing.assert_allclose(np.abs(track.spin[:, 1]), 0.6 * np.cosh(g * traj.tau), atol=1e-8)


def test_transverse_vector_is_constant_under_hyperbolic_motion():
    state, field = wl.scenario("hyperbolic", 0.8)
    traj = wl.lorentz_integrate(state, field, 1.0, 1.0, 2.0 / 0.8 / STEPS, STEPS)
    for y0 in ([0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.3, -0.7]):
        moved = wl.fermi_transport(y0, traj)
        np.testing.assert_allclose(moved, np.tile(y0, (STEPS + 1, 1)), atol=1e-12)


def test_rotor_reproduces_fermi_transport():
    state, traj = _cyclotron()
    frames = wl.fermi_transport(state.coframe, traj)
    track = wl.rotor_evolve(state.rotor, wl.fermi_darboux(traj), traj)
    assert track.max_renormalization <= 1e-10
    np.testing.assert_allclose(track.frames(), frames, atol=1e-7)


def test_rotor_with_constant_spin_biform():
    kappa2 = -2.0
    state, field = wl.scenario("free", rapidity=0.8)
    traj = wl.lorentz_integrate(state, field, 1.0, 0.0, 5.0 / STEPS, STEPS)
    omega = np.tile((sc.G21 * kappa2).coeffs, (len(traj.tau), 1))
    track = wl.rotor_evolve(state.rotor, omega, traj)
    for tau, r in zip(traj.tau[::100], track.rotors[::100]):
        expected = sc.gp(state.rotor, sc.exp_biform(sc.G21 * (0.5 * kappa2 * tau)))
        assert sc.Multivector(r).allclose(expected, atol=1e-8)


def test_rotor_evolve_rejects_non_rotor():
    state, traj = _cyclotron(steps=10)
    with pytest.raises(NonRotorInitial):
        wl.rotor_evolve(sc.ONE * 2.0, wl.fermi_darboux(traj), traj)


def test_darboux_biform_of_a_rotating_frame():
    frame = _frames_of(sc.exp_biform(sc.blade("g13") * 0.4))
    omega = sc.blade("g01") * 0.3 + sc.blade("g12") * 0.7 - sc.blade("g23") * 0.2
    dframe = np.array([sc.vector_components(sc.rcontract(omega, sc.vector(*e))) for e in frame])
    assert wl.darboux_of_frame(frame, dframe).allclose(omega, atol=1e-14)
    assert wl.darboux_reconstruction_residual(frame, dframe, omega) <= 1e-14
    with pytest.raises(NonOrthonormalFrame):
        wl.darboux_of_frame(2 * frame, dframe)


def test_fermi_darboux_has_no_spin_part():
    _, traj = _cyclotron(steps=200)
    omega = wl.fermi_darboux(traj)
    k = 50
    assert wl.spin_part(omega(traj.tau[k]), traj.velocities[k], traj.accelerations[k]).allclose(
        sc.Multivector(), atol=1e-12
    )


def test_spin_follows_fermi_transport():
    state, traj = _cyclotron()
    frames = wl.fermi_transport(state.coframe, traj)
    track = wl.spin_evolution(state.spin, traj, k=0.5)
    np.testing.assert_allclose(track.spin, frames[:, 3], atol=1e-12)
    np.testing.assert_allclose(wl.mdot(track.spin, traj.velocities), 0.0, atol=1e-9)
    np.testing.assert_allclose(track.pauli_lubanski, 0.5 * track.spin)
    with pytest.raises(NonOrthogonalSpin):
        wl.spin_evolution(traj.velocities[0], traj, k=0.5)


@pytest.mark.parametrize("strength", [0.7, -1.3])
def test_align_spin_plane(strength):
    frame = _frames_of(sc.gp(sc.exp_biform(sc.blade("g13") * 0.4), sc.exp_biform(sc.blade("g12") * 0.9)))
    omega_s = sc.wedge(sc.G1, sc.G3) * strength + sc.wedge(sc.G2, sc.G3) * 0.2
    aligned = wl.align_spin_plane(omega_s, frame)
    assert abs(aligned.kappa2) == pytest.approx(math.hypot(strength, 0.2))
    np.testing.assert_allclose(aligned.frame[0], frame[0], atol=1e-14)
    gram = np.einsum("am,bm,m->ab", aligned.frame, aligned.frame, wl.ETA)
    np.testing.assert_allclose(gram, np.diag(wl.ETA), atol=1e-12)
    rebuilt = sc.wedge(_upper(aligned.frame, 2), _upper(aligned.frame, 1)) * aligned.kappa2
    assert rebuilt.allclose(omega_s, atol=1e-12)


def test_align_spin_plane_without_spin():
    frame = _frames_of(sc.ONE)
    aligned = wl.align_spin_plane(sc.Multivector(), frame)
    assert aligned.kappa2 == 0.0
    np.testing.assert_array_equal(aligned.frame, frame)


@pytest.mark.parametrize("kappa2", [-2.0, 0.6])
@pytest.mark.parametrize("velocity", [(1.0, 0.0, 0.0, 0.0), (math.cosh(0.5), 0.0, 0.0, -math.sinh(0.5))])
def test_plane_wave_from_spinning_frame(kappa2, velocity):
    report = wl.plane_wave_equivalence(kappa2, velocity)
    assert report.mass == -kappa2 / 2
    np.testing.assert_allclose(report.momentum, 0.5 * kappa2 * np.asarray(velocity))
    assert report.dirac_residual <= 1e-10
    assert report.rotor_equation_residual <= 1e-10
    if velocity[0] == 1.0:
        assert report.comoving_residual <= 1e-10
    else:
        assert report.comoving_residual is None


def test_plane_wave_needs_unit_velocity():
    with pytest.raises(NonUnitVelocity):
        wl.plane_wave_equivalence(-2.0, (1.0, 0.5, 0.0, 0.0))


def test_trajectory_export():
    state, traj = _cyclotron(steps=20)
    frames = wl.fermi_transport(state.coframe, traj)
    track = wl.rotor_evolve(state.rotor, wl.fermi_darboux(traj), traj)
    frame = wl.trajectory_frame(traj, coframe=frames, rotors=track.rotors)
    assert len(frame) == 21
    assert frame.shape[1] == 1 + 4 + 4 + 16 + 8 + 4
    assert {"tau", "t", "v0", "e3_3", "R_1", "R_g0123", "S0"} <= set(frame.columns)
    assert frame["S2"].isna().all()
    assert frame["R_1"].iloc[0] == pytest.approx(state.rotor["1"])
