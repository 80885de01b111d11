import math

import numpy as np
import pytest

from fiberphase import (
    StateVector,
    anholonomy_integral,
    berry_phase_cyclic,
    build_photon_state,
    build_space,
    closed_form_phase,
    cone_trajectory,
    effective_hamiltonian,
    evolution_operator_V,
    evolve_state,
    extract_phases,
    helicity_operator,
    lvn_residual,
    make_helix,
    phase_series,
    spherical_angles,
    spin_fixed,
    tangent_trajectory,
    trajectory_from_tangents,
    wrap_angle,
)

BERRY_45 = 1.84030236902122  # 2*pi*(1 - cos(pi/4))


def helix_traj(lam=math.pi / 4.0, turns=1.0, steps=1024):
    pitch = 2.0 * math.pi / math.tan(lam)
    return tangent_trajectory(make_helix(1.0, pitch, turns, 2 * steps + 1))


def eigenstate_run(sigma, lam=math.pi / 4.0, turns=1.0, steps=1024, n_max=2):
    traj = helix_traj(lam, turns, steps)
    space = build_space(3, n_max)
    spin = spin_fixed(space)
    k0 = traj.tangents[0] / np.linalg.norm(traj.tangents[0])
    n_r, n_l = (1, 0) if sigma > 0 else (0, 1)
    psi0 = build_photon_state(space, n_r, n_l, k_hat=k0)
    result = evolve_state(psi0, traj, spin)
    return traj, spin, result


class TestAnholonomyIntegral:
    def test_polar_zero_vanishes(self):
        angles = spherical_angles(cone_trajectory(0.0, 1.0, 257))
        assert anholonomy_integral(angles) == 0.0

    def test_equator_full_turn(self):
        angles = spherical_angles(cone_trajectory(math.pi / 2.0, 1.0, 257))
        assert anholonomy_integral(angles) == pytest.approx(2.0 * math.pi, abs=1e-12)

    def test_quarter_pi_value(self):
        angles = spherical_angles(cone_trajectory(math.pi / 4.0, 1.0, 257))
        assert anholonomy_integral(angles) == pytest.approx(BERRY_45, abs=1e-10)

    def test_partial_trace(self):
        angles = spherical_angles(cone_trajectory(math.pi / 3.0, 1.0, 257))
        half = anholonomy_integral(angles, t_end=angles.times[128])
        assert half == pytest.approx(0.5 * math.pi, abs=1e-12)

    def test_t_end_off_grid_rejected(self):
        angles = spherical_angles(cone_trajectory(math.pi / 3.0, 1.0, 257))
        with pytest.raises(ValueError):
            anholonomy_integral(angles, t_end=0.1234567)
        with pytest.raises(ValueError):
            anholonomy_integral(angles, t_end=2.0)

    def test_reparametrization_invariance(self):
        # same tangent trace traversed with a smooth nonuniform speed
        lam, turns, n = 0.8, 1.0, 2049
        t = np.linspace(0.0, 1.0, n)
        w = 3.0 * t**2 - 2.0 * t**3
        gamma = 2.0 * math.pi * turns * w
        sl, cl = math.sin(lam), math.cos(lam)
        tangents = np.column_stack([sl * np.cos(gamma), sl * np.sin(gamma), np.full(n, cl)])
        rate = 2.0 * math.pi * turns * (6.0 * t - 6.0 * t**2)
        derivatives = np.column_stack(
            [-sl * np.sin(gamma) * rate, sl * np.cos(gamma) * rate, np.zeros(n)]
        )
        from fiberphase import TangentTrajectory

        warped = TangentTrajectory(t, tangents, derivatives)
        uniform = cone_trajectory(lam, turns, n)
        a_w = anholonomy_integral(spherical_angles(warped))
        a_u = anholonomy_integral(spherical_angles(uniform))
        assert abs(a_w - a_u) < 1e-8


class TestClosedFormPhase:
    def test_vacuum_right_attribution(self):
        angles = spherical_angles(cone_trajectory(math.pi / 3.0, 1.0, 257))
        assert closed_form_phase(angles, 0.5) == pytest.approx(math.pi / 2.0, abs=1e-12)

    def test_two_one_multiphoton(self):
        angles = spherical_angles(cone_trajectory(math.pi / 3.0, 1.0, 257))
        assert closed_form_phase(angles, 1.0) == pytest.approx(math.pi, abs=1e-12)

    def test_vacuum_pair_cancels(self):
        angles = spherical_angles(cone_trajectory(1.1, 2.3, 513))
        assert closed_form_phase(angles, 0.5) + closed_form_phase(angles, -0.5) == 0.0


class TestBerryPhaseCyclic:
    def test_pole(self):
        assert berry_phase_cyclic(0.0, 1.0) == 0.0

    def test_equator(self):
        assert berry_phase_cyclic(math.pi / 2.0, 1.0) == pytest.approx(2.0 * math.pi, abs=1e-15)

    def test_sign_flip(self):
        assert berry_phase_cyclic(math.pi / 4.0, -1.0) == pytest.approx(-BERRY_45, abs=1e-12)

    def test_range_check(self):
        with pytest.raises(ValueError):
            berry_phase_cyclic(-0.1, 1.0)
        with pytest.raises(ValueError):
            berry_phase_cyclic(3.2, 1.0)


class TestEffectiveHamiltonian:
    def test_straight_path_is_zero(self):
        traj = cone_trajectory(0.0, 1.0, 65)
        spin = spin_fixed(build_space(3, 1))
        h = effective_hamiltonian(traj, spin, traj.times[7])
        assert np.abs(h.entries).max() == 0.0

    def test_equator_matches_s3_rate(self):
        traj = cone_trajectory(math.pi / 2.0, 1.0, 257)
        space = build_space(3, 2)
        spin = spin_fixed(space)
        h = effective_hamiltonian(traj, spin, traj.times[100])
        expected = 2.0 * math.pi * spin[2].entries
        assert np.abs(h.entries - expected).max() < 1e-12
        assert h.is_hermitian(1e-12)

    def test_tangent_rescaling_invariance(self):
        traj = helix_traj(steps=128)
        spin = spin_fixed(build_space(3, 2))
        t = traj.times[64]
        h1 = effective_hamiltonian(traj, spin, t)
        h2 = effective_hamiltonian(traj.scaled(5.0), spin, t)
        assert np.abs(h1.entries - h2.entries).max() < 1e-12

    def test_off_grid_time_rejected(self):
        traj = cone_trajectory(1.0, 1.0, 65)
        spin = spin_fixed(build_space(3, 1))
        with pytest.raises(ValueError):
            effective_hamiltonian(traj, spin, 0.123456789)


class TestEvolveState:
    def test_free_evolution(self):
        traj = cone_trajectory(0.0, 1.0, 129)
        space = build_space(3, 1)
        psi0 = build_photon_state(space, 1, 0)
        result = evolve_state(psi0, traj, spin_fixed(space))
        assert np.abs(result.states - psi0.amplitudes).max() == 0.0

    def test_eigenstate_returns_with_closed_form_phase(self):
        traj, spin, result = eigenstate_run(+1, steps=8192)
        overlap = abs(np.vdot(result.states[0], result.states[-1]))
        assert abs(overlap - 1.0) < 1e-9
        breakdown = extract_phases(result, traj, spin)
        assert abs(breakdown.geometric_phase - breakdown.closed_form_phase) < 1e-5

    def test_norm_drift_small_over_1e4_steps(self):
        traj, spin, result = eigenstate_run(+1, steps=10000)
        assert np.abs(result.norms - 1.0).max() < 1e-9

    def test_renormalize_flag(self):
        traj = helix_traj(steps=256)
        space = build_space(3, 2)
        psi0 = build_photon_state(space, 1, 0, k_hat=traj.tangents[0])
        result = evolve_state(psi0, traj, spin_fixed(space), renormalize=True)
        assert abs(np.linalg.norm(result.states[-1]) - 1.0) < 1e-12

    def test_step_guard_violation_reported(self):
        space = build_space(3, 2)
        psi0 = build_photon_state(space, 1, 0)
        fast = cone_trajectory(math.pi / 2.0, 10.0, 65)
        with pytest.raises(ValueError, match="guard"):
            evolve_state(psi0, fast, spin_fixed(space))

    def test_rejects_unnormalized_state(self):
        space = build_space(3, 1)
        psi0 = StateVector(space, 0.5 * build_photon_state(space, 1, 0).amplitudes)
        with pytest.raises(ValueError, match="normalized"):
            evolve_state(psi0, cone_trajectory(0.5, 1.0, 65), spin_fixed(space))

    def test_rejects_even_sample_grid(self):
        space = build_space(3, 1)
        psi0 = build_photon_state(space, 1, 0)
        traj = cone_trajectory(0.5, 1.0, 64)
        with pytest.raises(ValueError, match="odd"):
            evolve_state(psi0, traj, spin_fixed(space))

    def test_fourth_order_convergence(self):
        gaps = []
        for steps in (128, 256, 512):
            traj, spin, result = eigenstate_run(+1, steps=steps)
            breakdown = extract_phases(result, traj, spin)
            gaps.append(abs(breakdown.geometric_phase - BERRY_45))
        assert gaps[0] / gaps[1] > 12.0
        assert gaps[1] / gaps[2] > 12.0


class TestExtractPhases:
    def test_free_evolution_all_zero(self):
        traj = cone_trajectory(0.0, 1.0, 129)
        space = build_space(3, 1)
        psi0 = build_photon_state(space, 1, 0)
        spin = spin_fixed(space)
        breakdown = extract_phases(evolve_state(psi0, traj, spin), traj, spin)
        assert breakdown.total_phase == 0.0
        assert breakdown.dynamical_phase == 0.0
        assert breakdown.geometric_phase == 0.0

    def test_geometric_is_total_minus_dynamical(self):
        traj, spin, result = eigenstate_run(+1, steps=512)
        b = extract_phases(result, traj, spin)
        assert b.geometric_phase == b.total_phase - b.dynamical_phase

    def test_positive_helicity_quarter_pi(self):
        traj, spin, result = eigenstate_run(+1, steps=2048)
        b = extract_phases(result, traj, spin)
        assert b.geometric_phase == pytest.approx(BERRY_45, abs=1e-4)
        assert b.geometric_phase == pytest.approx(berry_phase_cyclic(math.pi / 4.0, 1.0), abs=1e-4)

    def test_negative_helicity_flips_sign(self):
        traj, spin, result = eigenstate_run(-1, steps=2048)
        b = extract_phases(result, traj, spin)
        assert b.geometric_phase == pytest.approx(-BERRY_45, abs=1e-4)

    def test_handedness_antisymmetry(self):
        _, _, plus = eigenstate_run(+1, steps=1024)
        traj, spin, minus = eigenstate_run(-1, steps=1024)
        gp = extract_phases(plus, traj, spin).geometric_phase
        gm = extract_phases(minus, traj, spin).geometric_phase
        assert abs(gp + gm) < 1e-6

    def test_dynamical_phase_vanishes_for_eigenstates(self):
        traj, spin, result = eigenstate_run(+1, steps=1024)
        assert abs(extract_phases(result, traj, spin).dynamical_phase) < 1e-9

    def test_multi_turn_raw_phase_exceeds_2pi(self):
        traj, spin, result = eigenstate_run(+1, lam=math.pi / 3.0, turns=3.0, steps=4096)
        b = extract_phases(result, traj, spin)
        assert b.geometric_phase == pytest.approx(3.0 * math.pi, abs=1e-4)
        assert b.geometric_phase_mod_2pi == pytest.approx(
            b.geometric_phase % (2.0 * math.pi), abs=1e-15
        )
        assert abs(wrap_angle(b.geometric_phase - b.closed_form_phase)) < 1e-4

    def test_ill_conditioned_overlap_reported(self):
        space = build_space(3, 2)
        spin = spin_fixed(space)
        k0 = np.array([1.0, 0.0, 0.0])
        plus = build_photon_state(space, 1, 0, k_hat=k0)
        minus = build_photon_state(space, 0, 1, k_hat=k0)
        psi0 = StateVector(space, (plus.amplitudes + 1j * minus.amplitudes) / math.sqrt(2.0))
        traj = cone_trajectory(math.pi / 2.0, 1.0, 1025)
        result = evolve_state(psi0.normalized(), traj, spin)
        with pytest.raises(ValueError, match="ill-conditioned"):
            phase_series(result, traj, spin)

    def test_k_rescaling_leaves_phases(self):
        traj, spin, result = eigenstate_run(+1, steps=512)
        scaled = traj.scaled(1000.0)
        space = build_space(3, 2)
        psi0 = build_photon_state(space, 1, 0, k_hat=traj.tangents[0])
        result2 = evolve_state(psi0, scaled, spin)
        b1 = extract_phases(result, traj, spin)
        b2 = extract_phases(result2, scaled, spin)
        assert abs(b1.geometric_phase - b2.geometric_phase) < 1e-10
        assert abs(b1.closed_form_phase - b2.closed_form_phase) < 1e-10


class TestLvnResidual:
    def test_helix_analytic(self):
        traj = helix_traj(steps=2048)
        spin = spin_fixed(build_space(3, 2))
        assert lvn_residual(traj, spin, traj.times[2048]) < 1e-6

    def test_straight_fibre_machine_zero(self):
        traj = cone_trajectory(0.0, 1.0, 65)
        spin = spin_fixed(build_space(3, 1))
        assert lvn_residual(traj, spin, traj.times[32]) < 1e-15

    def test_random_smooth_tangent_field(self):
        spin = spin_fixed(build_space(3, 2))
        rng = np.random.default_rng(11)
        coeffs = [(rng.normal(scale=0.03, size=3), rng.normal(scale=0.03, size=3)) for _ in range(2)]

        def field(n):
            t = np.linspace(0.0, 1.0, n)
            base = np.tile(np.array([0.1, -0.05, 1.0]), (n, 1))
            for m, (a, b) in enumerate(coeffs):
                base += np.outer(np.cos(2.0 * math.pi * (m + 1) * t), a)
                base += np.outer(np.sin(2.0 * math.pi * (m + 1) * t), b)
            return trajectory_from_tangents(t, base)

        def worst(traj):
            probe = traj.times[:: (len(traj.times) - 1) // 16]
            return max(lvn_residual(traj, spin, t) for t in probe)

        coarse, fine = worst(field(2049)), worst(field(4097))
        assert coarse < 1e-5
        assert coarse / fine >= 2.0


class TestEvolutionOperatorV:
    def test_identity_at_pole(self):
        space = build_space(3, 2)
        v = evolution_operator_V(0.0, 0.7, space)
        assert np.abs(v.entries - np.eye(space.dimension)).max() < 1e-14

    def test_transforms_helicity_to_s3(self):
        space = build_space(3, 2)
        _, _, s3 = spin_fixed(space)
        sel = space.complete_sector_indices()
        lam, gam = math.pi / 4.0, 0.0
        v = evolution_operator_V(lam, gam, space)
        k = np.array([math.sin(lam) * math.cos(gam), math.sin(lam) * math.sin(gam), math.cos(lam)])
        i_op = helicity_operator(space, k)
        defect = (v.dagger() @ i_op @ v - s3).entries[np.ix_(sel, sel)]
        assert np.abs(defect).max() < 1e-9

    def test_unitary_for_random_angles(self):
        space = build_space(3, 2)
        eye = np.eye(space.dimension)
        rng = np.random.default_rng(7)
        for _ in range(50):
            v = evolution_operator_V(rng.uniform(0, math.pi), rng.uniform(-6, 6), space)
            assert np.abs((v.dagger() @ v).entries - eye).max() < 1e-10
