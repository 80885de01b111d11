import numpy as np
import pytest

from fiberphase import (
    annihilation,
    basis_state,
    build_photon_state,
    build_space,
    circular_operators,
    commutator,
    creation,
    helicity_operator,
    identity,
    operator_from_json,
    polarization_triad,
    s3_split,
    spin_fixed,
    state_from_json,
    vacuum_state,
)

Z = np.array([0.0, 0.0, 1.0])


def bounded_norm(op_entries, space):
    sel = space.bounded_indices()
    return np.abs(op_entries[np.ix_(sel, sel)]).max()


def random_unit_vectors(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1)[:, None]


class TestBuildSpace:
    def test_dimensions(self):
        assert build_space(2, 1).dimension == 4
        assert build_space(3, 2).dimension == 27

    def test_lexicographic_enumeration(self):
        space = build_space(2, 2)
        assert space.basis[0] == (0, 0)
        assert space.basis[1] == (0, 1)
        assert space.basis[-1] == (2, 2)
        assert space.index_of((1, 2)) == 5

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            build_space(2, 0)
        with pytest.raises(ValueError):
            build_space(1, 3)
        with pytest.raises(ValueError):
            build_space(4, 2)


class TestLadderOperators:
    def test_matrix_elements(self):
        space = build_space(2, 2)
        b = annihilation(space, 0)
        out = b.apply(basis_state(space, (2, 0)))
        expected = np.sqrt(2.0) * basis_state(space, (1, 0)).amplitudes
        assert np.abs(out.amplitudes - expected).max() < 1e-15

    def test_vacuum_annihilation(self):
        space = build_space(2, 2)
        b = annihilation(space, 1)
        assert b.apply(vacuum_state(space)).norm() == 0.0

    def test_canonical_commutator_on_bounded_subspace(self):
        space = build_space(2, 2)
        for mode in range(2):
            b = annihilation(space, mode)
            defect = commutator(b, b.dagger()) - identity(space)
            assert bounded_norm(defect.entries, space) < 1e-14

    def test_cross_mode_commutators_vanish(self):
        space = build_space(3, 2)
        for i in range(3):
            for j in range(3):
                if i == j:
                    continue
                c = commutator(annihilation(space, i), creation(space, j))
                assert bounded_norm(c.entries, space) < 1e-14

    def test_creation_is_dagger(self):
        space = build_space(3, 1)
        b = annihilation(space, 2)
        assert np.array_equal(creation(space, 2).entries, b.entries.conj().T)

    def test_mode_out_of_range(self):
        space = build_space(2, 1)
        with pytest.raises(ValueError):
            annihilation(space, 2)


class TestCircularOperators:
    def test_right_creation_on_vacuum(self):
        space = build_space(3, 2)
        _, a_r_dag, _, _ = circular_operators(space)
        out = a_r_dag.apply(vacuum_state(space)).amplitudes
        expected = (
            basis_state(space, (1, 0, 0)).amplitudes + 1j * basis_state(space, (0, 1, 0)).amplitudes
        ) / np.sqrt(2.0)
        assert np.abs(out - expected).max() < 1e-15

    def test_circular_commutators(self):
        for num_modes in (2, 3):
            space = build_space(num_modes, 2)
            a_r, a_r_dag, a_l, a_l_dag = circular_operators(space)
            assert bounded_norm((commutator(a_r, a_r_dag) - identity(space)).entries, space) < 1e-14
            assert bounded_norm((commutator(a_l, a_l_dag) - identity(space)).entries, space) < 1e-14
            assert bounded_norm(commutator(a_r, a_l_dag).entries, space) < 1e-14

    def test_opposite_handedness_orthogonal(self):
        space = build_space(3, 2)
        a_r, a_r_dag, a_l, _ = circular_operators(space)
        assert a_l.apply(a_r_dag.apply(vacuum_state(space))).norm() < 1e-15


class TestSpinFixed:
    def test_requires_three_modes(self):
        with pytest.raises(ValueError):
            spin_fixed(build_space(2, 2))

    def test_hermitian(self):
        for s in spin_fixed(build_space(3, 2)):
            assert s.is_hermitian(1e-12)

    def test_s3_eigenstate(self):
        space = build_space(3, 2)
        _, _, s3 = spin_fixed(space)
        psi = build_photon_state(space, 1, 0)
        assert np.abs(s3.apply(psi).amplitudes - psi.amplitudes).max() < 1e-14

    def test_mode3_photon_carries_no_transverse_spin(self):
        space = build_space(3, 2)
        _, _, s3 = spin_fixed(space)
        assert s3.apply(basis_state(space, (0, 0, 1))).norm() == 0.0

    def test_angular_momentum_algebra(self):
        space = build_space(3, 2)
        s = spin_fixed(space)
        for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            defect = commutator(s[a], s[b]) - 1j * s[c]
            assert bounded_norm(defect.entries, space) < 1e-12


class TestHelicityOperator:
    def test_along_z_is_s3(self):
        space = build_space(3, 2)
        _, _, s3 = spin_fixed(space)
        h = helicity_operator(space, Z)
        assert np.abs(h.entries - s3.entries).max() < 1e-15

    def test_along_x_matches_component(self):
        space = build_space(3, 2)
        b2, b3 = annihilation(space, 1), annihilation(space, 2)
        expected = -1j * (b2.dagger() @ b3 - b3.dagger() @ b2)
        h = helicity_operator(space, np.array([1.0, 0.0, 0.0]))
        assert np.abs(h.entries - expected.entries).max() < 1e-14

    def test_one_photon_spectrum(self):
        # independent oracle: dense eigensolve of the one-photon block
        space = build_space(3, 1)
        k = np.array([0.3, -0.4, np.sqrt(1 - 0.25)])
        h = helicity_operator(space, k)
        one_photon = [space.index_of(occ) for occ in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
        block = h.entries[np.ix_(one_photon, one_photon)]
        eigs = np.sort(np.linalg.eigvalsh(block))
        assert np.abs(eigs - np.array([-1.0, 0.0, 1.0])).max() < 1e-12

    def test_matches_k_dot_s_for_random_directions(self):
        space = build_space(3, 2)
        s1, s2, s3 = spin_fixed(space)
        for k in random_unit_vectors(100, seed=3):
            h = helicity_operator(space, k)
            direct = k[0] * s1.entries + k[1] * s2.entries + k[2] * s3.entries
            assert np.abs(h.entries - direct).max() < 1e-13
            assert h.is_hermitian(1e-12)

    def test_rejects_non_unit(self):
        with pytest.raises(ValueError):
            helicity_operator(build_space(3, 1), np.array([0.0, 0.0, 2.0]))


class TestS3Split:
    def test_vacuum_expectations(self):
        space = build_space(2, 2)
        r_nn, l_nn, r_n, l_n = s3_split(space)
        vac = vacuum_state(space)
        assert vac.expectation(r_nn).real == pytest.approx(0.5, abs=1e-15)
        assert vac.expectation(r_nn + l_nn).real == pytest.approx(0.0, abs=1e-15)

    def test_normal_order_counts_photons(self):
        space = build_space(2, 2)
        _, _, r_n, l_n = s3_split(space)
        psi = build_photon_state(space, 2, 1)
        assert psi.expectation(r_n + l_n).real == pytest.approx(1.0, abs=1e-14)

    def test_orderings_sum_to_same_matrix(self):
        for num_modes in (2, 3):
            space = build_space(num_modes, 2)
            r_nn, l_nn, r_n, l_n = s3_split(space)
            assert np.array_equal((r_nn + l_nn).entries, (r_n + l_n).entries)

    def test_half_shift_structure(self):
        space = build_space(3, 2)
        r_nn, l_nn, r_n, l_n = s3_split(space)
        half = 0.5 * identity(space)
        assert np.abs((r_nn - r_n - half).entries).max() == 0.0
        assert np.abs((l_nn - l_n + half).entries).max() == 0.0

    def test_split_sums_to_s3_on_three_modes(self):
        space = build_space(3, 2)
        _, _, s3 = spin_fixed(space)
        r_nn, l_nn, _, _ = s3_split(space)
        assert bounded_norm((r_nn + l_nn - s3).entries, space) < 1e-13


class TestPolarizationTriad:
    def test_canonical_gauge_at_pole(self):
        e1, e2 = polarization_triad(Z)
        assert np.abs(e1 - np.array([1.0, 0.0, 0.0])).max() < 1e-15
        assert np.abs(e2 - np.array([0.0, 1.0, 0.0])).max() < 1e-15

    def test_antipode(self):
        e1, e2 = polarization_triad(-Z)
        assert np.abs(np.cross(e1, e2) + Z).max() < 1e-15

    def test_x_direction_combination(self):
        k = np.array([1.0, 0.0, 0.0])
        e1, e2 = polarization_triad(k)
        # first spherical combination e2[1]*f[2] - e[2]*f[1] equals sin(lam)cos(gam) = 1
        assert e1[1] * e2[2] - e1[2] * e2[1] == pytest.approx(1.0, abs=1e-12)

    def test_transversality_and_spherical_components(self):
        for k in random_unit_vectors(100, seed=5):
            e1, e2 = polarization_triad(k)
            assert abs(np.dot(e1, e2)) < 1e-12
            assert np.linalg.norm(np.cross(e1, e2) - k) < 1e-12
            lam = np.arccos(np.clip(k[2], -1, 1))
            combos = np.array(
                [
                    e1[1] * e2[2] - e1[2] * e2[1],
                    e1[2] * e2[0] - e1[0] * e2[2],
                    e1[0] * e2[1] - e1[1] * e2[0],
                ]
            )
            gam = np.arctan2(k[1], k[0]) if np.sin(lam) > 1e-12 else 0.0
            spherical = np.array(
                [np.sin(lam) * np.cos(gam), np.sin(lam) * np.sin(gam), np.cos(lam)]
            )
            assert np.abs(combos - spherical).max() < 1e-12

    def test_rejects_non_unit(self):
        with pytest.raises(ValueError):
            polarization_triad(np.array([0.5, 0.0, 0.0]))


class TestPhotonStates:
    def test_single_right_photon_is_helicity_plus(self):
        space = build_space(3, 2)
        psi = build_photon_state(space, 1, 0)
        h = helicity_operator(space, Z)
        assert np.abs(h.apply(psi).amplitudes - psi.amplitudes).max() < 1e-12

    def test_vacuum(self):
        space = build_space(2, 1)
        psi = build_photon_state(space, 0, 0)
        _, _, r_n, l_n = s3_split(space)
        assert psi.expectation(r_n + l_n).real == 0.0

    def test_balanced_occupations(self):
        space = build_space(2, 2)
        psi = build_photon_state(space, 2, 2)
        _, _, r_n, l_n = s3_split(space)
        assert psi.expectation(r_n + l_n).real == pytest.approx(0.0, abs=1e-14)

    def test_normal_s3_eigenvalue(self):
        space = build_space(3, 3)
        psi = build_photon_state(space, 2, 1)
        assert abs(psi.norm() - 1.0) < 1e-12
        r_nn, l_nn, r_n, l_n = s3_split(space)
        out = (r_n + l_n).apply(psi)
        assert np.abs(out.amplitudes - 1.0 * psi.amplitudes).max() < 1e-12

    def test_cutoff_overflow_reported(self):
        space = build_space(3, 3)
        with pytest.raises(ValueError, match="cutoff overflow"):
            build_photon_state(space, 2, 2)
        with pytest.raises(ValueError, match="cutoff overflow"):
            build_photon_state(build_space(2, 1), 2, 0)

    def test_rotated_state_is_helicity_eigenstate(self):
        space = build_space(3, 2)
        for k in random_unit_vectors(20, seed=9):
            psi = build_photon_state(space, 1, 0, k_hat=k)
            h = helicity_operator(space, k)
            assert np.abs(h.apply(psi).amplitudes - psi.amplitudes).max() < 1e-12

    def test_helicity_eigenequations_both_signs(self):
        space = build_space(3, 2)
        h = helicity_operator(space, Z)
        plus = build_photon_state(space, 1, 0)
        minus = build_photon_state(space, 0, 1)
        assert np.abs(h.apply(plus).amplitudes - plus.amplitudes).max() < 1e-12
        assert np.abs(h.apply(minus).amplitudes + minus.amplitudes).max() < 1e-12


class TestSerialization:
    def test_operator_round_trip(self):
        space = build_space(2, 1)
        op = annihilation(space, 0) @ creation(space, 1)
        text = op.to_json()
        back = operator_from_json(text)
        assert back.space == space
        assert np.array_equal(back.entries, op.entries)

    def test_state_round_trip(self):
        space = build_space(3, 1)
        psi = build_photon_state(space, 1, 0)
        back = state_from_json(psi.to_json())
        assert np.array_equal(back.amplitudes, psi.amplitudes)

    def test_layout_is_re_im_pairs(self):
        import json

        space = build_space(2, 1)
        payload = json.loads(build_photon_state(space, 1, 0).to_json())
        assert payload["basis"] == [[0, 0], [0, 1], [1, 0], [1, 1]]
        assert all(len(pair) == 2 for pair in payload["amplitudes"])

    def test_entries_are_immutable(self):
        space = build_space(2, 1)
        op = annihilation(space, 0)
        with pytest.raises(ValueError):
            op.entries[0, 0] = 1.0
