"""Unit tests for the covariance-matrix engine."""

import math

import numpy as np
import pytest

from sagnacsim import (
    VACUUM_VARIANCE,
    GaussianState,
    NumericalFailure,
    apply_beamsplitter,
    apply_loss,
    apply_phase,
    apply_single_mode_squeezer,
    apply_two_mode_squeezer,
    displace,
    photon_moments,
    reduce_state,
    symplectic_eigenvalues,
    vacuum_state,
)
from sagnacsim.tolerances import (
    LOSS_COMPOSITION_ATOL,
    PHOTON_CONSERVATION_ATOL,
    PHYSICALITY_ATOL,
)


def total_mean_n(state):
    return photon_moments(state, range(state.num_modes)).mean_n


class TestVacuumAndDisplacement:
    def test_vacuum_state(self):
        st = vacuum_state(3)
        assert st.num_modes == 3
        assert np.array_equal(st.mean, np.zeros(6))
        assert np.allclose(st.cov, VACUUM_VARIANCE * np.eye(6))

    def test_vacuum_photon_moments_are_zero(self):
        rep = photon_moments(vacuum_state(2), (0, 1))
        assert abs(rep.mean_n) < 1e-14
        assert abs(rep.var_n) < 1e-14

    def test_displace_shifts_mean_only(self):
        st = displace(vacuum_state(2), 1, 0.7, -0.2)
        assert np.allclose(st.mean, [0.0, 0.0, 0.7, -0.2])
        assert np.allclose(st.cov, VACUUM_VARIANCE * np.eye(4))

    def test_coherent_state_is_poissonian(self):
        # mean_n = var_n = |alpha|^2 for a coherent state
        alpha2 = 0.9**2 + 1.3**2
        rep = photon_moments(displace(vacuum_state(1), 0, 0.9, 1.3), (0,))
        assert np.allclose(rep.mean_n, alpha2)
        assert np.allclose(rep.var_n, alpha2)

    def test_bad_mode_index_rejected(self):
        with pytest.raises(ValueError, match="out of range"):
            displace(vacuum_state(1), 1, 1.0, 0.0)

    def test_bad_state_shapes_rejected(self):
        with pytest.raises(ValueError):
            GaussianState(num_modes=2, mean=np.zeros(3), cov=np.eye(4))
        with pytest.raises(ValueError):
            GaussianState(num_modes=0, mean=np.zeros(0), cov=np.eye(0))


class TestPhaseRotation:
    def test_rotates_coherent_amplitude(self):
        st = apply_phase(displace(vacuum_state(1), 0, 1.0, 0.0), 0, 0.3)
        assert np.allclose(st.mean, [math.cos(0.3), math.sin(0.3)])

    def test_composition(self):
        st = displace(vacuum_state(1), 0, 0.4, 0.8)
        st = apply_single_mode_squeezer(st, 0, 0.6)
        once = apply_phase(st, 0, 1.1)
        twice = apply_phase(apply_phase(st, 0, 0.7), 0, 0.4)
        assert np.allclose(once.mean, twice.mean)
        assert np.allclose(once.cov, twice.cov)

    def test_full_turn_is_identity(self):
        st = apply_single_mode_squeezer(displace(vacuum_state(1), 0, 1.0, -0.5), 0, 0.4)
        rt = apply_phase(st, 0, 2.0 * math.pi)
        assert np.allclose(rt.mean, st.mean)
        assert np.allclose(rt.cov, st.cov)

    def test_photon_number_invariant(self):
        st = apply_single_mode_squeezer(displace(vacuum_state(1), 0, 1.2, 0.3), 0, 0.5)
        before = photon_moments(st, (0,))
        after = photon_moments(apply_phase(st, 0, 0.9), (0,))
        assert abs(after.mean_n - before.mean_n) < PHOTON_CONSERVATION_ATOL
        assert abs(after.var_n - before.var_n) < PHOTON_CONSERVATION_ATOL


class TestBeamsplitter:
    def test_splits_coherent_power_evenly(self):
        st = apply_beamsplitter(displace(vacuum_state(2), 0, 2.0, 0.0), 0, 1)
        n0 = photon_moments(st, (0,)).mean_n
        n1 = photon_moments(st, (1,)).mean_n
        assert np.allclose([n0, n1], [2.0, 2.0])

    def test_conserves_total_photon_statistics(self):
        st = displace(vacuum_state(2), 0, 1.0, 0.5)
        st = apply_single_mode_squeezer(st, 1, 0.7)
        before = photon_moments(st, (0, 1))
        after = photon_moments(apply_beamsplitter(st, 0, 1), (0, 1))
        assert abs(after.mean_n - before.mean_n) < PHOTON_CONSERVATION_ATOL
        assert abs(after.var_n - before.var_n) < PHOTON_CONSERVATION_ATOL

    def test_double_pass_restores_marginals(self):
        # the 50:50 splitter used twice acts as a swap up to mode-local phases
        st = displace(vacuum_state(2), 0, 1.5, 0.0)
        rt = apply_beamsplitter(apply_beamsplitter(st, 0, 1), 0, 1)
        assert np.allclose(photon_moments(rt, (1,)).mean_n, 2.25)
        assert np.allclose(photon_moments(rt, (0,)).mean_n, 0.0, atol=1e-14)

    def test_identical_modes_rejected(self):
        with pytest.raises(ValueError, match="distinct"):
            apply_beamsplitter(vacuum_state(2), 1, 1)


class TestSqueezers:
    def test_single_mode_vacuum_variances(self):
        g = 0.5
        st = apply_single_mode_squeezer(vacuum_state(1), 0, g)
        assert np.allclose(np.diag(st.cov), [math.exp(2 * g) / 4, math.exp(-2 * g) / 4])

    def test_pump_phase_pi_swaps_quadratures(self):
        g = 0.5
        st = apply_single_mode_squeezer(vacuum_state(1), 0, g, math.pi)
        assert np.allclose(np.diag(st.cov), [math.exp(-2 * g) / 4, math.exp(2 * g) / 4])

    def test_squeezed_vacuum_photon_moments(self):
        # mean_n = sinh^2 g, var_n = sinh^2(2g)/2
        g = 0.8
        rep = photon_moments(apply_single_mode_squeezer(vacuum_state(1), 0, g), (0,))
        assert np.allclose(rep.mean_n, math.sinh(g) ** 2)
        assert np.allclose(rep.var_n, math.sinh(2 * g) ** 2 / 2)

    def test_amplifies_aligned_mean(self):
        g = 0.6
        st = apply_single_mode_squeezer(displace(vacuum_state(1), 0, 1.0, 1.0), 0, g)
        assert np.allclose(st.mean, [math.exp(g), math.exp(-g)])

    def test_two_mode_vacuum_moments(self):
        g = 0.4
        st = apply_two_mode_squeezer(vacuum_state(2), 0, 1, g)
        for m in (0, 1):
            assert np.allclose(photon_moments(st, (m,)).mean_n, math.sinh(g) ** 2)
        # photons appear in correlated pairs
        assert np.allclose(st.cov[0, 2], math.sinh(2 * g) / 4)
        assert np.allclose(st.cov[1, 3], -math.sinh(2 * g) / 4)

    def test_two_mode_reduced_state_is_thermal(self):
        g = 0.4
        st = apply_two_mode_squeezer(vacuum_state(2), 0, 1, g)
        red = reduce_state(st, (0,))
        assert np.allclose(red.cov, math.cosh(2 * g) / 4 * np.eye(2))

    def test_negative_gain_rejected(self):
        with pytest.raises(ValueError, match="gain"):
            apply_single_mode_squeezer(vacuum_state(1), 0, -0.1)
        with pytest.raises(ValueError, match="gain"):
            apply_two_mode_squeezer(vacuum_state(2), 0, 1, -0.1)


class TestLoss:
    def test_interpolates_toward_vacuum(self):
        g, eta = 0.7, 0.6
        st = apply_single_mode_squeezer(displace(vacuum_state(1), 0, 1.0, 0.0), 0, g)
        lo = apply_loss(st, 0, eta)
        assert np.allclose(lo.mean, math.sqrt(eta) * st.mean)
        assert np.allclose(lo.cov, eta * st.cov + (1 - eta) * VACUUM_VARIANCE * np.eye(2))

    def test_eta_one_is_identity(self):
        st = apply_single_mode_squeezer(vacuum_state(1), 0, 0.5)
        same = apply_loss(st, 0, 1.0)
        assert np.array_equal(same.cov, st.cov)

    def test_eta_zero_resets_to_vacuum(self):
        st = apply_single_mode_squeezer(displace(vacuum_state(1), 0, 2.0, 1.0), 0, 1.0)
        dark = apply_loss(st, 0, 0.0)
        assert np.allclose(dark.mean, 0.0)
        assert np.allclose(dark.cov, VACUUM_VARIANCE * np.eye(2))

    def test_composition_multiplies_transmissions(self):
        st = apply_single_mode_squeezer(displace(vacuum_state(1), 0, 1.3, -0.4), 0, 0.9)
        chained = apply_loss(apply_loss(st, 0, 0.8), 0, 0.5)
        direct = apply_loss(st, 0, 0.4)
        assert np.allclose(chained.mean, direct.mean, atol=LOSS_COMPOSITION_ATOL)
        assert np.allclose(chained.cov, direct.cov, atol=LOSS_COMPOSITION_ATOL)

    def test_coherent_stays_poissonian(self):
        eta, alpha2 = 0.36, 1.46
        st = apply_loss(displace(vacuum_state(1), 0, 1.1, 0.5), 0, eta)
        rep = photon_moments(st, (0,))
        assert np.allclose(rep.mean_n, eta * alpha2)
        assert np.allclose(rep.var_n, eta * alpha2)

    def test_out_of_range_eta_rejected(self):
        for eta in (-0.01, 1.01):
            with pytest.raises(ValueError, match="eta"):
                apply_loss(vacuum_state(1), 0, eta)

    def test_acts_only_on_target_mode(self):
        st = displace(displace(vacuum_state(2), 0, 1.0, 0.0), 1, 2.0, 0.0)
        lo = apply_loss(st, 0, 0.5)
        assert np.allclose(photon_moments(lo, (1,)).mean_n, 4.0)


class TestPhotonMoments:
    def test_additive_over_independent_modes(self):
        st = displace(vacuum_state(3), 0, 1.0, 0.0)
        st = apply_single_mode_squeezer(st, 1, 0.6)
        st = displace(st, 2, 0.0, 0.8)
        per_mode = [photon_moments(st, (m,)) for m in range(3)]
        joint = photon_moments(st, (0, 1, 2))
        assert np.allclose(joint.mean_n, sum(r.mean_n for r in per_mode))
        assert np.allclose(joint.var_n, sum(r.var_n for r in per_mode))

    def test_correlated_pair_variance_exceeds_sum(self):
        # two-mode squeezing correlates the mode photon numbers
        st = apply_two_mode_squeezer(vacuum_state(2), 0, 1, 0.5)
        joint = photon_moments(st, (0, 1))
        solo = photon_moments(st, (0,)).var_n + photon_moments(st, (1,)).var_n
        assert joint.var_n > solo

    def test_displaced_squeezed_mean(self):
        # mean_n = |alpha'|^2 + sinh^2 g with the amplified amplitude
        g = 0.5
        st = apply_single_mode_squeezer(displace(vacuum_state(1), 0, 1.0, 0.0), 0, g)
        rep = photon_moments(st, (0,))
        assert np.allclose(rep.mean_n, math.exp(2 * g) + math.sinh(g) ** 2)

    def test_modes_are_set_valued(self):
        # mode selection is a set: order and duplicates do not matter
        st = displace(vacuum_state(3), 0, 1.0, 0.0)
        a = photon_moments(st, (2, 0))
        b = photon_moments(st, (0, 2, 2))
        assert a.modes == b.modes
        assert np.allclose(a.mean_n, b.mean_n)

    def test_empty_mode_set_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            photon_moments(vacuum_state(2), ())


class TestSymplecticSpectrum:
    def test_vacuum_and_pure_states_sit_at_quarter(self):
        st = apply_single_mode_squeezer(vacuum_state(2), 0, 1.0)
        st = apply_two_mode_squeezer(st, 0, 1, 0.7)
        nu = symplectic_eigenvalues(st)
        assert np.allclose(nu, 0.25)

    def test_loss_lifts_eigenvalues(self):
        st = apply_loss(apply_single_mode_squeezer(vacuum_state(1), 0, 1.0), 0, 0.5)
        nu = symplectic_eigenvalues(st)
        assert np.all(nu >= 0.25 - PHYSICALITY_ATOL)
        assert nu.max() > 0.26

    def test_asymmetric_covariance_rejected(self):
        cov = VACUUM_VARIANCE * np.eye(2)
        cov[0, 1] = 1e-6
        st = GaussianState(num_modes=1, mean=np.zeros(2), cov=cov)
        with pytest.raises(NumericalFailure, match="asymmetry"):
            symplectic_eigenvalues(st)


class TestReduceState:
    def test_marginal_of_product_state(self):
        st = displace(vacuum_state(2), 0, 1.0, 2.0)
        st = apply_single_mode_squeezer(st, 1, 0.3)
        red = reduce_state(st, (1,))
        direct = apply_single_mode_squeezer(vacuum_state(1), 0, 0.3)
        assert red.num_modes == 1
        assert np.allclose(red.cov, direct.cov)
        assert np.allclose(red.mean, 0.0)

    def test_selection_is_set_valued(self):
        st = displace(displace(vacuum_state(2), 0, 1.0, 0.0), 1, 0.0, 2.0)
        red = reduce_state(st, (1, 0))
        assert np.allclose(red.mean, [1.0, 0.0, 0.0, 2.0])
