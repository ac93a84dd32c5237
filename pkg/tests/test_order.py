import math

import numpy as np
import pytest

from xxcrit import order
from xxcrit.entanglement import concurrence_wootters, von_neumann_entropy
from xxcrit.errors import ValidationError
from xxcrit.hilbert import SpinChainSpec, pair_expectations, reduced_density_matrix


class TestClassifier:
    def test_critical_point_is_quasi_long_range(self):
        spec = SpinChainSpec(n_sites=None, chem_potential=0.0)
        prof = order.correlation_profile(spec, r_max=64)
        assert prof.classification == "quasi_long_range"
        exponent, rms = prof.fit_poly
        assert abs(exponent - 0.5) <= 0.05
        assert rms < 1e-2
        v = dict(prof.points)
        assert np.isclose(v[1], 2.0 / np.pi, atol=1e-12)
        # asymptotic amplitude ~ 0.588 / sqrt(r)
        assert abs(v[16] / v[64] - 2.0) < 0.01

    def test_gapped_phase_has_zero_signal(self):
        spec = SpinChainSpec(n_sites=None, chem_potential=1.2)
        prof = order.correlation_profile(spec, r_max=64)
        assert prof.classification == "short_range"
        assert prof.fit_poly is None and prof.fit_exp is None
        assert max(abs(v) for _, v in prof.points) == 0.0

    def test_finite_temperature_is_exponential(self):
        spec = SpinChainSpec(n_sites=None, chem_potential=0.0, temperature=0.5)
        prof = order.correlation_profile(spec, r_max=48)
        assert prof.classification == "short_range"
        _, poly_rms = prof.fit_poly
        rate, exp_rms = prof.fit_exp
        assert exp_rms < poly_rms
        assert rate > 0.1

    def test_synthetic_power_law(self):
        pts = [(r, 2.0 * r**-0.7) for r in range(1, 33)]
        prof = order.classify_decay(pts)
        assert prof.classification == "quasi_long_range"
        assert abs(prof.fit_poly[0] - 0.7) < 1e-8

    def test_synthetic_exponential(self):
        pts = [(r, 0.8 * math.exp(-r / 3.0)) for r in range(1, 33)]
        prof = order.classify_decay(pts)
        assert prof.classification == "short_range"
        assert abs(prof.fit_exp[0] - 1.0 / 3.0) < 1e-8

    def test_synthetic_plateau(self):
        pts = [(r, 0.3) for r in range(1, 17)]
        prof = order.classify_decay(pts)
        assert prof.classification == "long_range"
        assert abs(prof.fit_poly[0]) < 1e-10

    def test_ring_profile_classifies(self):
        spec = SpinChainSpec(n_sites=12, chem_potential=0.0)
        prof = order.correlation_profile(spec, r_max=8, solver="exactdiag")
        assert prof.classification in order.CLASSIFICATIONS
        assert len(prof.points) == 8

    def test_validation(self):
        with pytest.raises(ValidationError):
            order.correlation_profile(SpinChainSpec(n_sites=None), r_max=4)
        with pytest.raises(ValidationError):
            order.classify_decay([(1, 0.5)])
        with pytest.raises(ValidationError):
            order.classify_decay([(0, 0.5), (1, 0.3)])
        with pytest.raises(ValidationError):
            order.DecayProfile([(1, 0.1)], None, None, "weird")


class TestGHZ:
    @pytest.mark.parametrize("n", [4, 8])
    def test_transverse_order_absent(self, n):
        state = order.ghz_state(n)
        for r in range(1, n):
            pe = pair_expectations(state, 0, r)
            assert abs(pe["xx"]) <= 1e-12
            assert abs(pe["yy"]) <= 1e-12

    @pytest.mark.parametrize("n", [4, 8])
    def test_sigma_z_order_is_long_range(self, n):
        state = order.ghz_state(n)
        pts = [(r, pair_expectations(state, 0, r)["zz"]) for r in range(1, n)]
        assert all(np.isclose(v, 1.0, atol=1e-12) for _, v in pts)
        if len(pts) >= 6:
            prof = order.classify_decay(pts)
            assert prof.classification == "long_range"

    def test_every_cut_entropy_is_ln2(self):
        state = order.ghz_state(6)
        for cut in ([0], [0, 1], [0, 1, 2], [2, 4]):
            rdm = reduced_density_matrix(state, cut)
            assert np.isclose(von_neumann_entropy(rdm), math.log(2.0), atol=1e-12)

    def test_two_site_ghz_is_bell_pair(self):
        state = order.ghz_state(2)
        pe = pair_expectations(state, 0, 1)
        assert np.isclose(pe["xx"], 1.0, atol=1e-12)
        assert np.isclose(pe["zz"], 1.0, atol=1e-12)
        rho = np.outer(state.amplitudes, state.amplitudes.conj())
        assert np.isclose(concurrence_wootters(rho), 1.0, atol=1e-12)

    def test_bounds(self):
        with pytest.raises(ValidationError):
            order.ghz_state(1)
        with pytest.raises(ValidationError):
            order.ghz_state(13)


class TestCoherentProduct:
    def test_uniform_transverse_order(self):
        n_max = 6
        state = order.coherent_product_state(0.5, 5, n_max)
        b = order.bose_annihilation(n_max)
        hop = np.kron(b.T, b)  # b+_i b_j on the (i, j) pair
        pts = []
        for j in (1, 2, 3, 4):
            rdm = reduced_density_matrix(state, [0, j], local_dim=n_max + 1)
            rho = rdm.spectrum[1] @ np.diag(rdm.spectrum[0]) @ rdm.spectrum[1].conj().T
            val = np.trace(rho @ hop).real
            # truncation error ~ sum_{n>n_max} n P(n) ~ 7e-8 at alpha=0.5, n_max=6
            assert abs(val - 0.25) <= 1e-6
            pts.append((j, val))
        prof = order.classify_decay(pts)
        assert prof.classification == "long_range"

    def test_site_density(self):
        n_max = 6
        state = order.coherent_product_state(0.5, 3, n_max)
        b = order.bose_annihilation(n_max)
        num = b.T @ b
        rdm = reduced_density_matrix(state, [1], local_dim=n_max + 1)
        rho = rdm.spectrum[1] @ np.diag(rdm.spectrum[0]) @ rdm.spectrum[1].conj().T
        assert abs(np.trace(rho @ num).real - 0.25) <= 1e-6

    def test_no_entanglement_across_any_cut(self):
        n_max = 4
        state = order.coherent_product_state(0.4, 4, n_max)
        for cut in ([0], [0, 1], [1, 2, 3], [0, 2]):
            rdm = reduced_density_matrix(state, cut, local_dim=n_max + 1)
            assert von_neumann_entropy(rdm) <= 1e-12
        # order parameter is nonzero on the very same state
        b = order.bose_annihilation(n_max)
        rdm = reduced_density_matrix(state, [0, 3], local_dim=n_max + 1)
        rho = rdm.spectrum[1] @ np.diag(rdm.spectrum[0]) @ rdm.spectrum[1].conj().T
        assert np.trace(rho @ np.kron(b.T, b)).real > 0.1

    def test_truncation_guard(self):
        with pytest.raises(ValidationError):
            order.coherent_product_state(2.0, 3, 6)
        with pytest.raises(ValidationError):
            order.coherent_product_state(0.5, 1, 6)
