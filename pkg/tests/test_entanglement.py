"""Entanglement measures: frozen closed forms and Wootters cross-checks."""

import math

import numpy as np
import pytest

from xxcrit import entanglement as ent
from xxcrit import freefermion as ff
from xxcrit import hilbert
from xxcrit.errors import ValidationError
from xxcrit.hilbert import SpinChainSpec

THERMO = SpinChainSpec(n_sites=None)


def ring(n, mu=0.0, t=0.0):
    return SpinChainSpec(n_sites=n, chem_potential=mu, temperature=t)


class TestSingleSiteEntropy:
    def test_half_filling_is_ln2(self):
        assert ent.single_site_entropy(0.0) == pytest.approx(math.log(2), abs=1e-15)

    def test_one_third(self):
        # eps = (2/3, 1/3): S = ln 3 - (2/3) ln 2
        expected = math.log(3) - (2 / 3) * math.log(2)
        assert ent.single_site_entropy(1 / 3) == pytest.approx(expected, abs=1e-15)

    def test_saturated_is_exact_zero(self):
        assert ent.single_site_entropy(1.0) == 0.0
        assert ent.single_site_entropy(-1.0) == 0.0

    def test_domain(self):
        with pytest.raises(ValidationError):
            ent.single_site_entropy(1.2)

    def test_symmetry(self):
        assert ent.single_site_entropy(0.4) == pytest.approx(
            ent.single_site_entropy(-0.4), abs=1e-15
        )


class TestConcurrence:
    def test_half_filling_frozen_value(self):
        # |xx| - sqrt((1+zz)^2): 2/pi - (1 - 4/pi^2) = 2/pi + 4/pi^2 - 1
        corr = ff.nn_correlators(THERMO, r_max=1)
        expected = 2 / math.pi + 4 / math.pi**2 - 1
        assert ent.concurrence_nn(corr) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.0419, abs=5e-5)

    def test_standard_half_filling_frozen_value(self):
        corr = ff.nn_correlators(THERMO, r_max=1)
        expected = 2 / math.pi - 0.5 * (1 - 4 / math.pi**2)
        assert ent.concurrence_standard(corr) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.33926, abs=5e-5)

    @pytest.mark.parametrize("mu,t", [(0.0, 0.0), (0.5, 0.0), (0.0, 0.3), (0.9, 0.0)])
    def test_nn_formula_is_lower_bound(self, mu, t):
        corr = ff.nn_correlators(
            SpinChainSpec(n_sites=None, chem_potential=mu, temperature=t), r_max=1
        )
        assert ent.concurrence_nn(corr) <= ent.concurrence_standard(corr) + 1e-15

    @pytest.mark.parametrize("mu,t", [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.3, 0.4)])
    def test_standard_matches_wootters_on_rdm(self, mu, t):
        # correlator closed form vs brute-force Wootters on the same state
        spec = ring(8, mu=mu, t=t)
        h = hilbert.build_xx_hamiltonian(spec)
        state = (
            hilbert.ground_state(h) if t == 0 else hilbert.thermal_state(h, 1.0 / t)
        )
        rho = hilbert.density_matrix(hilbert.reduced_density_matrix(state, [0, 1]))
        c_rdm = ent.concurrence_wootters(rho)
        corr = ff.nn_correlators(spec, solver="exactdiag")
        assert ent.concurrence_standard(corr) == pytest.approx(c_rdm, abs=1e-9)

    def test_vacuum_has_no_entanglement(self):
        corr = ff.nn_correlators(SpinChainSpec(n_sites=None, chem_potential=1.5), r_max=1)
        assert ent.concurrence_nn(corr) == 0.0
        assert ent.concurrence_standard(corr) == 0.0

    def test_wootters_on_bell_state(self):
        psi = np.zeros(4)
        psi[1] = psi[2] = 1 / math.sqrt(2)
        rho = np.outer(psi, psi)
        assert ent.concurrence_wootters(rho) == pytest.approx(1.0, abs=1e-12)

    def test_wootters_on_product_state(self):
        rho = np.diag([1.0, 0.0, 0.0, 0.0])
        assert ent.concurrence_wootters(rho) == pytest.approx(0.0, abs=1e-12)


class TestWitnesses:
    def test_fs_half_fires_at_half_filling(self):
        w = ent.witness_superfluid(2 / math.pi)
        assert w.witness_name == "fs_half"
        assert w.fired
        assert w.margin == pytest.approx(2 / math.pi - 0.5, abs=1e-12)

    def test_fs_half_silent(self):
        w = ent.witness_superfluid(0.3)
        assert not w.fired and w.margin < 0

    def test_mu_t_disc(self):
        w = ent.witness_high_temperature(0.5, 0.5, 1.0)
        assert w.witness_name == "mu_T_disc"
        assert w.fired
        assert w.margin == pytest.approx(0.5, abs=1e-12)
        assert not ent.witness_high_temperature(1.0, 0.8, 1.0).fired
        assert ent.witness_high_temperature(5000.0, 3000.0, 10000.0).fired

    def test_energy_1d(self):
        # half filling: bond energy -J (xx+yy)/2 = -2J/pi < -J/2
        w = ent.witness_energy_1d(-2 / math.pi, 1.0)
        assert w.witness_name == "energy_1d"
        assert w.fired
        assert not ent.witness_energy_1d(-0.4, 1.0).fired

    def test_witness_name_enum_enforced(self):
        with pytest.raises(ValidationError):
            ent.WitnessReport(witness_name="banana", fired=True, margin=0.0)

    def test_input_validation(self):
        with pytest.raises(ValidationError):
            ent.witness_high_temperature(0.5, 0.5, 0.0)
        with pytest.raises(ValidationError):
            ent.witness_superfluid(-0.1)


class TestExperimentEntropyEstimate:
    def test_frozen_value_at_0p9(self):
        est = ent.experiment_entropy_estimate(0.9)
        assert est.magnetization == pytest.approx(0.7128674137425874, abs=1e-12)
        assert est.entropy == pytest.approx(0.4113848943426309, abs=1e-12)
        assert not est.saturated
        assert est.epsilon_plus + est.epsilon_minus == pytest.approx(1.0, abs=1e-15)

    def test_saturated_path(self):
        est = ent.experiment_entropy_estimate(1.5)
        assert est.saturated
        assert est.magnetization == 1.0
        assert est.entropy == 0.0

    def test_half_filling_is_maximal(self):
        est = ent.experiment_entropy_estimate(0.0)
        assert est.entropy == pytest.approx(math.log(2), abs=1e-12)


class TestVonNeumann:
    def test_bell_pair_cut(self):
        h = hilbert.build_xx_hamiltonian(
            SpinChainSpec(n_sites=2, boundary="open")
        )
        gs = hilbert.ground_state(h)
        rdm = hilbert.reduced_density_matrix(gs, [0])
        assert ent.von_neumann_entropy(rdm) == pytest.approx(math.log(2), abs=1e-12)

    def test_pure_state_is_zero(self):
        h = hilbert.build_xx_hamiltonian(ring(4))
        assert ent.von_neumann_entropy(hilbert.ground_state(h)) == 0.0
