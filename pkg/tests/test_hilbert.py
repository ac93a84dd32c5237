"""Exact-diagonalization engine tests against hand-derived closed forms."""

import math

import numpy as np
import pytest

from xxcrit.errors import ResourceLimitError, ValidationError
from xxcrit.hilbert import (
    SIGMA_X,
    SIGMA_Z,
    BoseHubbardSpec,
    HamiltonianMatrix,
    QuantumState,
    SpinChainSpec,
    bose_hopping_matrix,
    build_bose_hubbard,
    build_twisted_hamiltonian,
    build_xx_hamiltonian,
    density_matrix,
    expectation,
    ground_state,
    pair_expectations,
    reduced_density_matrix,
    thermal_state,
)


def eigvals(h):
    return np.linalg.eigvalsh(h.entries)


class TestTwoSite:
    def test_open_spectrum_is_pm_j(self):
        # single bond: H = -J(s+s- + s-s+), eigenvalues {-J, 0, 0, +J}
        for j in (1.0, 1.7):
            h = build_xx_hamiltonian(SpinChainSpec(n_sites=2, coupling_j=j, boundary="open"))
            assert np.allclose(eigvals(h), [-j, 0.0, 0.0, j], atol=1e-12)

    def test_periodic_doubles_the_bond(self):
        # on the 2-ring both bonds (0,1) and (1,0) connect the same pair
        h = build_xx_hamiltonian(SpinChainSpec(n_sites=2, coupling_j=1.0))
        assert np.allclose(eigvals(h), [-2.0, 0.0, 0.0, 2.0], atol=1e-12)

    def test_ground_is_symmetric_combination(self):
        h = build_xx_hamiltonian(SpinChainSpec(n_sites=2, coupling_j=1.0, boundary="open"))
        gs = ground_state(h)
        assert expectation(gs, h) == pytest.approx(-1.0, abs=1e-12)
        target = np.array([0.0, 1.0, 1.0, 0.0]) / math.sqrt(2)
        assert np.allclose(np.abs(gs.amplitudes), target, atol=1e-12)
        xx = pair_expectations(gs, 0, 1)["xx"]
        assert xx == pytest.approx(1.0, abs=1e-12)

    def test_diagonal_limit(self):
        # J=0, mu=1: H = -sum sigmaz, spectrum {-2, 0, 0, +2}
        h = build_xx_hamiltonian(
            SpinChainSpec(n_sites=2, coupling_j=0.0, chem_potential=1.0, boundary="open")
        )
        assert np.allclose(eigvals(h), [-2.0, 0.0, 0.0, 2.0], atol=1e-14)


class TestBuilder:
    def test_basis_label_convention(self):
        h = build_xx_hamiltonian(SpinChainSpec(n_sites=3, coupling_j=1.0, boundary="open"))
        assert h.basis_labels[0] == "000"
        assert h.basis_labels[1] == "001"
        assert h.basis_labels[5] == "101"
        # bond (1,2) connects "001" <-> "010" with amplitude -J
        assert h.entries[2, 1] == pytest.approx(-1.0)
        assert h.entries[1, 2] == pytest.approx(-1.0)

    def test_chemical_potential_diagonal(self):
        mu = 0.7
        h = build_xx_hamiltonian(SpinChainSpec(n_sites=3, chem_potential=mu, boundary="open"))
        assert h.entries[0, 0] == pytest.approx(-3 * mu)  # |000>, all sigmaz = +1
        assert h.entries[7, 7] == pytest.approx(+3 * mu)  # |111>
        assert np.trace(h.entries) == pytest.approx(0.0, abs=1e-12)

    def test_large_mu_ground_is_vacuum(self):
        # N=3 ring, mu=2J: adding one particle costs -2J + 2mu > 0, so the
        # ground state is the empty chain with E = -mu N = -6
        h = build_xx_hamiltonian(SpinChainSpec(n_sites=3, chem_potential=2.0))
        e = eigvals(h)
        assert e[0] == pytest.approx(-6.0, abs=1e-12)
        gs = ground_state(h)
        assert abs(gs.amplitudes[0]) == pytest.approx(1.0, abs=1e-12)

    def test_four_site_ring_half_mu_ground_energy(self):
        # N=4, mu=J/2: one fermion at k=0 in the odd (periodic) sector,
        # E0 = -2J + 2mu - mu N = -3J
        h = build_xx_hamiltonian(SpinChainSpec(n_sites=4, chem_potential=0.5))
        assert eigvals(h)[0] == pytest.approx(-3.0, abs=1e-12)

    def test_hermitian_guard_fires(self):
        bad = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(ValidationError):
            HamiltonianMatrix(dimension=2, entries=bad, basis_labels=["0", "1"])


class TestTwist:
    def test_open_chain_twist_is_gauge(self):
        specs = [
            SpinChainSpec(n_sites=5, chem_potential=0.3, twist_per_bond=t, boundary="open")
            for t in (0.0, 0.3, 1.0)
        ]
        spectra = [eigvals(build_twisted_hamiltonian(s)) for s in specs]
        assert np.abs(spectra[1] - spectra[0]).max() < 1e-10
        assert np.abs(spectra[2] - spectra[0]).max() < 1e-10

    def test_ring_spectrum_2pi_periodic(self):
        e1 = eigvals(build_twisted_hamiltonian(SpinChainSpec(n_sites=4, twist_per_bond=0.37)))
        e2 = eigvals(
            build_twisted_hamiltonian(SpinChainSpec(n_sites=4, twist_per_bond=0.37 + 2 * math.pi))
        )
        assert np.abs(e1 - e2).max() < 1e-10

    def test_small_twist_energy_shift_n8(self):
        # E(theta) = E(0) cos(theta) for the symmetric Fermi sea, so
        # [E(theta)-E(0)]/(J N theta^2) -> |E0|/(2JN) = (cos(pi/8)+cos(3pi/8))/4
        theta = 1e-3
        h0 = build_xx_hamiltonian(SpinChainSpec(n_sites=8))
        ht = build_twisted_hamiltonian(SpinChainSpec(n_sites=8, twist_per_bond=theta))
        de = eigvals(ht)[0] - eigvals(h0)[0]
        expected = (math.cos(math.pi / 8) + math.cos(3 * math.pi / 8)) / 4  # 0.32664074...
        assert de / (8 * theta**2) == pytest.approx(expected, abs=1e-6)


class TestThermal:
    def test_two_site_partition_function(self):
        # open pair: Z = 2 + 2 cosh(beta J), <H> = -2J sinh(beta J)/Z
        j, beta = 1.0, 0.7
        h = build_xx_hamiltonian(SpinChainSpec(n_sites=2, coupling_j=j, boundary="open"))
        st = thermal_state(h, beta)
        expected = -2 * j * math.sinh(beta * j) / (2 + 2 * math.cosh(beta * j))
        assert expectation(st, h) == pytest.approx(expected, abs=1e-12)

    def test_low_temperature_limit_recovers_ground(self):
        h = build_xx_hamiltonian(SpinChainSpec(n_sites=3, chem_potential=0.3))
        st = thermal_state(h, 1e5)
        e0 = eigvals(h)[0]
        assert expectation(st, h) == pytest.approx(e0, abs=1e-8)

    def test_high_temperature_limit_is_uniform(self):
        # deviations from uniform are O(beta * spectral spread), so beta=1e-9
        # puts them safely under the 1e-8 gate
        h = build_xx_hamiltonian(SpinChainSpec(n_sites=3, chem_potential=0.3))
        p, _ = thermal_state(h, 1e-9).spectrum
        assert np.abs(p - 1 / 8).max() < 1e-8

    def test_thermal_matches_ground_at_large_beta(self):
        h = build_xx_hamiltonian(SpinChainSpec(n_sites=4, chem_potential=0.5))
        gs, st = ground_state(h), thermal_state(h, 1e5)
        assert expectation(st, h) == pytest.approx(expectation(gs, h), abs=1e-8)

    def test_beta_validation(self):
        h = build_xx_hamiltonian(SpinChainSpec(n_sites=2, boundary="open"))
        with pytest.raises(ValidationError):
            thermal_state(h, -1.0)
        with pytest.raises(ValidationError):
            thermal_state(h, math.inf)


class TestReducedDensityMatrix:
    def test_half_filling_single_site(self):
        # N=10 ring at mu=0 is half filled; site RDM diag = (1/2, 1/2)
        h = build_xx_hamiltonian(SpinChainSpec(n_sites=10))
        gs = ground_state(h)
        rho = density_matrix(reduced_density_matrix(gs, [5]))
        assert np.allclose(np.diag(rho).real, [0.5, 0.5], atol=1e-10)

    def test_product_state_rdm_is_pure(self):
        h = build_xx_hamiltonian(SpinChainSpec(n_sites=4, chem_potential=3.0))
        gs = ground_state(h)  # vacuum
        p, _ = reduced_density_matrix(gs, [0, 2]).spectrum
        assert p[0] == pytest.approx(1.0, abs=1e-12)

    def test_thermal_rdm_matches_operator_expectation(self):
        spec = SpinChainSpec(n_sites=4, chem_potential=0.2)
        h = build_xx_hamiltonian(spec)
        st = thermal_state(h, 2.0)
        # sigmaz on site 1 via full operator vs via RDM
        op = np.kron(np.kron(np.eye(2), SIGMA_Z), np.eye(4))
        direct = expectation(st, op)
        rho = density_matrix(reduced_density_matrix(st, [1]))
        assert np.trace(rho @ SIGMA_Z).real == pytest.approx(direct, abs=1e-12)

    def test_pair_expectations_symmetric_state(self):
        h = build_xx_hamiltonian(SpinChainSpec(n_sites=2, boundary="open"))
        vals = pair_expectations(ground_state(h), 0, 1)
        assert vals["xx"] == pytest.approx(1.0, abs=1e-12)
        assert vals["yy"] == pytest.approx(1.0, abs=1e-12)
        assert vals["zz"] == pytest.approx(-1.0, abs=1e-12)
        assert vals["pm"] == pytest.approx(0.5, abs=1e-12)

    def test_total_sz_zero_on_symmetric_pair(self):
        h = build_xx_hamiltonian(SpinChainSpec(n_sites=2, boundary="open"))
        gs = ground_state(h)
        op = np.kron(SIGMA_Z, np.eye(2)) + np.kron(np.eye(2), SIGMA_Z)
        assert expectation(gs, op) == pytest.approx(0.0, abs=1e-12)


class TestBoseHubbard:
    def test_hardcore_equals_xx(self):
        bh = build_bose_hubbard(BoseHubbardSpec(n_sites=4, coupling_j=1.0, onsite_u=7.3, n_max=1))
        xx = build_xx_hamiltonian(SpinChainSpec(n_sites=4, coupling_j=1.0))
        assert bh.basis_labels == xx.basis_labels
        assert np.abs(bh.entries - xx.entries).max() < 1e-10

    def test_atomic_limit_spectrum(self):
        # J=0: diagonal, eigenvalues (U/2) sum n(n-1)
        u = 4.0
        spec = BoseHubbardSpec(n_sites=3, coupling_j=0.0, onsite_u=u, n_max=2)
        h = build_bose_hubbard(spec)
        e = eigvals(h)
        assert e[0] == pytest.approx(0.0, abs=1e-14)
        assert e[-1] == pytest.approx(0.5 * u * 2 * 1 * 3, abs=1e-12)  # (2,2,2)
        diag = sorted(np.diag(h.entries))
        assert np.allclose(e, diag, atol=1e-12)

    def test_number_sector_dimension(self):
        spec = BoseHubbardSpec(n_sites=3, n_max=2, n_particles=2)
        h = build_bose_hubbard(spec)
        assert h.dimension == 6  # compositions of 2 into 3 parts, each <= 2

    def test_matrix_element_sqrt_factors(self):
        # two sites, one bond: <20|b+_0 b_1|11> = sqrt(1*2) = sqrt(2)
        spec = BoseHubbardSpec(n_sites=2, coupling_j=1.0, n_max=2, boundary="open")
        h = build_bose_hubbard(spec)
        i11 = h.basis_labels.index("11")
        i20 = h.basis_labels.index("20")
        assert h.entries[i20, i11] == pytest.approx(-math.sqrt(2.0))

    def test_number_conservation_in_sector(self):
        spec = BoseHubbardSpec(n_sites=4, coupling_j=1.0, onsite_u=2.0, n_max=2, n_particles=3)
        h = build_bose_hubbard(spec)
        gs = ground_state(h)
        # every basis label in the sector has 3 particles
        assert all(sum(int(c) for c in lab) == 3 for lab in h.basis_labels)
        assert expectation(gs, h.entries) <= eigvals(h)[0] + 1e-12

    def test_hopping_matrix_element_and_hermitian_pair(self):
        spec = BoseHubbardSpec(n_sites=2, n_max=2)
        m01 = bose_hopping_matrix(spec, 0, 1)
        m10 = bose_hopping_matrix(spec, 1, 0)
        basis = [(i, j) for i in range(3) for j in range(3)]
        assert np.isclose(m01[basis.index((2, 0)), basis.index((1, 1))], np.sqrt(2), atol=1e-14)
        assert np.allclose(m10, m01.T)
        # open pair: single bond, H = -J (m01 + m10)
        h = build_bose_hubbard(BoseHubbardSpec(n_sites=2, coupling_j=1.3, n_max=2, boundary="open"))
        assert np.allclose(h.entries, -1.3 * (m01 + m10), atol=1e-14)
        with pytest.raises(ValidationError):
            bose_hopping_matrix(spec, 0, 0)


class TestValidation:
    def test_bad_specs(self):
        with pytest.raises(ValidationError):
            SpinChainSpec(n_sites=1)
        with pytest.raises(ValidationError):
            SpinChainSpec(n_sites=4, boundary="moebius")
        with pytest.raises(ValidationError):
            SpinChainSpec(n_sites=4, temperature=-0.1)
        with pytest.raises(ValidationError):
            SpinChainSpec(n_sites=None, boundary="open")
        with pytest.raises(ValidationError):
            BoseHubbardSpec(n_sites=3, n_max=0)
        with pytest.raises(ValidationError):
            BoseHubbardSpec(n_sites=3, n_max=2, n_particles=7)

    def test_resource_guards(self):
        with pytest.raises(ResourceLimitError):
            build_xx_hamiltonian(SpinChainSpec(n_sites=20))
        with pytest.raises(ValidationError):
            build_xx_hamiltonian(SpinChainSpec(n_sites=None))
        h = build_xx_hamiltonian(SpinChainSpec(n_sites=6))
        gs = ground_state(h)
        with pytest.raises(ResourceLimitError):
            reduced_density_matrix(gs, [0, 1, 2, 3, 4])

    def test_state_validation(self):
        with pytest.raises(ValidationError):
            QuantumState(kind="pure", amplitudes=np.array([1.0, 1.0]))
        with pytest.raises(ValidationError):
            QuantumState(kind="mixed")
        with pytest.raises(ValidationError):
            QuantumState(
                kind="thermal", spectrum=(np.array([0.5, 0.6]), np.eye(2))
            )

    def test_expectation_shape_mismatch(self):
        h = build_xx_hamiltonian(SpinChainSpec(n_sites=2, boundary="open"))
        gs = ground_state(h)
        with pytest.raises(ValidationError):
            expectation(gs, np.eye(8))
