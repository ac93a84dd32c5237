"""Exact diagonalization for the XX chain and small Bose-Hubbard systems.

Conventions used throughout the package:

* ``H = -J * sum_bonds (sigma+_j sigma-_l + sigma-_j sigma+_l) - mu * sum_j sigmaz_j``
  with ``sigmaz = 1 - 2 n`` (an empty site has sigmaz = +1, so mu > 0 favours
  the empty chain).
* A twist enters as a Peierls phase per bond:
  ``-J * (e^{i theta} sigma+_j sigma-_{j+1} + e^{-i theta} sigma+_{j+1} sigma-_j)``.
* Basis states are labelled by occupation strings; site ``j`` is the bit
  ``n_sites - 1 - j`` of the basis index, so ``basis_labels[b]`` reads
  left-to-right as sites ``0 .. n-1``.

Dense matrices only.  The builders fill arrays with bitwise index arithmetic
instead of kron chains, which keeps the peak memory at one matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from xxcrit.errors import ResourceLimitError, ValidationError

# Dense diagonalization is the ground-truth engine; past 2^14 it stops being
# a sane cross-check and the free-fermion solver is the intended tool.
MAX_DENSE_SITES = 14
MAX_DENSE_DIM = 2**14
MAX_REDUCED_SITES = 4

_BOUNDARIES = ("periodic", "open")


@dataclass(frozen=True)
class SpinChainSpec:
    """Parameters of an XX chain.

    ``n_sites=None`` selects the thermodynamic limit, which only the
    free-fermion solver can handle; the dense builders require a finite size.
    ``temperature`` is in units of J (beta = 1/T); 0 means ground state.
    """

    n_sites: Optional[int]
    coupling_j: float = 1.0
    chem_potential: float = 0.0
    twist_per_bond: float = 0.0
    boundary: str = "periodic"
    temperature: float = 0.0

    def __post_init__(self) -> None:
        if self.n_sites is not None:
            if not isinstance(self.n_sites, (int, np.integer)) or isinstance(self.n_sites, bool):
                raise ValidationError("n_sites must be an int or None")
            if self.n_sites < 2:
                raise ValidationError(f"n_sites must be >= 2, got {self.n_sites}")
        if self.boundary not in _BOUNDARIES:
            raise ValidationError(f"boundary must be one of {_BOUNDARIES}, got {self.boundary!r}")
        if self.n_sites is None and self.boundary != "periodic":
            raise ValidationError("the thermodynamic limit (n_sites=None) is defined on the ring")
        for name in ("coupling_j", "chem_potential", "twist_per_bond", "temperature"):
            v = getattr(self, name)
            if not isinstance(v, (int, float, np.floating, np.integer)) or not math.isfinite(v):
                raise ValidationError(f"{name} must be a finite real number, got {v!r}")
        # J = 0 is allowed (diagonal limit); negative J is excluded by convention
        if self.coupling_j < 0:
            raise ValidationError(f"coupling_j must be >= 0, got {self.coupling_j}")
        if self.temperature < 0:
            raise ValidationError(f"temperature must be >= 0, got {self.temperature}")

    @property
    def beta(self) -> float:
        if self.temperature == 0:
            return math.inf
        return 1.0 / self.temperature


@dataclass(frozen=True)
class BoseHubbardSpec:
    """Parameters of a finite Bose-Hubbard chain with per-site cutoff n_max.

    ``n_particles`` restricts the basis to one number sector; None keeps the
    full truncated Fock space.
    """

    n_sites: int
    coupling_j: float = 1.0
    onsite_u: float = 0.0
    n_max: int = 1
    boundary: str = "periodic"
    n_particles: Optional[int] = None

    def __post_init__(self) -> None:
        if not isinstance(self.n_sites, (int, np.integer)) or self.n_sites < 2:
            raise ValidationError(f"n_sites must be an int >= 2, got {self.n_sites!r}")
        if not isinstance(self.n_max, (int, np.integer)) or self.n_max < 1:
            raise ValidationError(f"n_max must be an int >= 1, got {self.n_max!r}")
        if self.boundary not in _BOUNDARIES:
            raise ValidationError(f"boundary must be one of {_BOUNDARIES}, got {self.boundary!r}")
        if self.coupling_j < 0:
            raise ValidationError(f"coupling_j must be >= 0, got {self.coupling_j}")
        if self.onsite_u < 0:
            raise ValidationError(f"onsite_u must be >= 0, got {self.onsite_u}")
        if self.n_particles is not None:
            if not 0 <= self.n_particles <= self.n_sites * self.n_max:
                raise ValidationError(
                    f"n_particles={self.n_particles} outside [0, {self.n_sites * self.n_max}]"
                )


@dataclass
class HamiltonianMatrix:
    """A dense Hamiltonian plus the basis labelling its rows/columns."""

    dimension: int
    entries: np.ndarray
    basis_labels: list[str] = field(repr=False)

    def __post_init__(self) -> None:
        self.entries = np.asarray(self.entries)
        if self.entries.shape != (self.dimension, self.dimension):
            raise ValidationError(
                f"entries shape {self.entries.shape} does not match dimension {self.dimension}"
            )
        if len(self.basis_labels) != self.dimension:
            raise ValidationError("basis_labels length does not match dimension")
        # Hermiticity guard; skipped above 2^13 where the temporary would
        # dominate memory (the builders in this module are Hermitian by
        # construction anyway).
        if self.dimension <= 2**13:
            drift = np.abs(self.entries - self.entries.conj().T).max()
            if drift > 1e-12:
                raise ValidationError(f"entries not Hermitian: max |H - H^dag| = {drift:.3e}")


@dataclass
class QuantumState:
    """Pure state (amplitudes) or mixed state (spectral decomposition).

    For ``kind='thermal'`` the state is ``sum_i p_i |v_i><v_i|`` with
    ``spectrum = (p, V)`` and eigenvectors in the columns of ``V``.  ``beta``
    records the inverse temperature when the state came from a Gibbs weight;
    reduced density matrices reuse the same container with ``beta=None``.
    """

    kind: str
    amplitudes: Optional[np.ndarray] = None
    spectrum: Optional[tuple[np.ndarray, np.ndarray]] = None
    beta: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind == "pure":
            if self.amplitudes is None:
                raise ValidationError("pure state needs amplitudes")
            self.amplitudes = np.asarray(self.amplitudes)
            nrm = np.linalg.norm(self.amplitudes)
            if not math.isclose(nrm, 1.0, rel_tol=0, abs_tol=1e-10):
                raise ValidationError(f"pure state not normalized: |psi| = {nrm!r}")
        elif self.kind == "thermal":
            if self.spectrum is None:
                raise ValidationError("thermal state needs a (probabilities, eigenvectors) pair")
            p, v = self.spectrum
            p = np.asarray(p, dtype=float)
            v = np.asarray(v)
            if p.min() < -1e-12:
                raise ValidationError(f"negative probability {p.min():.3e}")
            if abs(p.sum() - 1.0) > 1e-10:
                raise ValidationError(f"probabilities sum to {p.sum()!r}, not 1")
            if v.shape[1] != p.shape[0]:
                raise ValidationError("eigenvector count does not match probability count")
            self.spectrum = (np.clip(p, 0.0, None), v)
        else:
            raise ValidationError(f"kind must be 'pure' or 'thermal', got {self.kind!r}")

    @property
    def dimension(self) -> int:
        if self.kind == "pure":
            return self.amplitudes.shape[0]
        return self.spectrum[1].shape[0]


def _require_dense_size(n_sites: Optional[int]) -> int:
    if n_sites is None:
        raise ValidationError("dense builders need a finite n_sites (got None)")
    if n_sites > MAX_DENSE_SITES:
        raise ResourceLimitError(
            f"dense diagonalization capped at {MAX_DENSE_SITES} sites, got {n_sites};"
            " use the free-fermion solver"
        )
    return int(n_sites)


def _bonds(n: int, boundary: str) -> list[tuple[int, int]]:
    bonds = [(j, j + 1) for j in range(n - 1)]
    if boundary == "periodic":
        bonds.append((n - 1, 0))
    return bonds


def _spin_basis_labels(n: int) -> list[str]:
    return [format(b, f"0{n}b") for b in range(2**n)]


def _popcount(idx: np.ndarray, n_bits: int) -> np.ndarray:
    counts = np.zeros(idx.shape, dtype=np.int64)
    for s in range(n_bits):
        counts += (idx >> s) & 1
    return counts


def _build_spin(spec: SpinChainSpec, theta: float) -> HamiltonianMatrix:
    n = _require_dense_size(spec.n_sites)
    dim = 2**n
    j, mu = spec.coupling_j, spec.chem_potential
    complex_amp = -j * np.exp(1j * theta)
    real_case = abs(complex_amp.imag) < 1e-15
    h = np.zeros((dim, dim), dtype=np.float64 if real_case else np.complex128)

    idx = np.arange(dim, dtype=np.int64)
    # -mu * sum_j sigmaz_j with sigmaz = 1 - 2n
    h[idx, idx] = -mu * (n - 2 * _popcount(idx, n))

    for a, b in _bonds(n, spec.boundary):
        bit_a = np.int64(1) << (n - 1 - a)
        bit_b = np.int64(1) << (n - 1 - b)
        # source states with site a empty, site b occupied; hop b -> a picks
        # up e^{i theta} (phase convention: dispersion -2J cos(k + theta))
        src = idx[((idx & bit_a) == 0) & ((idx & bit_b) != 0)]
        dst = src ^ (bit_a | bit_b)
        if real_case:
            h[dst, src] += complex_amp.real
            h[src, dst] += complex_amp.real
        else:
            h[dst, src] += complex_amp
            h[src, dst] += complex_amp.conjugate()
    return HamiltonianMatrix(dimension=dim, entries=h, basis_labels=_spin_basis_labels(n))


def build_xx_hamiltonian(spec: SpinChainSpec) -> HamiltonianMatrix:
    """Dense untwisted XX Hamiltonian (any twist_per_bond in the spec is ignored)."""
    return _build_spin(spec, theta=0.0)


def build_twisted_hamiltonian(spec: SpinChainSpec) -> HamiltonianMatrix:
    """Dense XX Hamiltonian with the Peierls phase spec.twist_per_bond on every bond."""
    return _build_spin(spec, theta=float(spec.twist_per_bond))


def _bose_basis(spec: BoseHubbardSpec) -> list[tuple[int, ...]]:
    n, m = spec.n_sites, spec.n_max
    if (m + 1) ** n > 2_000_000:
        raise ResourceLimitError(
            f"Bose-Hubbard basis enumeration too large: (n_max+1)^n_sites = {(m + 1) ** n}"
        )
    occupations = np.stack(
        np.meshgrid(*([np.arange(m + 1)] * n), indexing="ij"), axis=-1
    ).reshape(-1, n)
    if spec.n_particles is not None:
        occupations = occupations[occupations.sum(axis=1) == spec.n_particles]
    return [tuple(int(x) for x in row) for row in occupations]


def build_bose_hubbard(spec: BoseHubbardSpec) -> HamiltonianMatrix:
    """Dense Bose-Hubbard Hamiltonian H = -J sum (b+_j b_l + h.c.) + (U/2) sum n(n-1).

    With n_max=1 the matrix is identical (same basis order) to the XX builder
    at mu=0, which is the hard-core equivalence the tests pin down.
    """
    basis = _bose_basis(spec)
    dim = len(basis)
    if dim > MAX_DENSE_DIM:
        raise ResourceLimitError(f"Bose-Hubbard dimension {dim} exceeds {MAX_DENSE_DIM}")
    index = {occ: i for i, occ in enumerate(basis)}
    j, u = spec.coupling_j, spec.onsite_u

    h = np.zeros((dim, dim))
    for i, occ in enumerate(basis):
        h[i, i] = 0.5 * u * sum(o * (o - 1) for o in occ)
        for a, b in _bonds(spec.n_sites, spec.boundary):
            # b+_a b_b moving one particle b -> a; h.c. covered by the (b, a)
            # visit of the same bond pair through the swapped roles below
            for src_site, dst_site in ((b, a), (a, b)):
                if occ[src_site] == 0 or occ[dst_site] == spec.n_max:
                    continue
                new = list(occ)
                new[src_site] -= 1
                new[dst_site] += 1
                amp = -j * math.sqrt(occ[src_site] * (occ[dst_site] + 1))
                h[index[tuple(new)], i] += amp

    sep = "" if spec.n_max <= 9 else ","
    labels = [sep.join(str(o) for o in occ) for occ in basis]
    return HamiltonianMatrix(dimension=dim, entries=h, basis_labels=labels)


def bose_hopping_matrix(spec: BoseHubbardSpec, site_a: int, site_b: int) -> np.ndarray:
    """Matrix of b+_a b_b in the same basis order as build_bose_hubbard.

    Returned as a plain array (it is not Hermitian on its own); feed it to
    `expectation` for one-body correlators.
    """
    n = spec.n_sites
    if not (0 <= site_a < n and 0 <= site_b < n) or site_a == site_b:
        raise ValidationError(f"need two distinct sites in [0, {n}), got {site_a}, {site_b}")
    basis = _bose_basis(spec)
    index = {occ: i for i, occ in enumerate(basis)}
    m = np.zeros((len(basis), len(basis)))
    for i, occ in enumerate(basis):
        if occ[site_b] == 0 or occ[site_a] == spec.n_max:
            continue
        new = list(occ)
        new[site_b] -= 1
        new[site_a] += 1
        m[index[tuple(new)], i] = math.sqrt(occ[site_b] * (occ[site_a] + 1))
    return m


def build_current_operator(spec: SpinChainSpec, operator_twist: Optional[float] = None) -> HamiltonianMatrix:
    """Bond-current operator J = -i sum_bonds (e^{i phi} b+_a b_b - h.c.), summed over bonds.

    phi defaults to spec.twist_per_bond, making the operator the gauge-covariant
    current dH/dtheta / J of the twisted Hamiltonian.
    """
    n = _require_dense_size(spec.n_sites)
    phi = float(spec.twist_per_bond if operator_twist is None else operator_twist)
    dim = 2**n
    amp = -1j * np.exp(1j * phi)
    h = np.zeros((dim, dim), dtype=np.complex128)
    idx = np.arange(dim, dtype=np.int64)
    for a, b in _bonds(n, spec.boundary):
        bit_a = np.int64(1) << (n - 1 - a)
        bit_b = np.int64(1) << (n - 1 - b)
        src = idx[((idx & bit_a) == 0) & ((idx & bit_b) != 0)]
        dst = src ^ (bit_a | bit_b)
        h[dst, src] += amp
        h[src, dst] += amp.conjugate()
    return HamiltonianMatrix(dimension=dim, entries=h, basis_labels=_spin_basis_labels(n))


def _eigh(h: HamiltonianMatrix) -> tuple[np.ndarray, np.ndarray]:
    m = h.entries
    if np.iscomplexobj(m) and np.abs(m.imag).max() < 1e-14:
        m = m.real
    return np.linalg.eigh(m)


def ground_state(h: HamiltonianMatrix) -> QuantumState:
    """Lowest eigenvector, phase-fixed so its largest component is real positive.

    With a degenerate ground level the returned vector is one arbitrary member
    of the eigenspace; observables that are not symmetric under the degeneracy
    should be computed from a thermal state or a symmetry-resolved solver.
    """
    energies, vectors = _eigh(h)
    psi = vectors[:, 0]
    k = np.argmax(np.abs(psi))
    phase = psi[k] / abs(psi[k])
    psi = psi / phase
    if not np.iscomplexobj(h.entries):
        psi = psi.real
    return QuantumState(kind="pure", amplitudes=psi / np.linalg.norm(psi))


def thermal_state(h: HamiltonianMatrix, beta: float) -> QuantumState:
    """Gibbs state exp(-beta H)/Z as a spectral decomposition."""
    if not isinstance(beta, (int, float, np.floating)) or not math.isfinite(beta) or beta < 0:
        raise ValidationError(f"beta must be a finite number >= 0, got {beta!r}")
    energies, vectors = _eigh(h)
    w = np.exp(-beta * (energies - energies[0]))  # shift: no overflow, Z >= 1
    p = w / w.sum()
    return QuantumState(kind="thermal", spectrum=(p, vectors), beta=float(beta))


def expectation(state: QuantumState, observable) -> float | complex:
    """<O> in the given state; returns float when the imaginary part is rounding-level."""
    o = observable.entries if isinstance(observable, HamiltonianMatrix) else np.asarray(observable)
    if o.shape != (state.dimension, state.dimension):
        raise ValidationError(
            f"observable shape {o.shape} does not match state dimension {state.dimension}"
        )
    if state.kind == "pure":
        psi = state.amplitudes
        val = np.vdot(psi, o @ psi)
    else:
        p, v = state.spectrum
        keep = p > 1e-300  # skip numerically dead weights; exact for the sum
        vk = v[:, keep]
        val = np.einsum("ij,ij,j->", vk.conj(), o @ vk, p[keep])
    if abs(val.imag) <= 1e-10 * max(1.0, abs(val.real)):
        return float(val.real)
    return complex(val)


def density_matrix(state: QuantumState) -> np.ndarray:
    """Dense density matrix of a (small) QuantumState."""
    if state.dimension > 2**MAX_REDUCED_SITES * 16:
        raise ResourceLimitError(f"refusing to materialize a {state.dimension}-dim density matrix")
    if state.kind == "pure":
        psi = state.amplitudes
        return np.outer(psi, psi.conj())
    p, v = state.spectrum
    return (v * p) @ v.conj().T


def reduced_density_matrix(
    state: QuantumState, sites: Sequence[int], local_dim: int = 2
) -> QuantumState:
    """Partial trace onto ``sites``, returned as a thermal-kind QuantumState.

    ``local_dim`` is the per-site dimension (2 for spins, n_max+1 for bosons);
    the total site count is inferred from the state dimension.
    """
    sites = list(sites)
    if len(sites) == 0:
        raise ValidationError("sites must be non-empty")
    if len(set(sites)) != len(sites):
        raise ValidationError(f"duplicate sites in {sites}")
    if len(sites) > MAX_REDUCED_SITES:
        raise ResourceLimitError(f"reduced density matrices capped at {MAX_REDUCED_SITES} sites")
    n = round(math.log(state.dimension, local_dim))
    if local_dim**n != state.dimension:
        raise ValidationError(
            f"state dimension {state.dimension} is not local_dim^n for local_dim={local_dim}"
        )
    if any(not 0 <= s < n for s in sites):
        raise ValidationError(f"sites {sites} out of range for {n} sites")

    keep = sites
    env = [s for s in range(n) if s not in keep]
    d_keep = local_dim ** len(keep)
    d_env = local_dim ** len(env)

    def fold(matrix_cols: np.ndarray) -> np.ndarray:
        # columns indexed by spectral label: reshape to per-site axes, pull the
        # kept sites to the front, flatten to (d_keep, d_env, n_cols)
        cols = matrix_cols.shape[1]
        t = matrix_cols.reshape([local_dim] * n + [cols])
        t = np.transpose(t, keep + env + [n])
        return t.reshape(d_keep, d_env, cols)

    if state.kind == "pure":
        m = fold(state.amplitudes[:, None])
        rho = np.einsum("aek,bek->ab", m, m.conj())
    else:
        p, v = state.spectrum
        live = p > 1e-300
        m = fold(v[:, live])
        rho = np.einsum("aek,k,bek->ab", m, p[live], m.conj())

    vals, vecs = np.linalg.eigh(rho)
    vals = np.clip(vals[::-1], 0.0, None)
    vecs = vecs[:, ::-1]
    return QuantumState(kind="thermal", spectrum=(vals / vals.sum(), vecs), beta=None)


# Single-site operators in the occupation basis (|0> = empty, sigmaz|0> = +|0>).
SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]])  # |1><0| = b+
SIGMA_MINUS = SIGMA_PLUS.T.copy()
SIGMA_X = SIGMA_PLUS + SIGMA_MINUS
SIGMA_Y = -1j * (SIGMA_PLUS - SIGMA_MINUS)  # [[0, i], [-i, 0]] in this index order
SIGMA_Z = np.diag([1.0, -1.0])


def pair_expectations(state: QuantumState, site_a: int, site_b: int) -> dict[str, float]:
    """<sigma^x_a sigma^x_b>, yy, zz, and <sigma+_a sigma-_b> from a two-site RDM."""
    rdm = reduced_density_matrix(state, [site_a, site_b])
    rho = density_matrix(rdm)
    out = {}
    for name, op_a, op_b in (
        ("xx", SIGMA_X, SIGMA_X),
        ("yy", SIGMA_Y, SIGMA_Y),
        ("zz", SIGMA_Z, SIGMA_Z),
        ("pm", SIGMA_PLUS, SIGMA_MINUS),
    ):
        val = np.trace(rho @ np.kron(op_a, op_b))
        out[name] = float(val.real) if abs(val.imag) < 1e-10 else complex(val)
    return out


def site_expectation(state: QuantumState, site: int, op: np.ndarray) -> float:
    rdm = reduced_density_matrix(state, [site])
    val = np.trace(density_matrix(rdm) @ op)
    return float(val.real)
