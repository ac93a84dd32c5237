"""Free-fermion solver for the XX chain via the Jordan-Wigner mapping.

The spin ring maps to fermions with a parity-dependent boundary condition:
states with even fermion number see antiperiodic momenta k = 2*pi*(m+1/2)/N,
odd states see periodic momenta k = 2*pi*m/N.  Single-particle energies are

    eps(k) = -2 J cos(k + theta) + 2 mu,     plus the constant -mu N,

with theta the Peierls phase per bond.

At T > 0 the spin partition function is a four-term sum of Gaussian traces,

    Z = 1/2 [ Tr_a e^{-bH} + Tr_a P e^{-bH} + Tr_p e^{-bH} - Tr_p P e^{-bH} ],

where P = (-1)^{N_f} and a/p label the two momentum grids.  Inserting P
flips the sign of every mode weight, so the four terms have per-mode weights
w_k = s * e^{-beta eps_k} with s = +-1.  Each term is Gaussian, Wick's theorem
holds per term with occupancies f_k = w_k / (1 + w_k), and any observable is
the trace-weighted combination of its per-term values.

Modes with w_k -> -1 (zero modes in the P-inserted terms) make single terms
singular while the physical combination stays finite.  Because the
unnormalized trace Tr[Gamma O] is affine in each mode weight separately, the
product (term trace) x (term expectation) is evaluated at surrogate weights
w in {0, -3} and interpolated multilinearly to the true weight, which is
exact and conditions the arithmetic well.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.linalg import toeplitz
from scipy.special import expit

from xxcrit import hilbert
from xxcrit.errors import NumericError, ValidationError
from xxcrit.hilbert import SpinChainSpec

# modes with |1 + w| below this go through the interpolation path; above it
# the direct evaluation keeps >= 10 significant digits
_ZERO_MODE_TOL = 1e-3
_SOLVERS = ("auto", "exactdiag", "freefermion")
# auto picks the brute-force engine up to this size; explicit requests may go
# a little further (hilbert.MAX_DENSE_SITES)
AUTO_EXACTDIAG_MAX = 12

_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-12, limit=400)


@dataclass
class CorrelatorSet:
    """Nearest-neighbour correlators plus the transverse decay profile."""

    xx_nn: float
    yy_nn: float
    zz_nn: float
    z_single: float
    transverse_profile: list[tuple[int, float]] = field(default_factory=list)
    source: str = "freefermion"
    temperature: float = 0.0
    mu_over_j: float = 0.0


def resolve_solver(spec: SpinChainSpec, solver: str = "auto") -> str:
    """Map an engine request onto what the spec can actually be solved with."""
    if solver not in _SOLVERS:
        raise ValidationError(f"solver must be one of {_SOLVERS}, got {solver!r}")
    if solver == "auto":
        if spec.n_sites is None:
            return "freefermion"
        if spec.boundary == "open" or spec.n_sites <= AUTO_EXACTDIAG_MAX:
            return "exactdiag"
        return "freefermion"
    if solver == "exactdiag":
        if spec.n_sites is None:
            raise ValidationError("exactdiag needs a finite n_sites")
        if spec.n_sites > hilbert.MAX_DENSE_SITES:
            raise ValidationError(
                f"exactdiag capped at {hilbert.MAX_DENSE_SITES} sites, got {spec.n_sites}"
            )
        return solver
    if spec.n_sites is not None and spec.boundary == "open":
        raise ValidationError(
            "the freefermion solver covers rings and the thermodynamic limit;"
            " use exactdiag for open chains"
        )
    return solver


def dispersion(k, spec: SpinChainSpec):
    """Single-particle energy eps(k) = -2J cos(k + theta) + 2 mu."""
    k = np.asarray(k, dtype=float)
    out = -2.0 * spec.coupling_j * np.cos(k + spec.twist_per_bond) + 2.0 * spec.chem_potential
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# finite rings


def _ring_momenta(n: int, sector: str) -> np.ndarray:
    m = np.arange(n, dtype=float)
    if sector == "periodic":
        return 2.0 * math.pi * m / n
    return 2.0 * math.pi * (m + 0.5) / n


def _fix_parity(eps: np.ndarray, occ: np.ndarray, need_odd: bool) -> np.ndarray:
    """Flip the cheapest mode so that the occupation parity matches the sector."""
    if (occ.sum() % 2 == 1) == need_odd:
        return occ
    occ = occ.copy()
    add_candidates = np.where(~occ)[0]
    rem_candidates = np.where(occ)[0]
    add_cost = eps[add_candidates].min() if add_candidates.size else math.inf
    rem_cost = -eps[rem_candidates].max() if rem_candidates.size else math.inf
    if add_cost <= rem_cost:
        occ[add_candidates[np.argmin(eps[add_candidates])]] = True
    else:
        occ[rem_candidates[np.argmax(eps[rem_candidates])]] = False
    return occ


def _ground_sector(spec: SpinChainSpec, theta: float) -> tuple[np.ndarray, np.ndarray, float]:
    """Momenta, occupations and total energy of the spin ground state.

    Each parity sector fills its negative-energy modes, then repairs the
    parity constraint with the cheapest single-mode flip; the lower-energy
    sector wins.  An exact tie (degenerate ground state, e.g. odd N at mu=0)
    resolves to the antiperiodic sector deterministically.
    """
    n = spec.n_sites
    best = None
    for sector, need_odd in (("antiperiodic", False), ("periodic", True)):
        k = _ring_momenta(n, sector)
        eps = dispersion(k, spec) if theta is None else (
            -2.0 * spec.coupling_j * np.cos(k + theta) + 2.0 * spec.chem_potential
        )
        occ = eps < -1e-12
        occ = _fix_parity(eps, occ, need_odd)
        energy = eps[occ].sum() - spec.chem_potential * n
        if best is None or energy < best[2] - 1e-12:
            best = (k, occ, energy)
    return best


def ground_energy(spec: SpinChainSpec, theta: Optional[float] = None) -> float:
    """Ground-state energy of a finite ring (theta overrides spec.twist_per_bond)."""
    if spec.n_sites is None:
        raise ValidationError("ground_energy is for finite rings")
    th = spec.twist_per_bond if theta is None else theta
    return float(_ground_sector(spec, th)[2])


# --- parity-projected thermal machinery


@dataclass
class _GaussTerm:
    coeff: float          # +-1/2 in the four-term projector sum
    k: np.ndarray
    sign: int             # s: weight w_k = s * e^{x_k}
    x: np.ndarray         # x = -beta * eps


def _thermal_terms(spec: SpinChainSpec, theta: float, beta: float) -> list[_GaussTerm]:
    terms = []
    for sector, sign_p in (("antiperiodic", +1.0), ("periodic", -1.0)):
        k = _ring_momenta(spec.n_sites, sector)
        eps = -2.0 * spec.coupling_j * np.cos(k + theta) + 2.0 * spec.chem_potential
        x = -beta * eps
        terms.append(_GaussTerm(coeff=0.5, k=k, sign=+1, x=x))
        terms.append(_GaussTerm(coeff=0.5 * sign_p, k=k, sign=-1, x=x))
    return terms


def _log_one_plus_w(sign: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """log|1 + s e^x| and its sign, stable for any x."""
    if sign > 0:
        return np.logaddexp(0.0, x), np.ones_like(x)
    # s = -1: 1 - e^x
    with np.errstate(divide="ignore", invalid="ignore"):
        neg = np.log(-np.expm1(np.minimum(x, 0.0)))          # x < 0 branch
        pos = x + np.log(-np.expm1(-np.maximum(x, 0.0)))     # x > 0 branch
    out = np.where(x < 0, neg, pos)
    out = np.where(x == 0, -np.inf, out)
    return out, np.where(x > 0, -1.0, 1.0)


def _occupancy(sign: int, x: np.ndarray) -> np.ndarray:
    """f = w/(1+w) for w = s e^x; caller keeps |1+w| away from 0."""
    if sign > 0:
        return expit(x)
    return -1.0 / np.expm1(-x)


def _zero_classes(k: np.ndarray, z_idx: np.ndarray) -> list[tuple[int, ...]]:
    """Group zero modes into k <-> -k symmetry classes.

    Surrogate weights are assigned per class so every corner state keeps
    f(k) = f(-k); that keeps g(d) real and the string determinants valid.
    Self-conjugate momenta (k = 0 or pi) form singleton classes.
    """
    two_pi = 2.0 * math.pi
    classes: list[tuple[int, ...]] = []
    used: set[int] = set()
    for i in z_idx:
        if i in used:
            continue
        used.add(int(i))
        partner = None
        for j in z_idx:
            if int(j) in used:
                continue
            s = (k[i] + k[j]) % two_pi
            if min(s, two_pi - s) < 1e-9:
                partner = int(j)
                break
        if partner is None:
            classes.append((int(i),))
        else:
            used.add(partner)
            classes.append((int(i), partner))
    return classes


# Lagrange nodes per class size; the trace-times-expectation product is
# affine in each mode weight, hence degree len(class) in a shared weight.
_NODES = {1: (0.0, -3.0), 2: (0.0, -3.0, 3.0)}


def _lagrange_weights(nodes: tuple[float, ...], w: float) -> list[float]:
    out = []
    for i, vi in enumerate(nodes):
        lam = 1.0
        for j, vj in enumerate(nodes):
            if j != i:
                lam *= (w - vj) / (vi - vj)
        out.append(lam)
    return out


def _term_contribution(
    term: _GaussTerm, fns: dict[str, Callable[[np.ndarray, np.ndarray], float]]
) -> tuple[float, float, float, dict[str, float]]:
    """(log|T_base|, sign_base, R_true, Q) for one Gaussian term.

    T_base collects the well-conditioned mode factors (1 + w); R_true is the
    product over near-singular modes of their true tiny (1 + w); Q is the
    polynomial interpolation, over surrogate class weights, of
    [prod_z (1 + w_z)] * V(f): the term's unnormalized contribution to <O>
    is sign * e^{log T_base} * Q and to Z is sign * e^{log T_base} * R_true.
    """
    logs, signs = _log_one_plus_w(term.sign, term.x)
    if term.sign < 0:
        zmask = np.abs(np.expm1(np.minimum(term.x, 1.0))) < _ZERO_MODE_TOL
    else:
        zmask = np.zeros_like(term.x, dtype=bool)
    good = ~zmask
    log_base = float(logs[good].sum())
    sign_base = float(np.prod(signs[good])) if good.any() else 1.0

    f = np.zeros_like(term.x)
    f[good] = _occupancy(term.sign, term.x[good])

    z_idx = np.where(zmask)[0]
    if z_idx.size == 0:
        return log_base, sign_base, 1.0, {name: fn(term.k, f) for name, fn in fns.items()}

    r_true = float(np.prod(-np.expm1(term.x[z_idx])))
    classes = _zero_classes(term.k, z_idx)
    class_w = [float(np.mean(-np.exp(term.x[list(c)]))) for c in classes]  # ~ -1
    class_nodes = [_NODES[len(c)] for c in classes]
    class_lams = [_lagrange_weights(nodes, w) for nodes, w in zip(class_nodes, class_w)]

    q = {name: 0.0 for name in fns}
    for pick in itertools.product(*(range(len(n)) for n in class_nodes)):
        factor, weight = 1.0, 1.0
        for c, nodes, lams, p in zip(classes, class_nodes, class_lams, pick):
            v = nodes[p]
            f[list(c)] = v / (1.0 + v)
            factor *= (1.0 + v) ** len(c)
            weight *= lams[p]
        for name, fn in fns.items():
            q[name] += weight * factor * fn(term.k, f)
    f[z_idx] = 0.0
    return log_base, sign_base, r_true, q


def _ring_thermal_expectations(
    spec: SpinChainSpec,
    theta: float,
    beta: float,
    fns: dict[str, Callable[[np.ndarray, np.ndarray], float]],
) -> tuple[dict[str, float], float]:
    """Parity-projected thermal expectations on a ring; also returns ln Z_spin."""
    contribs = [
        (t.coeff, *_term_contribution(t, fns)) for t in _thermal_terms(spec, theta, beta)
    ]
    log_star = max(c[1] for c in contribs)
    den = 0.0
    num = {name: 0.0 for name in fns}
    for coeff, log_base, sign_base, r_true, q in contribs:
        scale = coeff * sign_base * math.exp(log_base - log_star)
        den += scale * r_true
        for name in fns:
            num[name] += scale * q[name]
    if den <= 0:
        raise NumericError(f"non-positive projected partition function: {den!r}")
    log_z = log_star + math.log(den) + beta * spec.chem_potential * spec.n_sites
    return {name: num[name] / den for name in num}, log_z


def free_energy(spec: SpinChainSpec, theta: Optional[float] = None) -> float:
    """F = -T ln Z of a finite ring; equals the ground energy at T = 0."""
    if spec.n_sites is None:
        raise ValidationError("free_energy is for finite rings")
    th = spec.twist_per_bond if theta is None else theta
    if spec.temperature == 0:
        return ground_energy(spec, th)
    beta = 1.0 / spec.temperature
    _, log_z = _ring_thermal_expectations(spec, th, beta, {})
    return -log_z / beta


# ---------------------------------------------------------------------------
# observable evaluators (per Gaussian term / per pure filling)


def _g_profile(k: np.ndarray, f: np.ndarray, d_max: int) -> np.ndarray:
    """g(d) = <c+_l c_{l+d}> = (1/N) sum_k e^{ikd} f_k for d = 0..d_max."""
    d = np.arange(d_max + 1)
    return (np.exp(1j * np.outer(d, k)) @ f) / k.size


def string_correlators(g: np.ndarray, r_max: int) -> np.ndarray:
    """<sigma^x_0 sigma^x_r> for r = 1..r_max from real g(d), d = 0..r_max.

    Toeplitz determinant of gt(d) = 2 g(d) - delta_{d,0}; valid for real
    hopping (no twist), where <A_l A_m> = <B_l B_m>* = +-delta_{lm}.
    """
    gt = 2.0 * np.asarray(g, dtype=float)
    gt[0] -= 1.0
    out = np.empty(r_max)
    for r in range(1, r_max + 1):
        col = gt[np.abs(1 - np.arange(r))]
        row = gt[1 : r + 1]
        out[r - 1] = np.linalg.det(toeplitz(col, row))
    return out


def _observable_fns(r_max: int, theta_op: Optional[float] = None) -> dict[str, Callable]:
    """Per-term Wick evaluators; every value is aggregated across terms as-is.

    Nonlinear combinations (zz, string determinants) must be formed inside
    each Gaussian term, never from term-averaged g's.
    """

    def z_single(k, f):
        return 1.0 - 2.0 * float(np.mean(f))

    def xx(k, f):
        g1 = np.mean(np.exp(1j * k) * f)
        return 2.0 * float(g1.real)

    def zz(k, f):
        g0 = float(np.mean(f))
        g1 = np.mean(np.exp(1j * k) * f)
        return (1.0 - 2.0 * g0) ** 2 - 4.0 * float(abs(g1) ** 2)

    fns: dict[str, Callable] = {"z_single": z_single, "xx": xx, "zz": zz}

    if r_max >= 1:
        def strings(k, f, _r=r_max):
            g = _g_profile(k, f, _r)
            if np.abs(g.imag).max() > 1e-10:
                raise NumericError("string determinants need real g (untwisted chain)")
            return string_correlators(g.real, _r)

        for r in range(1, r_max + 1):
            fns[f"string_{r}"] = (lambda k, f, _r=r, _s=strings: float(_s(k, f)[_r - 1]))

    if theta_op is not None:
        def current(k, f, _t=theta_op):
            return float(np.sum(2.0 * np.sin(k + _t) * f))

        fns["current"] = current
    return fns


def _ring_expectations(
    spec: SpinChainSpec, theta: float, fns: dict[str, Callable]
) -> dict[str, float]:
    """Dispatch ground-state vs parity-projected thermal evaluation."""
    if spec.temperature == 0:
        k, occ, _ = _ground_sector(spec, theta)
        f = occ.astype(float)
        return {name: fn(k, f) for name, fn in fns.items()}
    vals, _ = _ring_thermal_expectations(spec, theta, 1.0 / spec.temperature, fns)
    return vals


# ---------------------------------------------------------------------------
# thermodynamic limit


def _thermo_g(d: int, mu_over_j: float, t_over_j: float) -> float:
    """g(d) in the thermodynamic limit (untwisted)."""
    if t_over_j == 0:
        kf = math.acos(min(1.0, max(-1.0, mu_over_j)))
        if d == 0:
            return kf / math.pi
        return math.sin(kf * d) / (math.pi * d)
    two_beta = 2.0 / t_over_j

    def fermi(k):
        return expit(two_beta * (math.cos(k) - mu_over_j))

    if d == 0:
        val, _ = quad(fermi, 0.0, math.pi, **_QUAD_OPTS)
    else:
        val, _ = quad(fermi, 0.0, math.pi, weight="cos", wvar=d, **_QUAD_OPTS)
    return val / math.pi


def magnetization(mu_over_j: float, temperature: float) -> float:
    """Thermodynamic <sigma_z> = 1 - 2 rho; exactly +-1 once |mu| >= J at T = 0."""
    if temperature < 0:
        raise ValidationError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0:
        if mu_over_j >= 1.0:
            return 1.0
        if mu_over_j <= -1.0:
            return -1.0
    return 1.0 - 2.0 * _thermo_g(0, mu_over_j, temperature)


def fermion_correlation_matrix(spec: SpinChainSpec, r_max: int) -> np.ndarray:
    """(r_max+1) x (r_max+1) matrix G_lm = <c+_l c_m>.

    Hermitian Toeplitz; real symmetric without a twist.  On finite rings at
    T > 0 the entries are the parity-projected thermal fermion correlators.
    """
    if not isinstance(r_max, (int, np.integer)) or r_max < 0:
        raise ValidationError(f"r_max must be an int >= 0, got {r_max!r}")
    if r_max > 4096:
        raise ValidationError(f"r_max = {r_max} is unreasonably large")
    theta = spec.twist_per_bond
    if spec.n_sites is None:
        g0 = np.array(
            [_thermo_g(d, spec.chem_potential / spec.coupling_j,
                       spec.temperature / spec.coupling_j)
             for d in range(r_max + 1)]
        )
        g = g0 * np.exp(-1j * theta * np.arange(r_max + 1)) if theta != 0 else g0
    else:
        if r_max >= spec.n_sites:
            raise ValidationError(f"r_max = {r_max} must be < n_sites = {spec.n_sites}")
        if spec.coupling_j == 0:
            raise ValidationError("free-fermion solver needs coupling_j > 0")
        fns = {f"g_{d}": (lambda k, f, _d=d: complex(np.mean(np.exp(1j * k * _d) * f)))
               for d in range(r_max + 1)}
        vals = _ring_expectations(spec, theta, fns)
        g = np.array([vals[f"g_{d}"] for d in range(r_max + 1)])
    mat = toeplitz(np.conj(g), g)
    if np.abs(mat.imag).max() < 1e-14:
        mat = mat.real.copy()
    return mat


def _ed_correlators(spec: SpinChainSpec, r_max: int) -> CorrelatorSet:
    """Brute-force path: same observables from the dense engine."""
    h = hilbert.build_twisted_hamiltonian(spec)
    if spec.temperature == 0:
        state = hilbert.ground_state(h)
    else:
        state = hilbert.thermal_state(h, 1.0 / spec.temperature)
    pair = hilbert.pair_expectations(state, 0, 1 % spec.n_sites)
    profile = []
    for r in range(1, r_max + 1):
        rdm = hilbert.reduced_density_matrix(state, [0, r])
        rho = hilbert.density_matrix(rdm)
        val = np.trace(rho @ np.kron(hilbert.SIGMA_X, hilbert.SIGMA_X))
        profile.append((r, float(val.real)))
    j = spec.coupling_j

    def _yy(state):
        vals = hilbert.pair_expectations(state, 0, 1 % spec.n_sites)
        return vals["yy"]

    return CorrelatorSet(
        xx_nn=pair["xx"],
        yy_nn=pair["yy"],
        zz_nn=pair["zz"],
        z_single=hilbert.site_expectation(state, 0, hilbert.SIGMA_Z),
        transverse_profile=profile,
        source="exactdiag",
        temperature=spec.temperature,
        mu_over_j=spec.chem_potential / j if j != 0 else math.inf,
    )


def nn_correlators(
    spec: SpinChainSpec, solver: str = "auto", r_max: Optional[int] = None
) -> CorrelatorSet:
    """CorrelatorSet for the spec, from either engine.

    r_max defaults to n_sites//2 on finite systems (max separation on the
    ring) and 8 in the thermodynamic limit.
    """
    if spec.coupling_j == 0:
        raise ValidationError("correlators need coupling_j > 0 (mu/J undefined otherwise)")
    engine = resolve_solver(spec, solver)
    if r_max is None:
        r_max = 8 if spec.n_sites is None else spec.n_sites // 2
    if spec.n_sites is not None and not 1 <= r_max <= spec.n_sites - 1:
        raise ValidationError(f"r_max = {r_max} outside [1, n_sites-1]")

    if engine == "exactdiag":
        return _ed_correlators(spec, r_max)

    mu_over_j = spec.chem_potential / spec.coupling_j
    if spec.twist_per_bond != 0:
        raise ValidationError("string correlators are defined for untwisted chains")
    if spec.n_sites is None:
        t_over_j = spec.temperature / spec.coupling_j
        g = np.array([_thermo_g(d, mu_over_j, t_over_j) for d in range(r_max + 1)])
        strings = string_correlators(g, r_max)
        xx = 2.0 * g[1]
        zz = (1.0 - 2.0 * g[0]) ** 2 - 4.0 * g[1] ** 2
        z1 = 1.0 - 2.0 * g[0]
    else:
        fns = _observable_fns(r_max)
        vals = _ring_expectations(spec, 0.0, fns)
        strings = [vals[f"string_{r}"] for r in range(1, r_max + 1)]
        xx, zz, z1 = vals["xx"], vals["zz"], vals["z_single"]

    return CorrelatorSet(
        xx_nn=float(xx),
        yy_nn=float(xx),  # U(1) symmetry: <xx> = <yy> bond by bond
        zz_nn=float(zz),
        z_single=float(z1),
        transverse_profile=[(r, float(v)) for r, v in zip(range(1, r_max + 1), strings)],
        source="freefermion",
        temperature=spec.temperature,
        mu_over_j=mu_over_j,
    )


def transverse_correlator(r: int, spec: SpinChainSpec) -> float:
    """<sigma^x_0 sigma^x_r> from the free-fermion string determinant."""
    if not isinstance(r, (int, np.integer)) or r < 1:
        raise ValidationError(f"r must be an int >= 1, got {r!r}")
    if spec.n_sites is not None and r >= spec.n_sites:
        raise ValidationError(f"r = {r} must be < n_sites = {spec.n_sites}")
    if r > 512:
        raise ValidationError(f"r = {r} beyond the supported window (512)")
    resolve_solver(spec, "freefermion")  # rejects open chains
    return nn_correlators(spec, solver="freefermion", r_max=r).transverse_profile[-1][1]


def equilibrium_current(spec: SpinChainSpec, operator_twist: Optional[float] = None) -> float:
    """<J_op> with J_op = -i sum_j (e^{i phi} b+_j b_{j+1} - h.c.), phi = operator_twist.

    operator_twist defaults to spec.twist_per_bond (gauge-covariant current,
    equal to dE/dtheta / J).  In the thermodynamic limit the equilibrium
    current vanishes by k -> -k symmetry and 0.0 is returned exactly.
    """
    phi = spec.twist_per_bond if operator_twist is None else float(operator_twist)
    if spec.n_sites is None:
        if spec.twist_per_bond != 0:
            raise ValidationError("twisted thermodynamic-limit current is not defined here")
        return 0.0
    fns = _observable_fns(0, theta_op=phi)
    return float(_ring_expectations(spec, spec.twist_per_bond, fns)["current"])
