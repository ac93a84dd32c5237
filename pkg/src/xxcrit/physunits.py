"""SI-units layer: lab parameters in, lattice energy scales and checks out.

Constants are CODATA 2018 values, hard-coded so results never drift with a
library upgrade:

    h    = 6.62607015e-34 J s      (exact, SI definition)
    k_B  = 1.380649e-23 J/K        (exact, SI definition)
    hbar = 1.054571817e-34 J s     (CODATA 2018 abridged h/2pi)
    u    = 1.66053906660e-27 kg    (CODATA 2018 atomic mass constant)

The mapping onto chain units is J = hbar^2 / (2 m a^2) with a the healing
length playing the role of the lattice spacing.  The thermal de Broglie
wavelength uses the standard convention lambda_T = h / sqrt(2 pi m k_B T);
the identity h^2 / (2 m lambda_T^2) = pi k_B T is used as a cross-check and
as the continuum thermal-energy proxy.

`experiment_report` evaluates three inequalities and reports both sides of
each; verdicts are whatever the arithmetic yields ("fired", "not_fired", or
"not_evaluable" when an input is missing), never assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from xxcrit.entanglement import WitnessReport
from xxcrit.errors import ValidationError

PLANCK_H = 6.62607015e-34        # J s, exact (SI)
HBAR = 1.054571817e-34           # J s, CODATA 2018
BOLTZMANN_KB = 1.380649e-23      # J/K, exact (SI)
ATOMIC_MASS_KG = 1.66053906660e-27  # kg, CODATA 2018

CONSTANTS_USED = {
    "h_j_s": PLANCK_H,
    "hbar_j_s": HBAR,
    "k_b_j_per_k": BOLTZMANN_KB,
    "atomic_mass_kg": ATOMIC_MASS_KG,
}

VERDICTS = ("fired", "not_fired", "not_evaluable")


def mass_from_amu(amu: float) -> float:
    """Mass in kg from atomic mass units."""
    amu = float(amu)
    if not (math.isfinite(amu) and amu > 0):
        raise ValidationError(f"amu must be positive, got {amu!r}")
    return amu * ATOMIC_MASS_KG


@dataclass(frozen=True)
class HoppingEnergy:
    joules: float
    hertz: float          # joules / h
    rad_per_s: float      # joules / hbar


@dataclass(frozen=True)
class PhysicalParams:
    """Experimental inputs.  Masses in kg (see mass_from_amu), lengths in m.

    healing_length_m may be omitted when density and scattering_length_m are
    both given; it is then derived as 1/sqrt(rho s).  mean_energy_j is an
    optional measured energy per particle for the continuum energy check.
    """

    mass_kg: float
    temperature_k: float
    mu_frequency_hz: float
    healing_length_m: Optional[float] = None
    density: Optional[float] = None
    scattering_length_m: Optional[float] = None
    mean_energy_j: Optional[float] = None
    healing_dimensionality: str = "3d"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mass_kg) and self.mass_kg > 0):
            raise ValidationError(f"mass_kg must be positive, got {self.mass_kg!r}")
        if not (math.isfinite(self.temperature_k) and self.temperature_k >= 0):
            raise ValidationError(f"temperature_k must be >= 0, got {self.temperature_k!r}")
        if not (math.isfinite(self.mu_frequency_hz) and self.mu_frequency_hz > 0):
            raise ValidationError(f"mu_frequency_hz must be positive, got {self.mu_frequency_hz!r}")
        for name in ("healing_length_m", "density", "scattering_length_m", "mean_energy_j"):
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and v > 0):
                raise ValidationError(f"{name} must be positive when given, got {v!r}")
        if self.healing_dimensionality not in ("2d", "3d"):
            raise ValidationError(
                f"healing_dimensionality must be '2d' or '3d', got {self.healing_dimensionality!r}"
            )

    def effective_healing_length(self) -> Optional[float]:
        if self.healing_length_m is not None:
            return self.healing_length_m
        if self.density is not None and self.scattering_length_m is not None:
            return healing_length(self.density, self.scattering_length_m,
                                  self.healing_dimensionality)
        return None


@dataclass(frozen=True)
class CheckResult:
    name: str
    inequality: str
    left: float
    right: float
    verdict: str
    note: str = ""

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise ValidationError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")


@dataclass(frozen=True)
class ExperimentReport:
    j_energy: HoppingEnergy
    thermal_wavelength_m: Optional[float]
    healing_length_echo_m: float
    checks: list[CheckResult]
    frequencies_hz: dict[str, float]
    constants_used: dict[str, float]
    reference_comparison: Optional[dict[str, float]] = None


def hopping_from_physical(mass_kg: float, spacing_m: float) -> HoppingEnergy:
    """Effective hopping J = hbar^2 / (2 m a^2) for a continuum gas on scale a."""
    if not (math.isfinite(mass_kg) and mass_kg > 0):
        raise ValidationError(f"mass_kg must be positive, got {mass_kg!r}")
    if not (math.isfinite(spacing_m) and spacing_m > 0):
        raise ValidationError(f"spacing_m must be positive, got {spacing_m!r}")
    joules = HBAR**2 / (2.0 * mass_kg * spacing_m**2)
    return HoppingEnergy(joules=joules, hertz=joules / PLANCK_H, rad_per_s=joules / HBAR)


def thermal_wavelength(mass_kg: float, temperature_k: float) -> float:
    """lambda_T = h / sqrt(2 pi m k_B T)."""
    if not (math.isfinite(mass_kg) and mass_kg > 0):
        raise ValidationError(f"mass_kg must be positive, got {mass_kg!r}")
    if not (math.isfinite(temperature_k) and temperature_k > 0):
        raise ValidationError(f"temperature_k must be > 0, got {temperature_k!r}")
    return PLANCK_H / math.sqrt(2.0 * math.pi * mass_kg * BOLTZMANN_KB * temperature_k)


def healing_length(density: float, scattering_m: float, dimensionality: str = "3d") -> float:
    """a = 1/sqrt(rho s).

    Dimensionally consistent for a 3D density (1/m^3) times a scattering
    length (m); areal densities (1/m^2) are accepted behind the '2d' flag and
    evaluated with the same formula at face value, which is how lab sheets
    quoting rho*s as an inverse area are normally read.
    """
    if dimensionality not in ("2d", "3d"):
        raise ValidationError(f"dimensionality must be '2d' or '3d', got {dimensionality!r}")
    if not (math.isfinite(density) and density > 0):
        raise ValidationError(f"density must be positive, got {density!r}")
    if not (math.isfinite(scattering_m) and scattering_m > 0):
        raise ValidationError(f"scattering_m must be positive, got {scattering_m!r}")
    return 1.0 / math.sqrt(density * scattering_m)


def witness_continuum_energy(mean_energy_j: float, mass_kg: float, spacing_m: float) -> WitnessReport:
    """Energy witness <H> < h^2 / (2 m a^2) for the continuum gas."""
    if not math.isfinite(mean_energy_j):
        raise ValidationError(f"mean_energy_j must be finite, got {mean_energy_j!r}")
    threshold = PLANCK_H**2 / (2.0 * mass_kg * spacing_m**2)
    return WitnessReport(
        witness_name="continuum_energy",
        fired=bool(mean_energy_j < threshold),
        margin=float(threshold - mean_energy_j),
        inputs_echo={
            "mean_energy_j": float(mean_energy_j),
            "mass_kg": float(mass_kg),
            "spacing_m": float(spacing_m),
            "threshold_j": threshold,
        },
        caveat="threshold uses h (not hbar); it sits (2 pi)^2 above the hopping scale J",
    )


def experiment_report(
    params: PhysicalParams, reference_thermal_wavelength: Optional[float] = None
) -> ExperimentReport:
    """Evaluate the three entanglement checks on lab numbers, reporting both sides.

    Checks: mu^2 + (k_B T)^2 < J^2 (energy units squared), lambda_T > a, and
    <H> < h^2/(2 m a^2).  A missing input marks its check "not_evaluable"
    instead of guessing; the continuum check reports its threshold either way
    and notes the proxy identity h^2/(2 m lambda_T^2) = pi k_B T.
    """
    a = params.effective_healing_length()
    if a is None:
        raise ValidationError(
            "need healing_length_m, or density plus scattering_length_m, to set the scale"
        )
    j = hopping_from_physical(params.mass_kg, a)
    mu_j = params.mu_frequency_hz * PLANCK_H
    kt_j = BOLTZMANN_KB * params.temperature_k
    lam = (
        thermal_wavelength(params.mass_kg, params.temperature_k)
        if params.temperature_k > 0
        else None
    )

    checks: list[CheckResult] = []

    disc_left = mu_j**2 + kt_j**2
    disc_right = j.joules**2
    disc_fired = disc_left < disc_right
    note = ""
    if mu_j > j.joules:
        note = (
            "chemical potential alone exceeds the hopping scale for these inputs,"
            " so the inequality cannot hold; reported as computed"
        )
    checks.append(
        CheckResult(
            name="mu_T_disc",
            inequality="mu^2 + (k_B T)^2 < J^2",
            left=disc_left,
            right=disc_right,
            verdict="fired" if disc_fired else "not_fired",
            note=note,
        )
    )

    if lam is None:
        checks.append(
            CheckResult(
                name="thermal_wavelength",
                inequality="lambda_T > a",
                left=float("nan"),
                right=a,
                verdict="not_evaluable",
                note="temperature is zero; lambda_T diverges and the check is degenerate",
            )
        )
    else:
        checks.append(
            CheckResult(
                name="thermal_wavelength",
                inequality="lambda_T > a",
                left=lam,
                right=a,
                verdict="fired" if lam > a else "not_fired",
            )
        )

    threshold = PLANCK_H**2 / (2.0 * params.mass_kg * a**2)
    proxy = math.pi * kt_j  # == h^2 / (2 m lambda_T^2)
    if params.mean_energy_j is None:
        checks.append(
            CheckResult(
                name="continuum_energy",
                inequality="<H> < h^2/(2 m a^2)",
                left=float("nan"),
                right=threshold,
                verdict="not_evaluable",
                note=f"no measured mean energy supplied; thermal proxy pi k_B T = {proxy:.4e} J",
            )
        )
    else:
        w = witness_continuum_energy(params.mean_energy_j, params.mass_kg, a)
        checks.append(
            CheckResult(
                name="continuum_energy",
                inequality="<H> < h^2/(2 m a^2)",
                left=params.mean_energy_j,
                right=threshold,
                verdict="fired" if w.fired else "not_fired",
            )
        )

    reference = None
    if reference_thermal_wavelength is not None:
        if not (math.isfinite(reference_thermal_wavelength) and reference_thermal_wavelength > 0):
            raise ValidationError(
                f"reference_thermal_wavelength must be positive, got {reference_thermal_wavelength!r}"
            )
        reference = {
            "computed_m": lam if lam is not None else float("nan"),
            "reference_m": float(reference_thermal_wavelength),
            "ratio": (lam / reference_thermal_wavelength) if lam is not None else float("nan"),
        }

    return ExperimentReport(
        j_energy=j,
        thermal_wavelength_m=lam,
        healing_length_echo_m=a,
        checks=checks,
        frequencies_hz={
            "j_over_h": j.hertz,
            "mu_over_h": params.mu_frequency_hz,
            "kt_over_h": kt_j / PLANCK_H,
        },
        constants_used=dict(CONSTANTS_USED),
        reference_comparison=reference,
    )
