"""Analytic sensitivity expressions for the loop-amplifier interferometer.

These are the closed forms the numeric track is checked against. Each is
implemented literally, with no convention repair; the sensitivity engine owns
the single calibration constant that reconciles the two tracks. All phases
are radians, gains are dimensionless amplifier gain parameters, alpha2 is the
seed power |alpha|^2, and tl2/td2 are amplitude-squared transmissions (so a
30% power loss round trip means tl2 = sqrt(0.7)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

FORMULA_IDS = (
    "dd_exact",
    "dd_small_phase",
    "seed_threshold",
    "snl",
    "ph_exact",
    "ph_ratio_min",
    "ph_ratio_min_large_g",
    "loss_scaling",
    "detector_scaling",
    "nondeg_dd_limit",
)


@dataclass(frozen=True)
class ClosedFormResult:
    """A closed-form evaluation with provenance of its inputs."""

    value: float
    formula_id: str
    inputs: dict

    def __post_init__(self):
        if self.formula_id not in FORMULA_IDS:
            raise ValueError(f"unknown formula_id {self.formula_id!r}")
        if not (math.isfinite(self.value) and self.value > 0.0):
            raise ValueError(
                f"closed-form value must be finite and positive, got {self.value}"
            )


def _check_gain(g: float, name: str = "g") -> float:
    if not (math.isfinite(g) and g >= 0.0):
        raise ValueError(f"{name} must be finite and >= 0, got {g}")
    return float(g)


def dd_sensitivity_exact(g: float, alpha2: float, phi: float) -> float:
    """Direct-detection phase variance of the seeded loop, exact in phi.

    Valid on phi in (0, pi/2), where both tan and cot are finite and nonzero;
    the endpoints are singular and rejected. Requires a nonzero seed since
    direct detection of an unseeded dark port carries no first-order signal.
    """
    g = _check_gain(g)
    if not (math.isfinite(alpha2) and alpha2 > 0.0):
        raise ValueError(f"alpha2 must be finite and > 0, got {alpha2}")
    if not (math.isfinite(phi) and 0.0 < phi < math.pi / 2):
        raise ValueError(f"phi must lie strictly inside (0, pi/2), got {phi}")
    t = math.tan(phi)
    c = 1.0 / t
    first = math.exp(-4.0 * g) * math.sinh(2.0 * g) ** 2 / (2.0 * alpha2**2) * (t**2 + c**2)
    second = (math.exp(-4.0 * g) + t**2) / alpha2
    return first + second


def dd_sensitivity_small_phase(g: float, alpha2: float, phi: float) -> float:
    """Small-phase approximation of the direct-detection variance.

    Tracks dd_sensitivity_exact to better than 1% once the gain is moderately
    high (g >= 1.5 or so) and phi <= 0.01.
    """
    g = _check_gain(g)
    if not (math.isfinite(alpha2) and alpha2 > 0.0):
        raise ValueError(f"alpha2 must be finite and > 0, got {alpha2}")
    if not (math.isfinite(phi) and phi > 0.0):
        raise ValueError(f"phi must be finite and > 0, got {phi}")
    return (
        math.exp(-4.0 * g) / alpha2
        + (phi**2 / alpha2) * (1.0 + 1.0 / (8.0 * alpha2))
        + 1.0 / (8.0 * alpha2**2 * phi**2)
    )


def seed_threshold(g: float, phi: float) -> float:
    """Seed power above which the seed term dominates the dark-port intensity."""
    g = _check_gain(g)
    if not (math.isfinite(phi) and phi > 0.0):
        raise ValueError(f"phi must be finite and > 0, got {phi}")
    return math.exp(4.0 * g) / (8.0 * phi**2)


def snl(g: float, alpha2: float) -> float:
    """Shot-noise-limited phase variance 1/N_in for the circulating power."""
    g = _check_gain(g)
    if not (math.isfinite(alpha2) and alpha2 >= 0.0):
        raise ValueError(f"alpha2 must be finite and >= 0, got {alpha2}")
    n_in = alpha2 * math.exp(2.0 * g) + 2.0 * math.sinh(g) ** 2
    if n_in == 0.0:
        raise ValueError("no photons circulate when g = 0 and alpha2 = 0")
    return 1.0 / n_in


def ph_sensitivity(g: float, alpha2: float, phi: float) -> float:
    """Phase variance with a balanced lossless measurement amplifier (g_m = g)."""
    g = _check_gain(g)
    if not (math.isfinite(alpha2) and alpha2 >= 0.0):
        raise ValueError(f"alpha2 must be finite and >= 0, got {alpha2}")
    if not (math.isfinite(phi) and abs(phi) < math.pi / 2):
        raise ValueError(f"phi must satisfy |phi| < pi/2, got {phi}")
    s = math.sinh(2.0 * g) ** 2 + alpha2 * math.exp(4.0 * g)
    if s == 0.0:
        raise ValueError("undefined without squeezing or seed (g = alpha2 = 0)")
    curvature = math.sinh(4.0 * g) ** 2 + 2.0 * alpha2 * math.exp(8.0 * g)
    return 1.0 / s + math.tan(phi) ** 2 * curvature / (2.0 * s**2)


def ph_ratio_min(g: float, alpha2: float) -> float:
    """Best-case ratio of the amplified measurement to the shot-noise limit."""
    g = _check_gain(g)
    if not (math.isfinite(alpha2) and alpha2 >= 0.0):
        raise ValueError(f"alpha2 must be finite and >= 0, got {alpha2}")
    num = 2.0 * math.sinh(g) ** 2 + alpha2 * math.exp(2.0 * g)
    den = math.sinh(2.0 * g) ** 2 + alpha2 * math.exp(4.0 * g)
    if den == 0.0:
        raise ValueError("ratio undefined when g = 0 and alpha2 = 0")
    return num / den


def ph_ratio_min_large_g(g: float, alpha2: float) -> float:
    """Large-gain limit of ph_ratio_min: e^{-2g}(4 alpha2 + 2)/(4 alpha2 + 1)."""
    g = _check_gain(g)
    if not (math.isfinite(alpha2) and alpha2 >= 0.0):
        raise ValueError(f"alpha2 must be finite and >= 0, got {alpha2}")
    return math.exp(-2.0 * g) * (4.0 * alpha2 + 2.0) / (4.0 * alpha2 + 1.0)


def loss_ratio(g: float, tl2: float) -> float:
    """Sensitivity-ratio scaling with loop transmission tl2 per beam.

    tl2 is the amplitude-squared transmission of one beam's intra-loop path,
    so a round-trip power transmission T has tl2 = sqrt(T).
    """
    g = _check_gain(g)
    if not (math.isfinite(tl2) and 0.0 <= tl2 <= 1.0):
        raise ValueError(f"tl2 must lie in [0, 1], got {tl2}")
    return math.exp(-2.0 * g) * tl2 + (1.0 - tl2)


def detector_ratio(g: float, td2: float) -> float:
    """Sensitivity-ratio scaling with detector efficiency td2."""
    g = _check_gain(g)
    if not (math.isfinite(td2) and 0.0 <= td2 <= 1.0):
        raise ValueError(f"td2 must lie in [0, 1], got {td2}")
    return td2 * math.exp(-2.0 * g) + (1.0 - td2)


def nondeg_dd_limit(g: float, seeding: str) -> float:
    """Direct-detection enhancement floor for the signal-idler model.

    Seeding only the signal halves the usable interference signal, costing a
    factor of two against the symmetric (equal signal and idler seed) case.
    """
    g = _check_gain(g)
    if seeding == "single_mode":
        return 2.0 * math.exp(-2.0 * g)
    if seeding == "symmetric":
        return math.exp(-2.0 * g)
    raise ValueError(f"seeding must be 'single_mode' or 'symmetric', got {seeding!r}")


_REGISTRY = {
    "dd_exact": (dd_sensitivity_exact, ("g", "alpha2", "phi")),
    "dd_small_phase": (dd_sensitivity_small_phase, ("g", "alpha2", "phi")),
    "seed_threshold": (seed_threshold, ("g", "phi")),
    "snl": (snl, ("g", "alpha2")),
    "ph_exact": (ph_sensitivity, ("g", "alpha2", "phi")),
    "ph_ratio_min": (ph_ratio_min, ("g", "alpha2")),
    "ph_ratio_min_large_g": (ph_ratio_min_large_g, ("g", "alpha2")),
    "loss_scaling": (loss_ratio, ("g", "tl2")),
    "detector_scaling": (detector_ratio, ("g", "td2")),
    "nondeg_dd_limit": (nondeg_dd_limit, ("g", "seeding")),
}


def evaluate(formula_id: str, **kwargs) -> ClosedFormResult:
    """Evaluate a formula by id, echoing the inputs alongside the value."""
    if formula_id not in _REGISTRY:
        raise ValueError(f"unknown formula_id {formula_id!r}; known: {FORMULA_IDS}")
    fn, names = _REGISTRY[formula_id]
    missing = [n for n in names if n not in kwargs]
    extra = [k for k in kwargs if k not in names]
    if missing or extra:
        raise ValueError(
            f"{formula_id} takes exactly {names}; missing {missing}, unexpected {extra}"
        )
    value = fn(**{n: kwargs[n] for n in names})
    return ClosedFormResult(value=value, formula_id=formula_id, inputs=dict(kwargs))
