"""Device constants, drive and feedback configuration.

All quantities are SI internally (seconds, amperes, per-second rates).  The
default :class:`LaserParams` describe a 1.55 um DFB laser diode with a
threshold current of about 10.5 mA.  Feedback strength is parameterized by
the rate ``kappa``; a measured power feedback fraction ``eta`` can be mapped
onto ``kappa`` through a small calibration table
(:class:`EtaKappaCalibration`), since no analytic eta-kappa law fits the
calibrated pairs.

Parameter records are frozen after validation and safe to share across
worker processes.
"""

from dataclasses import dataclass, field, replace

from .units import UnitError

E_CHARGE = 1.602176634e-19  # elementary charge, C (exact SI)


class ParamError(ValueError):
    """A parameter record or parameter file failed validation."""


@dataclass(frozen=True)
class LaserParams:
    """Intrinsic device constants of the solitary laser.

    The carrier variable is a dimensionless carrier number, the field
    amplitude is in sqrt(photon number) units, so ``g_n`` is a rate per
    carrier and ``epsilon`` a saturation coefficient per photon.
    """

    alpha: float = 5.0              # linewidth enhancement factor
    tau_p: float = 2.5e-12          # photon lifetime, s
    tau_n: float = 2.3e-9           # carrier lifetime, s
    g_n: float = 2.56e4             # gain coefficient, s^-1 per carrier (2.56e-8 ps^-1)
    n0: float = 1.35e8              # transparency carrier number
    epsilon: float = 5e-7           # gain saturation, per photon
    lambda_m: float = 1.55e-6       # wavelength, m
    e_charge: float = E_CHARGE      # elementary charge, C

    def __post_init__(self):
        for name in ("alpha", "tau_p", "tau_n", "g_n", "n0", "lambda_m", "e_charge"):
            if not getattr(self, name) > 0:
                raise ParamError(f"LaserParams.{name} must be strictly positive")
        if self.epsilon < 0:
            raise ParamError("LaserParams.epsilon must be >= 0")


@dataclass(frozen=True)
class FeedbackConfig:
    """External cavity feedback: rate kappa, delay, round-trip phase.

    ``phase_c`` is the constant round-trip phase (angular frequency times
    delay); only its value modulo 2*pi matters and it is normalized into
    [0, 2*pi) on construction.
    """

    kappa: float = 0.0              # feedback rate, s^-1
    tau_ext: float = 99.85e-9       # external cavity delay, s
    phase_c: float = 0.0            # round-trip phase constant, rad

    def __post_init__(self):
        if self.kappa < 0:
            raise ParamError("FeedbackConfig.kappa must be >= 0")
        if not self.tau_ext > 0:
            raise ParamError("FeedbackConfig.tau_ext must be > 0")
        twopi = 6.283185307179586
        object.__setattr__(self, "phase_c", self.phase_c % twopi)


@dataclass(frozen=True)
class DriveConfig:
    """Pump drive as a multiple of the threshold current, J = rho * J_th.

    rho = 0 (laser off) is permitted so that zero-pump identities can be
    exercised; lasing requires rho > 1.
    """

    rho: float = 1.5

    def __post_init__(self):
        if self.rho < 0:
            raise ParamError("DriveConfig.rho must be >= 0")


@dataclass(frozen=True)
class EtaKappaCalibration:
    """Calibration table mapping power feedback fraction eta to rate kappa.

    The four default pairs are the calibrated operating points of the
    fiber-cavity setup; intermediate eta values are interpolated linearly.
    Whether eta is an amplitude or power ratio at the circulator is not
    specified by the source material, so the table is treated purely as a
    measured monotone mapping.
    """

    points: tuple = (
        (5.5e9, 0.031),
        (7.0e9, 0.063),
        (11.0e9, 0.125),
        (20.0e9, 0.25),
    )

    def __post_init__(self):
        kappas = [k for k, _ in self.points]
        etas = [e for _, e in self.points]
        if len(self.points) < 2:
            raise ParamError("calibration table needs at least two points")
        if any(b <= a for a, b in zip(kappas, kappas[1:])):
            raise ParamError("calibration kappa column must be strictly increasing")
        if any(b <= a for a, b in zip(etas, etas[1:])):
            raise ParamError("calibration eta column must be strictly increasing")

    @property
    def eta_range(self):
        return self.points[0][1], self.points[-1][1]


DEFAULT_CALIBRATION = EtaKappaCalibration()


def threshold_current(p: LaserParams) -> float:
    """Threshold current in amperes: e/tau_n * (N0 + 1/(G_N tau_p))."""
    return p.e_charge * (1.0 / p.tau_n) * (p.n0 + 1.0 / (p.g_n * p.tau_p))


def carrier_injection_rate(p: LaserParams, d: DriveConfig) -> float:
    """Carrier injection rate J/e in s^-1 used directly by the integrator."""
    return d.rho * threshold_current(p) / p.e_charge


def eta_to_kappa(cal: EtaKappaCalibration, eta: float) -> float:
    """Map a power feedback fraction onto kappa by table interpolation."""
    lo, hi = cal.eta_range
    if not lo <= eta <= hi:
        raise ParamError(f"eta={eta:g} outside calibrated range [{lo:g}, {hi:g}]")
    for (k0, e0), (k1, e1) in zip(cal.points, cal.points[1:]):
        if eta <= e1:
            return k0 + (eta - e0) * (k1 - k0) / (e1 - e0)
    return cal.points[-1][0]


def kappa_to_eta(cal: EtaKappaCalibration, kappa: float) -> float:
    """Inverse of :func:`eta_to_kappa` over the calibrated kappa range."""
    lo, hi = cal.points[0][0], cal.points[-1][0]
    if not lo <= kappa <= hi:
        raise ParamError(f"kappa={kappa:g} outside calibrated range [{lo:g}, {hi:g}]")
    for (k0, e0), (k1, e1) in zip(cal.points, cal.points[1:]):
        if kappa <= k1:
            return e0 + (kappa - k0) * (e1 - e0) / (k1 - k0)
    return cal.points[-1][1]


# Parameter files are flat "key = value" text with '#' comments.  Keys carry
# unit suffixes so that values stay in the units the literature quotes.
_FILE_KEYS = (
    "alpha", "tau_p_ps", "tau_n_ns", "g_n_per_ps", "n0", "epsilon",
    "lambda_um", "kappa_per_ns", "eta_percent", "tau_ext_ns",
    "phase_c_rad", "rho",
)


def parse_param_file(path):
    """Read a flat key=value parameter file into a dict of floats.

    Unknown keys are hard errors, never silently ignored.
    """
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParamError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, text = line.partition("=")
            key = key.strip()
            if key not in _FILE_KEYS:
                raise ParamError(f"{path}:{lineno}: unknown key {key!r}")
            if key in values:
                raise ParamError(f"{path}:{lineno}: duplicate key {key!r}")
            try:
                values[key] = float(text.strip())
            except ValueError:
                raise ParamError(f"{path}:{lineno}: bad number {text.strip()!r}") from None
    if "kappa_per_ns" in values and "eta_percent" in values:
        raise ParamError(f"{path}: give kappa_per_ns or eta_percent, not both")
    return values


def configs_from_dict(values, calibration=DEFAULT_CALIBRATION):
    """Build (LaserParams, FeedbackConfig, DriveConfig) from file-style keys."""
    unknown = set(values) - set(_FILE_KEYS)
    if unknown:
        raise ParamError(f"unknown keys: {sorted(unknown)}")
    laser = LaserParams(
        alpha=values.get("alpha", 5.0),
        tau_p=values.get("tau_p_ps", 2.5) * 1e-12,
        tau_n=values.get("tau_n_ns", 2.3) * 1e-9,
        g_n=values.get("g_n_per_ps", 2.56e-8) * 1e12,
        n0=values.get("n0", 1.35e8),
        epsilon=values.get("epsilon", 5e-7),
        lambda_m=values.get("lambda_um", 1.55) * 1e-6,
    )
    if "eta_percent" in values:
        kappa = eta_to_kappa(calibration, values["eta_percent"] / 100.0)
    else:
        kappa = values.get("kappa_per_ns", 0.0) * 1e9
    feedback = FeedbackConfig(
        kappa=kappa,
        tau_ext=values.get("tau_ext_ns", 99.85) * 1e-9,
        phase_c=values.get("phase_c_rad", 0.0),
    )
    drive = DriveConfig(rho=values.get("rho", 1.5))
    return laser, feedback, drive


def load_param_file(path, calibration=DEFAULT_CALIBRATION):
    """Parse a parameter file and return validated config records."""
    return configs_from_dict(parse_param_file(path), calibration)
