"""Delay-differential rate equations of a laser with delayed self-feedback.

The three real state variables are the field amplitude E (sqrt photon number
units), the field phase phi (radians, unwrapped) and the carrier number N.
With delayed amplitude E_d = E(t - tau_ext) and delayed phase phi_d:

    dE/dt   = (1/2) (G - 1/tau_p) E + kappa E_d cos(PHI)
    dphi/dt = (alpha/2) (G - 1/tau_p) - kappa (E_d / E) sin(PHI)
    dN/dt   = J/e - N/tau_n - G E^2
    PHI     = phase_c + phi(t) - phi_d
    G       = g_n (N - n0) / (1 + epsilon E^2)

Integration is classical fixed-step RK4 over a delay ring buffer holding
exactly D = tau_ext / h past steps.  The delayed pair needed at stage
midpoints is interpolated linearly between adjacent buffer slots.  The
ratio tau_ext / h must be an integer; with the default parameters
D = 99.85 ns / 2 ps = 49925.

The phase equation divides by E, which vanishes at intensity dropouts.  E is
clamped at a small amplitude floor before the division and after each step;
clamp events are counted separately for the transient and recorded phases
and reported in the trace diagnostics.  The model itself is deterministic;
identical inputs reproduce traces bit for bit.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .params import (DriveConfig, FeedbackConfig, LaserParams, ParamError,
                     carrier_injection_rate)

AMPLITUDE_FLOOR = 1e-6  # amplitude units; far below any lasing amplitude


class IntegrationDivergedError(RuntimeError):
    """The state became non-finite; carries the failure time in seconds."""

    def __init__(self, t_fail):
        super().__init__(f"integration diverged at t = {t_fail * 1e9:.3f} ns")
        self.t_fail = t_fail


class BelowThresholdError(ValueError):
    """An operation that requires lasing was asked for rho <= 1."""


@dataclass(frozen=True)
class LaserState:
    """Instantaneous state (E, phi, N)."""

    e_amp: float = 1e-3
    phi: float = 0.0
    n_car: float = 1.35e8

    def __post_init__(self):
        if self.e_amp < 0:
            raise ParamError("LaserState.e_amp must be >= 0")
        if not self.n_car > 0:
            raise ParamError("LaserState.n_car must be > 0")


@dataclass(frozen=True)
class SimConfig:
    """Integration grid, warm-up and recording policy.

    ``t_transient`` must cover at least one external-cavity delay so the
    artificial constant history is flushed before recording; the ratio
    tau_ext / step_h must be an integer (both are checked when a simulation
    is launched).  ``record='intensity'`` keeps only I = E^2, which is what
    the statistics operate on; ``'full'`` additionally keeps phase and
    carrier number.
    """

    step_h: float = 2e-12
    t_transient: float = 2e-6
    t_record: float = 10e-6
    initial: LaserState | None = None
    history_init: str = "constant"
    record_stride: int = 1
    record: str = "intensity"
    seed: int = 0

    def __post_init__(self):
        if not self.step_h > 0:
            raise ParamError("SimConfig.step_h must be > 0")
        if self.t_transient < 0 or not self.t_record > 0:
            raise ParamError("SimConfig durations must be positive")
        if self.record_stride < 1:
            raise ParamError("SimConfig.record_stride must be >= 1")
        if self.history_init != "constant":
            raise ParamError(f"unknown history_init {self.history_init!r}")
        if self.record not in ("intensity", "full"):
            raise ParamError(f"unknown record mode {self.record!r}")


@dataclass
class Trace:
    """Uniformly sampled output of one integration.

    ``intensity`` is always present; ``phase`` and ``carriers`` only when the
    simulation recorded the full state.  ``meta`` carries the complete
    parameter record, seed and clamp diagnostics so any artifact derived from
    the trace is reproducible from its own metadata.
    """

    dt: float
    intensity: np.ndarray
    phase: np.ndarray | None = None
    carriers: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.intensity.size == 0:
            raise ParamError("Trace must be nonempty")
        if np.any(self.intensity < 0):
            raise ParamError("Trace intensities must be >= 0")

    @property
    def duration(self):
        return self.dt * self.intensity.size

    @property
    def times(self):
        return self.dt * np.arange(self.intensity.size)


def delay_steps(f: FeedbackConfig, cfg: SimConfig) -> int:
    """Ring buffer length D = tau_ext / step_h; rejects non-integer ratios."""
    ratio = f.tau_ext / cfg.step_h
    d = round(ratio)
    if d < 1 or abs(ratio - d) > 1e-9 * max(1.0, ratio):
        raise ParamError(
            f"tau_ext/step_h = {ratio!r} is not a positive integer; "
            "choose a step that divides the delay exactly")
    return d


def gain(p: LaserParams, n_car, intensity):
    """Saturated optical gain G(N, I)."""
    return p.g_n * (n_car - p.n0) / (1.0 + p.epsilon * intensity)


def derivatives(s: LaserState, e_delayed, phi_delayed, p: LaserParams,
                f: FeedbackConfig, pump_rate):
    """Right-hand side (dE/dt, dphi/dt, dN/dt) at one state point.

    Mirrors the compiled integration kernel exactly, including the amplitude
    floor guarding the division in the phase equation.
    """
    if e_delayed < 0:
        raise ParamError("delayed amplitude must be >= 0")
    intensity = s.e_amp * s.e_amp
    g = gain(p, s.n_car, intensity)
    half = 0.5 * (g - 1.0 / p.tau_p)
    big_phi = f.phase_c + s.phi - phi_delayed
    de = half * s.e_amp + f.kappa * e_delayed * math.cos(big_phi)
    e_div = max(s.e_amp, AMPLITUDE_FLOOR)
    dphi = p.alpha * half - f.kappa * (e_delayed / e_div) * math.sin(big_phi)
    dn = pump_rate - s.n_car / p.tau_n - g * intensity
    return de, dphi, dn


@njit(cache=True)
def _rk4_delay(e0, phi0, n0, hist_e, hist_phi, kappa, phase_c, pump, h,
               n_transient, n_record, stride, e_floor, alpha, inv_tau_p,
               inv_tau_n, g_n, n_tr, eps, record_full,
               out_i, out_phi, out_n):
    d = hist_e.shape[0]
    e = e0
    phi = phi0
    n = n0
    clamps_tr = 0
    clamps_rec = 0
    w = 0
    total = n_transient + n_record
    for k in range(total):
        i = k % d
        j = (k + 1) % d
        ed0 = hist_e[i]
        pd0 = hist_phi[i]
        ed1 = hist_e[j]
        pd1 = hist_phi[j]
        edh = 0.5 * (ed0 + ed1)
        pdh = 0.5 * (pd0 + pd1)
        # slot i held t - tau and now takes the current state for step k + d
        hist_e[i] = e
        hist_phi[i] = phi
        if k >= n_transient:
            r = k - n_transient
            if r % stride == 0:
                out_i[w] = e * e
                if record_full:
                    out_phi[w] = phi
                    out_n[w] = n
                w += 1

        ii = e * e
        g = g_n * (n - n_tr) / (1.0 + eps * ii)
        half = 0.5 * (g - inv_tau_p)
        bp = phase_c + phi - pd0
        de1 = half * e + kappa * ed0 * np.cos(bp)
        ediv = e if e > e_floor else e_floor
        dp1 = alpha * half - kappa * (ed0 / ediv) * np.sin(bp)
        dn1 = pump - n * inv_tau_n - g * ii

        e2 = e + 0.5 * h * de1
        p2 = phi + 0.5 * h * dp1
        m2 = n + 0.5 * h * dn1
        ii = e2 * e2
        g = g_n * (m2 - n_tr) / (1.0 + eps * ii)
        half = 0.5 * (g - inv_tau_p)
        bp = phase_c + p2 - pdh
        de2 = half * e2 + kappa * edh * np.cos(bp)
        ediv = e2 if e2 > e_floor else e_floor
        dp2 = alpha * half - kappa * (edh / ediv) * np.sin(bp)
        dn2 = pump - m2 * inv_tau_n - g * ii

        e3 = e + 0.5 * h * de2
        p3 = phi + 0.5 * h * dp2
        m3 = n + 0.5 * h * dn2
        ii = e3 * e3
        g = g_n * (m3 - n_tr) / (1.0 + eps * ii)
        half = 0.5 * (g - inv_tau_p)
        bp = phase_c + p3 - pdh
        de3 = half * e3 + kappa * edh * np.cos(bp)
        ediv = e3 if e3 > e_floor else e_floor
        dp3 = alpha * half - kappa * (edh / ediv) * np.sin(bp)
        dn3 = pump - m3 * inv_tau_n - g * ii

        e4 = e + h * de3
        p4 = phi + h * dp3
        m4 = n + h * dn3
        ii = e4 * e4
        g = g_n * (m4 - n_tr) / (1.0 + eps * ii)
        half = 0.5 * (g - inv_tau_p)
        bp = phase_c + p4 - pd1
        de4 = half * e4 + kappa * ed1 * np.cos(bp)
        ediv = e4 if e4 > e_floor else e_floor
        dp4 = alpha * half - kappa * (ed1 / ediv) * np.sin(bp)
        dn4 = pump - m4 * inv_tau_n - g * ii

        e = e + (h / 6.0) * (de1 + 2.0 * de2 + 2.0 * de3 + de4)
        phi = phi + (h / 6.0) * (dp1 + 2.0 * dp2 + 2.0 * dp3 + dp4)
        n = n + (h / 6.0) * (dn1 + 2.0 * dn2 + 2.0 * dn3 + dn4)
        if e < e_floor:
            e = e_floor
            if k < n_transient:
                clamps_tr += 1
            else:
                clamps_rec += 1
        if not (np.isfinite(e) and np.isfinite(phi) and np.isfinite(n)):
            return clamps_tr, clamps_rec, k, w
    return clamps_tr, clamps_rec, -1, w


def integrate(p: LaserParams, f: FeedbackConfig, d: DriveConfig,
              cfg: SimConfig) -> Trace:
    """Integrate the delayed rate equations and return the recorded trace.

    The first ``t_transient`` seconds are discarded; the recorded window is
    decimated by ``record_stride``.  Raises
    :class:`IntegrationDivergedError` if the state becomes non-finite.
    """
    dsteps = delay_steps(f, cfg)
    if cfg.t_transient < f.tau_ext:
        raise ParamError("t_transient must be >= tau_ext to flush the "
                         "artificial delay history")
    initial = cfg.initial if cfg.initial is not None else LaserState(n_car=p.n0)
    n_transient = int(round(cfg.t_transient / cfg.step_h))
    n_record = int(round(cfg.t_record / cfg.step_h))
    if n_record < 1:
        raise ParamError("t_record shorter than one step")
    n_out = (n_record + cfg.record_stride - 1) // cfg.record_stride

    hist_e = np.full(dsteps, initial.e_amp, dtype=np.float64)
    hist_phi = np.full(dsteps, initial.phi, dtype=np.float64)
    record_full = cfg.record == "full"
    out_i = np.empty(n_out)
    out_phi = np.empty(n_out if record_full else 1)
    out_n = np.empty(n_out if record_full else 1)

    pump = carrier_injection_rate(p, d)
    clamps_tr, clamps_rec, fail_step, written = _rk4_delay(
        initial.e_amp, initial.phi, initial.n_car, hist_e, hist_phi,
        f.kappa, f.phase_c, pump, cfg.step_h, n_transient, n_record,
        cfg.record_stride, AMPLITUDE_FLOOR, p.alpha, 1.0 / p.tau_p,
        1.0 / p.tau_n, p.g_n, p.n0, p.epsilon, record_full,
        out_i, out_phi, out_n)
    if fail_step >= 0:
        raise IntegrationDivergedError(fail_step * cfg.step_h)

    n_total = n_transient + n_record
    meta = {
        "laser": p,
        "feedback": f,
        "drive": d,
        "sim": cfg,
        "seed": cfg.seed,
        "pump_rate": pump,
        "delay_steps": dsteps,
        "clamps_transient": clamps_tr,
        "clamps_recorded": clamps_rec,
        "clamp_fraction_recorded": clamps_rec / n_record,
        "clamp_fraction_total": (clamps_tr + clamps_rec) / n_total,
    }
    return Trace(
        dt=cfg.step_h * cfg.record_stride,
        intensity=out_i[:written],
        phase=out_phi[:written] if record_full else None,
        carriers=out_n[:written] if record_full else None,
        meta=meta,
    )


def solitary_steady_state(p: LaserParams, d: DriveConfig):
    """Closed-form steady state (photon number, carrier number) at kappa = 0.

    Above threshold the gain clamps to 1/tau_p at the saturated intensity;
    below threshold the photon number is zero and carriers follow the pump.
    """
    a = p.n0 / p.tau_n
    b = 1.0 / (p.g_n * p.tau_p * p.tau_n)
    if d.rho <= 1.0:
        return 0.0, d.rho * (a + b) * p.tau_n
    s = (d.rho - 1.0) * (a + b) / (1.0 / p.tau_p + b * p.epsilon)
    n = p.n0 + (1.0 + p.epsilon * s) / (p.g_n * p.tau_p)
    return s, n


def relaxation_oscillation_frequency(p: LaserParams, d: DriveConfig) -> float:
    """Small-signal relaxation oscillation frequency of the solitary laser.

    f_RO = (1/2 pi) sqrt(G_N S / tau_p) with S the kappa = 0 steady-state
    photon number.  Raises :class:`BelowThresholdError` for rho <= 1.
    """
    if d.rho <= 1.0:
        raise BelowThresholdError(f"rho = {d.rho:g} does not lase; need rho > 1")
    s, _ = solitary_steady_state(p, d)
    return math.sqrt(p.g_n * s / p.tau_p) / (2.0 * math.pi)
