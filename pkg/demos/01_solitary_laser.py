"""Solitary laser basics: threshold, steady state, relaxation oscillations.

Without feedback the rate equations settle onto a gain-clamped steady state.
This script computes the threshold current, integrates the turn-on, and
measures the relaxation-oscillation ring against the small-signal formula.

Run from the repository root:  python demos/01_solitary_laser.py
Plots are written next to this script when matplotlib is available.
"""

import os

import numpy as np

import lkchaos as lk

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

laser = lk.LaserParams()
drive = lk.DriveConfig(rho=1.5)

print(f"threshold current      : {lk.threshold_current(laser) * 1e3:.3f} mA")
s_bar, n_bar = lk.solitary_steady_state(laser, drive)
print(f"steady photon number   : {s_bar:.4g} (rho = {drive.rho})")
print(f"steady carrier number  : {n_bar:.6g}")
f_ro = lk.relaxation_oscillation_frequency(laser, drive)
print(f"relaxation oscillation : {f_ro / 1e9:.3f} GHz")

# turn-on transient from a cold start, recorded from t = 0
cfg = lk.SimConfig(t_transient=0.2e-9, t_record=6e-9, record="full",
                   initial=lk.LaserState(e_amp=1e-3, phi=0.0, n_car=laser.n0))
trace = lk.integrate(laser, lk.FeedbackConfig(kappa=0.0, tau_ext=0.2e-9),
                     drive, cfg)

# small-signal ring: perturb the steady state a little and FFT the decay
ring_cfg = lk.SimConfig(t_transient=0.2e-9, t_record=6e-9,
                        initial=lk.LaserState(e_amp=0.95 * np.sqrt(s_bar),
                                              phi=0.0, n_car=n_bar))
ring = lk.integrate(laser, lk.FeedbackConfig(kappa=0.0, tau_ext=0.2e-9),
                    drive, ring_cfg)
x = (ring.intensity - ring.intensity.mean()) * np.hanning(ring.intensity.size)
spec = np.abs(np.fft.rfft(x, 1 << 16))
freqs = np.fft.rfftfreq(1 << 16, ring.dt)
lo = np.searchsorted(freqs, 1.5e9)  # skip the slow mean-level recovery
peak = freqs[lo + np.argmax(spec[lo:])]
print(f"measured ring          : {peak / 1e9:.3f} GHz "
      f"({100 * abs(peak - f_ro) / f_ro:.1f}% from the formula)")

print(f"final intensity vs steady state: "
      f"{trace.intensity[-1] / s_bar:.6f} (should approach 1)")

if plt is not None:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    t_ns = trace.times * 1e9
    ax1.plot(t_ns, trace.intensity / s_bar, lw=0.8)
    ax1.axhline(1.0, color="gray", ls="--", lw=0.8)
    ax1.set_ylabel("I / I_steady")
    ax1.set_title("turn-on with relaxation oscillations")
    ax2.plot(t_ns, trace.carriers / laser.n0, lw=0.8, color="tab:green")
    ax2.set_ylabel("N / N0")
    ax2.set_xlabel("time (ns)")
    fig.tight_layout()
    fig.savefig(os.path.join(OUT, "01_turn_on.png"), dpi=150)
    print(f"wrote {OUT}/01_turn_on.png")
