"""Photon number distributions: Bose-Einstein versus Poisson.

Counting photons from the chaotic output with a window much shorter than
the coherence time preserves the intensity fluctuations and yields
Bose-Einstein-like statistics; windows much longer than the coherence time
average the fluctuations away and the counts become Poissonian.  The total
variation distances against both references quantify the transition.
"""

import os

import numpy as np

import lkchaos as lk
from lkchaos.counting import (DetectorConfig, bose_einstein_pmf,
                              calibrate_attenuation, distribution_distance,
                              pnd_from_counts, poisson_pmf, sample_counts)

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

laser = lk.LaserParams()
sim = lk.SimConfig(t_transient=4e-6, t_record=10e-6)
trace = lk.integrate(laser, lk.FeedbackConfig(kappa=50e9),
                     lk.DriveConfig(rho=1.5), sim)

curve = lk.g2_from_intensity(trace, max_lag=3e-9)
t_coh = lk.coherence_time(curve)
print(f"source: g2(0) = {curve.zero_lag:.3f}, coherence time = "
      f"{t_coh * 1e12:.0f} ps")

windows = {
    "short (t_coh / 10)": max(trace.dt, t_coh / 10),
    "medium (3 t_coh)": 3 * t_coh,
    "long (100 t_coh)": 100 * t_coh,
}

results = {}
for label, window in windows.items():
    det = calibrate_attenuation(
        trace, DetectorConfig(window_t=window, seed=1), target_mean=0.69)
    pnd = pnd_from_counts(sample_counts(trace, det))
    tv_be = distribution_distance(pnd, lambda n: bose_einstein_pmf(pnd.mean, n))
    tv_po = distribution_distance(pnd, lambda n: poisson_pmf(pnd.mean, n))
    results[label] = pnd
    closer = "Bose-Einstein" if tv_be < tv_po else "Poisson"
    print(f"{label:22s} window = {window * 1e12:7.1f} ps: "
          f"g2(0) = {pnd.g2_zero:.3f}, TV_BE = {tv_be:.3f}, "
          f"TV_Poisson = {tv_po:.3f} -> closer to {closer}")

if plt is not None:
    fig, axes = plt.subplots(1, len(results), figsize=(4 * len(results), 3.4),
                             sharey=True)
    for ax, (label, pnd) in zip(axes, results.items()):
        n = np.arange(max(8, pnd.probs.size))
        probs = np.zeros(n.size)
        probs[: pnd.probs.size] = pnd.probs
        ax.bar(n, probs, width=0.6, label="counts", color="tab:blue")
        ax.plot(n, bose_einstein_pmf(pnd.mean, n), "o-", ms=3, lw=1,
                color="tab:red", label="Bose-Einstein")
        ax.plot(n, poisson_pmf(pnd.mean, n), "s--", ms=3, lw=1,
                color="black", label="Poisson")
        ax.set_title(f"{label}\ng2(0) = {pnd.g2_zero:.2f}")
        ax.set_xlabel("photon number")
    axes[0].set_ylabel("probability")
    axes[0].legend()
    fig.tight_layout()
    fig.savefig(os.path.join(OUT, "03_pnd.png"), dpi=150)
    print(f"wrote {OUT}/03_pnd.png")
