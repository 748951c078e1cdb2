"""Single-photon counting emulation on top of simulated intensity traces.

Detection is semiclassical and doubly stochastic: conditioned on the
classical intensity, photocounts in a window are Poisson with mean
proportional to the integrated intensity,

    mu_w = atten * quantum_eff * integral_w I dt.

This is the standard model that produces Bose-Einstein statistics when the
window is short against the coherence time and Poisson statistics when it is
long.  ``atten`` absorbs collection efficiency and deliberate attenuation and
is normally fixed by :func:`calibrate_attenuation` so the mean count per
window hits a requested value.

An optional non-paralyzable dead time (``DetectorConfig.dead_time``)
discards arrivals closer than the detector can resolve; it is off by
default and exists for pile-up and saturation studies.

All sampling is deterministic for a fixed ``DetectorConfig.seed``.  Streams
for independent work units (detector channels, sweep points) derive their
generators from per-unit seed keys, so parallel and serial execution produce
identical results.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .integrator import Trace
from .metrics import G2Curve


class DegenerateTraceError(ValueError):
    """The trace cannot support the requested counting operation."""


class InsufficientCountsError(RuntimeError):
    """A timestamp stream came out empty."""


class CountRateError(ValueError):
    """The configured flux exceeds the counter saturation guard."""


@dataclass(frozen=True)
class DetectorConfig:
    """Detection chain settings for counting and coincidence emulation."""

    quantum_eff: float = 0.25       # detection efficiency
    timing_res: float = 60e-12      # coincidence bin resolution, s
    window_t: float = 100e-12       # counting window, s
    atten: float = 1.0              # mean photon number scaling
    max_rate: float | None = None   # counts/s saturation guard
    dead_time: float = 0.0          # non-paralyzable dead time, s (0 = off)
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.quantum_eff <= 1.0:
            raise ValueError("quantum_eff must be in (0, 1]")
        if not self.timing_res > 0 or not self.window_t > 0:
            raise ValueError("timing_res and window_t must be > 0")
        if not self.atten > 0:
            raise ValueError("atten must be > 0")
        if self.dead_time < 0:
            raise ValueError("dead_time must be >= 0")


@dataclass
class CountSeries:
    """Photocounts per consecutive window."""

    window_t: float
    counts: np.ndarray

    def __post_init__(self):
        if self.counts.size == 0:
            raise ValueError("CountSeries must be nonempty")
        if np.any(self.counts < 0):
            raise ValueError("counts must be >= 0")


@dataclass
class Pnd:
    """Photon number distribution with empirical mean and g2(0)."""

    probs: np.ndarray               # probs[n] = P(n)
    mean: float
    g2_zero: float


def poisson_pmf(mean, n):
    """Poisson probability mass, evaluated in log space for large n."""
    n = np.asarray(n)
    if mean < 0:
        raise ValueError("mean must be >= 0")
    if mean == 0.0:
        return np.where(n == 0, 1.0, 0.0) if n.ndim else float(n == 0)
    gammaln = np.vectorize(math.lgamma)
    out = np.exp(n * math.log(mean) - mean - gammaln(n + 1.0))
    return out if out.ndim else float(out)


def bose_einstein_pmf(mean, n):
    """Bose-Einstein (geometric) probability mass for thermal light."""
    n = np.asarray(n)
    if mean < 0:
        raise ValueError("mean must be >= 0")
    if mean == 0.0:
        return np.where(n == 0, 1.0, 0.0) if n.ndim else float(n == 0)
    out = np.exp(n * math.log(mean) - (n + 1.0) * math.log1p(mean))
    return out if out.ndim else float(out)


def _rng_for(det: DetectorConfig, *key):
    return np.random.default_rng(np.random.SeedSequence((det.seed,) + key))


def _check_rate(tr, det, split=1.0):
    if det.max_rate is None:
        return
    rate = det.atten * det.quantum_eff * tr.intensity.mean() / split
    if rate > det.max_rate:
        raise CountRateError(
            f"expected count rate {rate:.3g}/s exceeds max_rate "
            f"{det.max_rate:.3g}/s")


def sample_timestamps(tr: Trace, det: DetectorConfig, split=1):
    """Doubly-stochastic photon arrival times, one stream per channel.

    The intensity is divided equally over ``split`` channels (a balanced
    beamsplitter for split=2); each stream draws per-sample Poisson arrival
    counts with rate atten * quantum_eff * I(t) / split, places arrivals
    uniformly inside their sample interval, and applies the dead time if
    configured.
    """
    lam_full = det.atten * det.quantum_eff * tr.intensity * tr.dt
    if lam_full.sum() == 0.0:
        raise DegenerateTraceError("zero intensity trace yields no arrivals")
    _check_rate(tr, det, split=split)
    streams = []
    for ch in range(split):
        rng = _rng_for(det, ch)
        per_step = rng.poisson(lam_full / split)
        idx = np.repeat(np.arange(per_step.size), per_step)
        if idx.size == 0:
            raise InsufficientCountsError(f"channel {ch} produced no counts")
        times = (idx + rng.random(idx.size)) * tr.dt
        times.sort()
        if det.dead_time > 0.0:
            times = _dead_time_filter(times, det.dead_time)
        streams.append(times)
    return streams


def _dead_time_filter(times, dead):
    """Non-paralyzable dead time: drop arrivals within ``dead`` of the last
    registered one."""
    keep = np.empty(times.size, dtype=bool)
    last = -np.inf
    for i in range(times.size):
        if times[i] - last >= dead:
            keep[i] = True
            last = times[i]
        else:
            keep[i] = False
    return times[keep]


def sample_counts(tr: Trace, det: DetectorConfig) -> CountSeries:
    """Photocounts per consecutive window of ``det.window_t``.

    Without dead time each window draws Poisson(atten * quantum_eff *
    integral of I over the window); with dead time the counts come from the
    filtered arrival stream.  Deterministic for a fixed seed.
    """
    if det.window_t < tr.dt:
        raise ValueError("window_t must be at least the trace sample interval")
    w_len = int(round(det.window_t / tr.dt))
    n_win = tr.intensity.size // w_len
    if n_win < 1:
        raise DegenerateTraceError("trace shorter than one counting window")
    if tr.intensity.sum() == 0.0:
        raise DegenerateTraceError("zero intensity trace; requested mean "
                                   "is unattainable")
    _check_rate(tr, det)
    if det.dead_time > 0.0:
        times = sample_timestamps(tr, det, split=1)[0]
        edges = np.arange(n_win + 1) * (w_len * tr.dt)
        counts = np.histogram(times, bins=edges)[0]
    else:
        windows = tr.intensity[: n_win * w_len].reshape(n_win, w_len)
        mu = det.atten * det.quantum_eff * windows.sum(axis=1) * tr.dt
        rng = _rng_for(det, 0)
        counts = rng.poisson(mu)
    return CountSeries(window_t=w_len * tr.dt, counts=counts.astype(np.int64))


def calibrate_attenuation(tr: Trace, det: DetectorConfig, target_mean,
                          tol=0.005, max_iter=20) -> DetectorConfig:
    """Return a config whose sampled mean count per window hits the target.

    The linear (no dead time) case solves in one step; with dead time the
    response saturates and the attenuation is found by deterministic
    fixed-point iteration on the empirical mean.
    """
    if not target_mean > 0:
        raise ValueError("target_mean must be > 0")
    w_len = int(round(det.window_t / tr.dt))
    n_win = tr.intensity.size // w_len
    if n_win < 1 or tr.intensity.sum() == 0.0:
        raise DegenerateTraceError("cannot calibrate on this trace")
    mean_integral = (tr.intensity[: n_win * w_len].reshape(n_win, w_len)
                     .sum(axis=1) * tr.dt).mean()
    atten = target_mean / (det.quantum_eff * mean_integral)
    cal = replace(det, atten=atten)
    if det.dead_time == 0.0:
        return cal
    for _ in range(max_iter):
        mean = sample_counts(tr, cal).counts.mean()
        if abs(mean - target_mean) <= tol * target_mean:
            return cal
        if mean == 0.0:
            raise DegenerateTraceError("dead time consumed every count")
        cal = replace(cal, atten=cal.atten * target_mean / mean)
    raise RuntimeError(f"attenuation calibration did not converge to "
                       f"{target_mean:g} within {max_iter} iterations")


def pnd_from_counts(cs: CountSeries) -> Pnd:
    """Normalized photon number histogram with mean and empirical g2(0)."""
    counts = cs.counts
    mean = counts.mean()
    if mean == 0.0:
        raise DegenerateTraceError("all-zero count series")
    probs = np.bincount(counts) / counts.size
    second = np.mean(counts.astype(float) * (counts - 1.0))
    return Pnd(probs=probs, mean=float(mean), g2_zero=float(second / mean ** 2))


def distribution_distance(p: Pnd, q_pmf) -> float:
    """Total variation distance between an empirical Pnd and a reference pmf.

    ``q_pmf`` maps photon number arrays to probabilities (see
    :func:`poisson_pmf`, :func:`bose_einstein_pmf`).  Reference mass beyond
    the empirical support enters as a lumped tail term.
    """
    n = np.arange(p.probs.size)
    q = np.asarray(q_pmf(n), dtype=float)
    tail = max(0.0, 1.0 - q.sum())
    return 0.5 * (np.abs(p.probs - q).sum() + tail)


def hbt_coincidence_g2(tr: Trace, det: DetectorConfig, max_lag) -> G2Curve:
    """g2(tau) from pairwise arrival-time differences of two detectors.

    The beam is split equally onto two doubly-stochastic detectors; time
    differences are histogrammed in bins of ``timing_res`` and normalized by
    the accidental-coincidence baseline (product of the singles rates, bin
    width and acquisition time), with the per-lag overlap correction.
    """
    t1, t2 = sample_timestamps(tr, det, split=2)
    duration = tr.duration
    res = det.timing_res
    n_bins = int(duration / res)
    if n_bins < 4:
        raise ValueError("timing_res too coarse for the trace duration")
    k_max = int(round(max_lag / res))
    if k_max < 1:
        raise ValueError("max_lag must cover at least one timing bin")
    edges = np.arange(n_bins + 1) * res
    c1 = np.histogram(t1, bins=edges)[0].astype(float)
    c2 = np.histogram(t2, bins=edges)[0].astype(float)
    n1 = c1.sum()
    n2 = c2.sum()
    if n1 == 0 or n2 == 0:
        raise InsufficientCountsError("empty timestamp stream")
    lags = np.arange(-k_max, k_max + 1)
    pairs = np.empty(lags.size)
    for idx, k in enumerate(lags):
        if k >= 0:
            pairs[idx] = np.dot(c1[: n_bins - k], c2[k:])
        else:
            pairs[idx] = np.dot(c1[-k:], c2[: n_bins + k])
    overlap = n_bins - np.abs(lags)
    baseline = overlap * (n1 / n_bins) * (n2 / n_bins)
    return G2Curve(lags=lags * res, values=pairs / baseline,
                   mean_intensity=float(tr.intensity.mean()))


def write_timestamps_csv(path, streams):
    """Write arrival streams as CSV rows of (channel id, time in ps)."""
    with open(path, "w") as fh:
        fh.write("channel,t_ps\n")
        for ch, times in enumerate(streams):
            for t in times:
                fh.write(f"{ch},{int(round(t * 1e12))}\n")


def write_pnd_csv(path, pnd: Pnd, meta=None):
    """Export an empirical Pnd with matched BE and Poisson references."""
    n = np.arange(pnd.probs.size)
    be = bose_einstein_pmf(pnd.mean, n)
    po = poisson_pmf(pnd.mean, n)
    with open(path, "w") as fh:
        for key in sorted(meta or {}):
            fh.write(f"# {key} = {meta[key]!r}\n")
        fh.write(f"# mean = {pnd.mean!r}\n")
        fh.write(f"# g2_zero = {pnd.g2_zero!r}\n")
        fh.write("n,p_empirical,p_bose_einstein,p_poisson\n")
        for i in n:
            fh.write(f"{i},{pnd.probs[i]:.9g},{be[i]:.9g},{po[i]:.9g}\n")
